// btsampler command-line tool. Talks to the library only through the C API.

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "btsampler/btsampler.h"
#include "json.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitInternal = 3;

// Carries a C API failure out to main().
struct ApiFailure {
  bts_status status;
  std::string message;
};

struct UsageFailure {
  std::string message;
};

void check(bts_status status) {
  if (status != BTS_OK) throw ApiFailure{status, bts_last_error()};
}

void warn_if_any() {
  const std::string w = bts_last_warning();
  if (!w.empty()) std::cerr << "warning: " << w << '\n';
}

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Corpus = std::unique_ptr<bts_corpus, Deleter<bts_corpus, bts_corpus_free>>;
using Records =
    std::unique_ptr<bts_records, Deleter<bts_records, bts_records_free>>;
using Lm = std::unique_ptr<bts_lm, Deleter<bts_lm, bts_lm_free>>;
using Stats = std::unique_ptr<bts_stats, Deleter<bts_stats, bts_stats_free>>;
using Difficulty =
    std::unique_ptr<bts_difficulty, Deleter<bts_difficulty, bts_difficulty_free>>;
using Embeddings =
    std::unique_ptr<bts_embeddings, Deleter<bts_embeddings, bts_embeddings_free>>;
using SampleSet =
    std::unique_ptr<bts_sample_set, Deleter<bts_sample_set, bts_sample_set_free>>;

Corpus load_corpus(const std::string& path, const bts_params& params) {
  bts_corpus* raw = nullptr;
  check(bts_corpus_load(path.c_str(), params.marker, &raw));
  return Corpus(raw);
}

Records load_records(const std::string& path) {
  bts_records* raw = nullptr;
  check(bts_records_load(path.c_str(), &raw));
  return Records(raw);
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ApiFailure{BTS_ERR_IO, "cannot read '" + path + "' for digest"};
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(),
                                                              EVP_MD_CTX_free);
  EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), md, &len);
  std::string hex;
  char byte[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(byte, sizeof byte, "%02x", md[i]);
    hex += byte;
  }
  return hex;
}

std::string dump_params(const bts_params& params) {
  std::size_t needed = 0;
  check(bts_params_dump(&params, nullptr, 0, &needed));
  std::string text(needed + 1, '\0');
  check(bts_params_dump(&params, text.data(), text.size(), &needed));
  text.resize(needed);
  return text;
}

// Everything needed to replay a run: command, parameters, input and output
// digests. Contains no timestamps so identical runs give identical files.
class Manifest {
 public:
  explicit Manifest(std::string command) : command_(std::move(command)) {}

  void option(const std::string& key, const std::string& value) {
    options_[key] = value;
  }
  void input(const std::string& role, const std::string& path) {
    inputs_.push_back({role, path});
  }
  void output(const std::string& role, const std::string& path) {
    outputs_.push_back({role, path});
  }

  void write(const std::string& path, const bts_params& params) const {
    nlohmann::ordered_json j;
    j["tool"] = "btsampler";
    j["version"] = bts_version();
    j["generator"] = bts_generator_name();
    j["command"] = command_;
    j["seed"] = params.seed;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    std::istringstream lines(dump_params(params));
    for (std::string line; std::getline(lines, line);) {
      const auto eq = line.find(" = ");
      cfg[line.substr(0, eq)] = line.substr(eq + 3);
    }
    j["config"] = cfg;
    j["options"] = options_;
    auto files = [](const auto& list) {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& [role, p] : list) {
        arr.push_back({{"role", role}, {"path", p}, {"sha256", sha256_file(p)}});
      }
      return arr;
    };
    j["inputs"] = files(inputs_);
    j["outputs"] = files(outputs_);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << j.dump(2) << '\n';
    if (!out) throw ApiFailure{BTS_ERR_IO, "cannot write manifest '" + path + "'"};
  }

 private:
  std::string command_;
  std::map<std::string, std::string> options_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> outputs_;
};

// Hyperparameter flags are collected as text and applied through
// bts_params_set, so CLI and config files share one validation path.
struct ParamFlags {
  std::map<std::string, std::optional<std::string>> values;

  void add(CLI::App* cmd, const std::string& key, const std::string& flag,
           const std::string& help) {
    cmd->add_option(flag, values[key], help);
  }
  void apply(bts_params& params) const {
    for (const auto& [key, value] : values) {
      if (value) check(bts_params_set(&params, key.c_str(), value->c_str()));
    }
  }
};

struct Globals {
  std::optional<std::string> config_path;
  std::optional<std::string> seed;
  std::optional<std::string> marker;
  std::optional<std::string> manifest_path;
};

bts_params resolve_params(const Globals& g, const ParamFlags& flags) {
  bts_params params;
  check(bts_params_init(&params));
  if (g.config_path) check(bts_params_load_file(&params, g.config_path->c_str()));
  if (g.seed) check(bts_params_set(&params, "seed", g.seed->c_str()));
  if (g.marker) check(bts_params_set(&params, "marker", g.marker->c_str()));
  flags.apply(params);
  return params;
}

void finish_manifest(Manifest& m, const Globals& g, const bts_params& params,
                     const std::string& default_path) {
  if (g.config_path) m.input("config", *g.config_path);
  m.write(g.manifest_path.value_or(default_path), params);
}

bts_criterion parse_criterion(const std::string& name) {
  if (name == "freq") return BTS_CRITERION_FREQ;
  if (name == "mean-loss") return BTS_CRITERION_MEAN_LOSS;
  if (name == "mean-std") return BTS_CRITERION_MEAN_AND_STD;
  throw UsageFailure{"unknown criterion '" + name + "'"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"btsampler: targeted sentence sampling for back-translation"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(bts_version()));

  Globals g;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--seed", g.seed, "random seed (default 0)");
  app.add_option("--marker", g.marker, "subword marker suffix (default @@)");
  app.add_option("--manifest", g.manifest_path,
                 "run manifest path (default: next to the main output)");

  // score
  auto* score = app.add_subcommand("score", "train the n-gram oracle and emit loss records");
  std::string score_train, score_out;
  std::optional<std::string> score_corpus;
  ParamFlags score_flags;
  score->add_option("--train", score_train, "training corpus")->required();
  score->add_option("--corpus", score_corpus, "corpus to score (default: --train)");
  score->add_option("--out", score_out, "loss-record TSV")->required();
  score_flags.add(score, "lm_order", "--order", "n-gram order (default 3)");
  score_flags.add(score, "lm_k", "--k", "add-k constant (default 0.1)");

  // stats
  auto* stats = app.add_subcommand("stats", "aggregate loss records into a per-token report");
  std::string stats_loss, stats_out, stats_sort = "mean-loss-desc";
  stats->add_option("--loss", stats_loss, "loss-record TSV")->required();
  stats->add_option("--out", stats_out, "report TSV")->required();
  stats->add_option("--sort", stats_sort, "mean-loss-desc | freq-asc")
      ->check(CLI::IsMember({"mean-loss-desc", "freq-asc"}));

  // diff
  auto* diff = app.add_subcommand("diff", "compare two stats reports");
  std::string diff_base, diff_retrained, diff_out;
  diff->add_option("--base", diff_base, "baseline report TSV")->required();
  diff->add_option("--retrained", diff_retrained, "retrained report TSV")->required();
  diff->add_option("--out", diff_out, "diff TSV")->required();

  // difficulty
  auto* difficulty = app.add_subcommand("difficulty", "select difficult tokens");
  std::optional<std::string> diffy_loss, diffy_stats;
  std::string diffy_criterion = "mean-loss", diffy_out;
  ParamFlags diffy_flags;
  difficulty->add_option("--loss", diffy_loss, "loss-record TSV");
  difficulty->add_option("--stats", diffy_stats, "stats report TSV");
  difficulty->add_option("--criterion", diffy_criterion, "freq | mean-loss | mean-std")
      ->check(CLI::IsMember({"freq", "mean-loss", "mean-std"}));
  difficulty->add_option("--out", diffy_out, "difficulty set file")->required();
  diffy_flags.add(difficulty, "mu", "--mu", "mean-loss threshold (default 5)");
  diffy_flags.add(difficulty, "rho", "--rho", "loss std threshold (default 10)");
  diffy_flags.add(difficulty, "eta", "--eta", "frequency threshold (default 5000)");

  // sample
  auto* sample = app.add_subcommand("sample", "sample monolingual sentences");
  std::string smp_algo, smp_mono, smp_out, smp_criterion = "mean-loss";
  std::string smp_ctx = "window", smp_sim = "match";
  std::optional<std::string> smp_bitext, smp_loss, smp_difficulty, smp_emb;
  ParamFlags smp_flags;
  sample->add_option("--algo", smp_algo, "random | diffsampling | ratio | context")
      ->required()
      ->check(CLI::IsMember({"random", "diffsampling", "ratio", "context"}));
  sample->add_option("--mono", smp_mono, "monolingual corpus")->required();
  sample->add_option("--bitext-target", smp_bitext, "target side of the bitext");
  sample->add_option("--loss", smp_loss, "loss records of the bitext target");
  sample->add_option("--difficulty", smp_difficulty, "precomputed difficulty set");
  sample->add_option("--criterion", smp_criterion, "freq | mean-loss | mean-std")
      ->check(CLI::IsMember({"freq", "mean-loss", "mean-std"}));
  sample->add_option("--ctx", smp_ctx, "window | subword | sentence")
      ->check(CLI::IsMember({"window", "subword", "sentence"}));
  sample->add_option("--sim", smp_sim, "match | emb")
      ->check(CLI::IsMember({"match", "emb"}));
  sample->add_option("--emb", smp_emb, "word2vec text embeddings");
  sample->add_option("--out", smp_out, "output prefix")->required();
  smp_flags.add(sample, "mu", "--mu", "mean-loss threshold (default 5)");
  smp_flags.add(sample, "rho", "--rho", "loss std threshold (default 10)");
  smp_flags.add(sample, "eta", "--eta", "frequency threshold (default 5000)");
  smp_flags.add(sample, "theta", "--theta", "occurrence loss threshold (default mu)");
  smp_flags.add(sample, "s", "--s", "similarity threshold (default 0.75)");
  smp_flags.add(sample, "w", "--w", "window half-width (default 4)");
  smp_flags.add(sample, "n", "--n", "sample size (default: bitext size)");

  // mix
  auto* mix = app.add_subcommand("mix", "mix real and synthetic bitext");
  std::string mix_rs, mix_rt, mix_ss, mix_st, mix_ratio = "1:1", mix_out;
  std::uint64_t mix_epoch = 0;
  mix->add_option("--real-src", mix_rs, "real source side")->required();
  mix->add_option("--real-tgt", mix_rt, "real target side")->required();
  mix->add_option("--syn-src", mix_ss, "synthetic source side")->required();
  mix->add_option("--syn-tgt", mix_st, "synthetic target side")->required();
  mix->add_option("--ratio", mix_ratio, "REAL:SYN (default 1:1)");
  mix->add_option("--epoch", mix_epoch, "epoch whose shuffle to emit (default 0)");
  mix->add_option("--out", mix_out, "output prefix (.src/.tgt)")->required();

  // config
  auto* config = app.add_subcommand("config", "print the effective configuration");
  std::optional<std::string> config_out;
  ParamFlags config_flags;
  config->add_option("--out", config_out, "write to a file instead of stdout");
  for (const char* key : {"mu", "rho", "eta", "s", "w", "n", "theta"}) {
    config_flags.add(config, key, std::string("--") + key, key);
  }
  config_flags.add(config, "lm_order", "--order", "n-gram order");
  config_flags.add(config, "lm_k", "--k", "add-k constant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*score) {
      const auto params = resolve_params(g, score_flags);
      const std::string target = score_corpus.value_or(score_train);
      auto train = load_corpus(score_train, params);
      bts_lm* raw_lm = nullptr;
      check(bts_lm_train(train.get(), params.lm_order, params.lm_k, &raw_lm));
      Lm lm(raw_lm);
      auto corpus = score_corpus ? load_corpus(target, params) : std::move(train);
      bts_records* raw = nullptr;
      check(bts_lm_score(lm.get(), corpus.get(), &raw));
      Records records(raw);
      check(bts_records_save(records.get(), score_out.c_str()));
      Manifest m("score");
      m.input("train", score_train);
      m.input("corpus", target);
      m.output("loss", score_out);
      finish_manifest(m, g, params, score_out + ".manifest.json");
    } else if (*stats) {
      const auto params = resolve_params(g, {});
      auto records = load_records(stats_loss);
      bts_stats* raw = nullptr;
      check(bts_stats_aggregate(records.get(), &raw));
      Stats table(raw);
      check(bts_stats_save_report(
          table.get(),
          stats_sort == "freq-asc" ? BTS_ORDER_FREQ_ASC : BTS_ORDER_MEAN_LOSS_DESC,
          stats_out.c_str()));
      Manifest m("stats");
      m.option("sort", stats_sort);
      m.input("loss", stats_loss);
      m.output("report", stats_out);
      finish_manifest(m, g, params, stats_out + ".manifest.json");
    } else if (*diff) {
      const auto params = resolve_params(g, {});
      bts_stats *raw_base = nullptr, *raw_re = nullptr;
      check(bts_stats_load_report(diff_base.c_str(), &raw_base));
      Stats base(raw_base);
      check(bts_stats_load_report(diff_retrained.c_str(), &raw_re));
      Stats retrained(raw_re);
      std::size_t shared = 0, miss_re = 0, miss_base = 0;
      double rho = 0.0;
      check(bts_stats_diff_save(base.get(), retrained.get(), diff_out.c_str(),
                                &shared, &miss_re, &miss_base, &rho));
      std::cerr << "shared tokens: " << shared << ", missing in retrained: "
                << miss_re << ", missing in base: " << miss_base
                << ", spearman(base mean, delta): " << rho << '\n';
      Manifest m("diff");
      m.input("base", diff_base);
      m.input("retrained", diff_retrained);
      m.output("diff", diff_out);
      finish_manifest(m, g, params, diff_out + ".manifest.json");
    } else if (*difficulty) {
      const auto params = resolve_params(g, diffy_flags);
      if (!diffy_loss == !diffy_stats) {
        throw UsageFailure{"difficulty: give exactly one of --loss or --stats"};
      }
      Stats table;
      bts_stats* raw = nullptr;
      if (diffy_loss) {
        auto records = load_records(*diffy_loss);
        check(bts_stats_aggregate(records.get(), &raw));
      } else {
        check(bts_stats_load_report(diffy_stats->c_str(), &raw));
      }
      table.reset(raw);
      bts_difficulty* raw_set = nullptr;
      check(bts_difficulty_select(table.get(), parse_criterion(diffy_criterion),
                                  &params, &raw_set));
      Difficulty set(raw_set);
      check(bts_difficulty_save(set.get(), diffy_out.c_str()));
      std::cerr << bts_difficulty_size(set.get()) << " difficult tokens\n";
      Manifest m("difficulty");
      m.option("criterion", diffy_criterion);
      m.input(diffy_loss ? "loss" : "stats", diffy_loss ? *diffy_loss : *diffy_stats);
      m.output("difficulty", diffy_out);
      finish_manifest(m, g, params, diffy_out + ".manifest.json");
    } else if (*sample) {
      const auto params = resolve_params(g, smp_flags);
      Manifest m("sample");
      m.option("algo", smp_algo);
      auto mono = load_corpus(smp_mono, params);
      m.input("mono", smp_mono);
      Corpus bitext;
      if (smp_bitext) {
        bitext = load_corpus(*smp_bitext, params);
        m.input("bitext_target", *smp_bitext);
      }
      std::uint64_t n = params.n;
      if (n == 0) {
        if (!bitext) {
          throw UsageFailure{"sample: --n is required without --bitext-target"};
        }
        n = bts_corpus_size(bitext.get());
      }
      Records records;
      if (smp_loss) {
        records = load_records(*smp_loss);
        m.input("loss", *smp_loss);
        if (bitext) check(bts_records_validate(records.get(), bitext.get()));
      }
      auto occurrences = [&] {
        if (!records) throw UsageFailure{"sample --algo " + smp_algo + " needs --loss"};
        bts_records* raw = nullptr;
        check(bts_records_difficult(records.get(), bts_params_theta(&params), &raw));
        return Records(raw);
      };

      bts_sample_set* raw_set = nullptr;
      if (smp_algo == "random") {
        check(bts_sample_random(mono.get(), n, params.seed, &raw_set));
      } else if (smp_algo == "diffsampling") {
        Difficulty set;
        bts_difficulty* raw = nullptr;
        if (smp_difficulty) {
          check(bts_difficulty_load(smp_difficulty->c_str(), &raw));
          m.input("difficulty", *smp_difficulty);
        } else {
          if (!records) {
            throw UsageFailure{"diffsampling needs --difficulty or --loss"};
          }
          bts_stats* raw_stats = nullptr;
          check(bts_stats_aggregate(records.get(), &raw_stats));
          Stats table(raw_stats);
          m.option("criterion", smp_criterion);
          check(bts_difficulty_select(table.get(), parse_criterion(smp_criterion),
                                      &params, &raw));
        }
        set.reset(raw);
        check(bts_sample_diff(set.get(), mono.get(), n, params.seed, &raw_set));
      } else if (smp_algo == "ratio") {
        auto occ = occurrences();
        check(bts_sample_ratio(occ.get(), mono.get(), n, params.seed, &raw_set));
      } else {
        if (!bitext) throw UsageFailure{"context sampling needs --bitext-target"};
        auto occ = occurrences();
        const bts_context_kind ctx = smp_ctx == "subword"    ? BTS_CONTEXT_SUBWORD
                                     : smp_ctx == "sentence" ? BTS_CONTEXT_SENTENCE
                                                             : BTS_CONTEXT_WINDOW;
        Embeddings emb;
        if (smp_sim == "emb") {
          if (!smp_emb) throw UsageFailure{"--sim emb needs --emb"};
          bts_embeddings* raw = nullptr;
          check(bts_embeddings_load(smp_emb->c_str(), &raw));
          emb.reset(raw);
          m.input("embeddings", *smp_emb);
        }
        m.option("ctx", smp_ctx);
        m.option("sim", smp_sim);
        check(bts_sample_context(occ.get(), bitext.get(), mono.get(), ctx,
                                 params.w,
                                 smp_sim == "emb" ? BTS_SIM_EMBEDDING : BTS_SIM_MATCH,
                                 emb.get(), params.s, n, params.seed, &raw_set));
      }
      SampleSet set(raw_set);
      warn_if_any();
      const std::string sentences = smp_out + ".txt";
      const std::string provenance = smp_out + ".prov.tsv";
      check(bts_sample_set_save(set.get(), mono.get(), sentences.c_str(),
                                provenance.c_str()));
      std::cerr << bts_sample_set_size(set.get()) << " of " << n
                << " sentences sampled\n";
      m.option("n", std::to_string(n));
      m.output("sentences", sentences);
      m.output("provenance", provenance);
      finish_manifest(m, g, params, smp_out + ".manifest.json");
    } else if (*mix) {
      const auto params = resolve_params(g, {});
      std::uint64_t real_part = 0, syn_part = 0;
      if (bts_parse_ratio(mix_ratio.c_str(), &real_part, &syn_part) != BTS_OK) {
        throw UsageFailure{bts_last_error()};
      }
      const std::string out_src = mix_out + ".src";
      const std::string out_tgt = mix_out + ".tgt";
      bts_mix_summary summary{};
      check(bts_mix_files(mix_rs.c_str(), mix_rt.c_str(), mix_ss.c_str(),
                          mix_st.c_str(), real_part, syn_part, params.seed,
                          mix_epoch, out_src.c_str(), out_tgt.c_str(), &summary));
      warn_if_any();
      std::cerr << summary.real_count << " real + " << summary.synthetic_count
                << " synthetic pairs\n";
      Manifest m("mix");
      m.option("ratio", mix_ratio);
      m.option("epoch", std::to_string(mix_epoch));
      m.input("real_src", mix_rs);
      m.input("real_tgt", mix_rt);
      m.input("syn_src", mix_ss);
      m.input("syn_tgt", mix_st);
      m.output("src", out_src);
      m.output("tgt", out_tgt);
      finish_manifest(m, g, params, mix_out + ".manifest.json");
    } else if (*config) {
      const auto params = resolve_params(g, config_flags);
      const std::string text = dump_params(params);
      if (config_out) {
        std::ofstream out(*config_out, std::ios::binary | std::ios::trunc);
        out << text;
        if (!out) throw ApiFailure{BTS_ERR_IO, "cannot write '" + *config_out + "'"};
        Manifest m("config");
        m.output("config", *config_out);
        finish_manifest(m, g, params, *config_out + ".manifest.json");
      } else {
        std::cout << text;
        if (g.manifest_path) {
          Manifest m("config");
          finish_manifest(m, g, params, *g.manifest_path);
        }
      }
    }
  } catch (const UsageFailure& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitUsage;
  } catch (const ApiFailure& e) {
    std::cerr << "error: " << e.message << '\n';
    switch (e.status) {
      case BTS_ERR_USAGE:
        return kExitUsage;
      case BTS_ERR_DATA:
      case BTS_ERR_IO:
      case BTS_ERR_NOT_FOUND:
        return kExitData;
      default:
        return kExitInternal;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitOk;
}
