#include "btsampler/btsampler.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <new>
#include <sstream>
#include <string>
#include <vector>

#include "btsampler/config.hpp"
#include "btsampler/context.hpp"
#include "btsampler/corpus.hpp"
#include "btsampler/difficulty.hpp"
#include "btsampler/error.hpp"
#include "btsampler/loss_stats.hpp"
#include "btsampler/mix.hpp"
#include "btsampler/ngram_oracle.hpp"
#include "btsampler/random.hpp"
#include "btsampler/sampler.hpp"

namespace bt = btsampler;

struct bts_corpus {
  bt::Corpus value;
};
struct bts_records {
  std::vector<bt::TokenLossRecord> value;
};
struct bts_lm {
  bt::NGramLM value;
};
struct bts_stats {
  bt::StatsTable value;
};
struct bts_difficulty {
  bt::DifficultySet value;
};
struct bts_embeddings {
  bt::EmbeddingTable value;
};
struct bts_sample_set {
  bt::SampleSet value;
};

namespace {

thread_local std::string g_last_error;
thread_local std::string g_last_warning;

bts_status fail(bts_status status, const char* what) {
  g_last_error = what;
  return status;
}

// Runs `body`, translating exceptions into status codes.
template <class F>
bts_status guarded(F&& body) noexcept {
  g_last_error.clear();
  g_last_warning.clear();
  try {
    body();
    return BTS_OK;
  } catch (const bt::UsageError& e) {
    return fail(BTS_ERR_USAGE, e.what());
  } catch (const bt::DataError& e) {
    return fail(BTS_ERR_DATA, e.what());
  } catch (const bt::IoError& e) {
    return fail(BTS_ERR_IO, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BTS_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BTS_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BTS_ERR_INTERNAL, "unknown error");
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw bt::UsageError(what);
}

template <class Handle, class T>
void emit(Handle** out, T&& value) {
  *out = new Handle{std::forward<T>(value)};
}

bt::SubwordConvention convention_of(const char* marker) {
  bt::SubwordConvention c;
  if (marker) c.marker = marker;
  c.validate();
  return c;
}

bt::RunConfig to_config(const bts_params& p) {
  bt::RunConfig c;
  c.sampling.mu = p.mu;
  c.sampling.rho = p.rho;
  c.sampling.eta = p.eta;
  c.sampling.s = p.s;
  c.sampling.w = p.w;
  if (p.n) c.sampling.n = p.n;
  c.sampling.seed = p.seed;
  if (p.has_theta) c.sampling.theta = p.theta;
  c.lm_order = p.lm_order;
  c.lm_k = p.lm_k;
  c.marker.assign(p.marker, strnlen(p.marker, BTS_MARKER_CAPACITY));
  return c;
}

void from_config(const bt::RunConfig& c, bts_params& p) {
  if (c.marker.size() >= BTS_MARKER_CAPACITY) {
    throw bt::UsageError("marker longer than " +
                         std::to_string(BTS_MARKER_CAPACITY - 1) + " bytes");
  }
  p.mu = c.sampling.mu;
  p.rho = c.sampling.rho;
  p.eta = c.sampling.eta;
  p.s = c.sampling.s;
  p.w = c.sampling.w;
  p.n = c.sampling.n.value_or(0);
  p.seed = c.sampling.seed;
  p.has_theta = c.sampling.theta.has_value();
  p.theta = c.sampling.theta.value_or(0.0);
  p.lm_order = c.lm_order;
  p.lm_k = c.lm_k;
  std::memset(p.marker, 0, sizeof p.marker);
  std::memcpy(p.marker, c.marker.data(), c.marker.size());
}

std::vector<bt::DifficultOccurrence> occurrences_of(const bts_records* r) {
  std::vector<bt::DifficultOccurrence> out;
  out.reserve(r->value.size());
  for (const auto& rec : r->value) {
    out.push_back({rec.token, rec.sentence_id, rec.position, rec.loss});
  }
  return out;
}

std::size_t to_size(uint64_t n) {
  if (n > std::numeric_limits<std::size_t>::max()) {
    throw bt::UsageError("value exceeds size_t");
  }
  return static_cast<std::size_t>(n);
}

void publish_warning(const bt::SampleSet& set) {
  if (set.exhausted) g_last_warning = set.warning;
}

}  // namespace

extern "C" {

const char* bts_version(void) { return BTS_VERSION_STRING; }

const char* bts_generator_name(void) { return bt::kGeneratorName.data(); }

const char* bts_last_error(void) { return g_last_error.c_str(); }

const char* bts_last_warning(void) { return g_last_warning.c_str(); }

bts_status bts_params_init(bts_params* params) {
  return guarded([&] {
    require(params, "params is NULL");
    from_config(bt::RunConfig{}, *params);
  });
}

bts_status bts_params_load_file(bts_params* params, const char* path) {
  return guarded([&] {
    require(params && path, "NULL argument");
    auto c = to_config(*params);
    bt::apply_config_file(path, c);
    from_config(c, *params);
  });
}

bts_status bts_params_set(bts_params* params, const char* key,
                          const char* value) {
  return guarded([&] {
    require(params && key && value, "NULL argument");
    auto c = to_config(*params);
    c.set(key, value);
    from_config(c, *params);
  });
}

bts_status bts_params_dump(const bts_params* params, char* buf,
                           size_t capacity, size_t* needed) {
  return guarded([&] {
    require(params && needed, "NULL argument");
    require(buf || capacity == 0, "buffer is NULL");
    std::string text;
    for (const auto& [k, v] : to_config(*params).entries()) {
      text += k + " = " + v + "\n";
    }
    *needed = text.size();
    if (capacity > text.size()) {
      std::memcpy(buf, text.c_str(), text.size() + 1);
    } else if (capacity > 0) {
      buf[0] = '\0';
    }
  });
}

double bts_params_theta(const bts_params* params) {
  if (!params) return std::numeric_limits<double>::quiet_NaN();
  return params->has_theta ? params->theta : params->mu;
}

bts_status bts_corpus_load(const char* path, const char* marker,
                           bts_corpus** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    emit(out, bt::Corpus::load(path, convention_of(marker)));
  });
}

bts_status bts_corpus_parse(const char* text, size_t length, const char* marker,
                            bts_corpus** out) {
  return guarded([&] {
    require((text || length == 0) && out, "NULL argument");
    emit(out, bt::Corpus::parse(std::string_view(text ? text : "", length), {},
                                convention_of(marker)));
  });
}

void bts_corpus_free(bts_corpus* corpus) { delete corpus; }

size_t bts_corpus_size(const bts_corpus* corpus) {
  return corpus ? corpus->value.size() : 0;
}

size_t bts_corpus_token_count(const bts_corpus* corpus) {
  return corpus ? corpus->value.token_count() : 0;
}

bts_status bts_corpus_sentence_length(const bts_corpus* corpus, size_t id,
                                      size_t* length) {
  return guarded([&] {
    require(corpus && length, "NULL argument");
    require(id < corpus->value.size(), "sentence id out of range");
    *length = corpus->value.at(id).size();
  });
}

bts_status bts_corpus_token(const bts_corpus* corpus, size_t id,
                            size_t position, const char** token) {
  return guarded([&] {
    require(corpus && token, "NULL argument");
    require(id < corpus->value.size(), "sentence id out of range");
    const auto& s = corpus->value.at(id);
    require(position < s.size(), "position out of range");
    *token = s.tokens[position].c_str();
  });
}

bts_status bts_corpus_save(const bts_corpus* corpus, const char* path) {
  return guarded([&] {
    require(corpus && path, "NULL argument");
    corpus->value.save(path);
  });
}

bts_status bts_corpus_word_spans(const bts_corpus* corpus, size_t id,
                                 size_t* firsts, size_t* lasts, size_t capacity,
                                 size_t* count) {
  return guarded([&] {
    require(corpus && count, "NULL argument");
    require((firsts && lasts) || capacity == 0, "span buffers are NULL");
    require(id < corpus->value.size(), "sentence id out of range");
    const auto spans =
        bt::word_spans(corpus->value.at(id), corpus->value.convention());
    *count = spans.size();
    for (size_t i = 0; i < spans.size() && i < capacity; ++i) {
      firsts[i] = spans[i].first;
      lasts[i] = spans[i].last;
    }
  });
}

bts_status bts_records_load(const char* path, bts_records** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    emit(out, bt::read_loss_records(std::filesystem::path(path)));
  });
}

bts_status bts_records_save(const bts_records* records, const char* path) {
  return guarded([&] {
    require(records && path, "NULL argument");
    bt::write_loss_records(std::filesystem::path(path), records->value);
  });
}

void bts_records_free(bts_records* records) { delete records; }

size_t bts_records_count(const bts_records* records) {
  return records ? records->value.size() : 0;
}

bts_status bts_records_get(const bts_records* records, size_t index,
                           size_t* sentence_id, size_t* position,
                           const char** token, double* loss) {
  return guarded([&] {
    require(records, "records is NULL");
    require(index < records->value.size(), "record index out of range");
    const auto& r = records->value[index];
    if (sentence_id) *sentence_id = r.sentence_id;
    if (position) *position = r.position;
    if (token) *token = r.token.c_str();
    if (loss) *loss = r.loss;
  });
}

bts_status bts_records_validate(const bts_records* records,
                                const bts_corpus* corpus) {
  return guarded([&] {
    require(records, "records is NULL");
    bt::validate_records(records->value, corpus ? &corpus->value : nullptr);
  });
}

bts_status bts_records_difficult(const bts_records* records, double theta,
                                 bts_records** out) {
  return guarded([&] {
    require(records && out, "NULL argument");
    std::vector<bt::TokenLossRecord> kept;
    for (const auto& o : bt::difficult_occurrences(records->value, theta)) {
      kept.push_back({o.sentence_id, o.position, o.token, o.loss});
    }
    emit(out, std::move(kept));
  });
}

bts_status bts_lm_train(const bts_corpus* corpus, uint64_t order, double k,
                        bts_lm** out) {
  return guarded([&] {
    require(corpus && out, "NULL argument");
    bt::LmOptions opts;
    opts.order = to_size(order);
    opts.k = k;
    emit(out, bt::NGramLM::train(corpus->value, opts));
  });
}

void bts_lm_free(bts_lm* lm) { delete lm; }

bts_status bts_lm_probability(const bts_lm* lm, const char* const* history,
                              size_t history_length, const char* token,
                              double* probability) {
  return guarded([&] {
    require(lm && token && probability, "NULL argument");
    require(history || history_length == 0, "history is NULL");
    std::vector<std::string> h;
    for (size_t i = 0; i < history_length; ++i) {
      require(history[i], "NULL history token");
      h.emplace_back(history[i]);
    }
    *probability = lm->value.probability(h, token);
  });
}

bts_status bts_lm_score(const bts_lm* lm, const bts_corpus* corpus,
                        bts_records** out) {
  return guarded([&] {
    require(lm && corpus && out, "NULL argument");
    emit(out, lm->value.score(corpus->value));
  });
}

bts_status bts_stats_aggregate(const bts_records* records, bts_stats** out) {
  return guarded([&] {
    require(records && out, "NULL argument");
    emit(out, bt::aggregate(records->value));
  });
}

bts_status bts_stats_load_report(const char* path, bts_stats** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    emit(out, bt::read_report(std::filesystem::path(path)));
  });
}

bts_status bts_stats_save_report(const bts_stats* stats, bts_report_order order,
                                 const char* path) {
  return guarded([&] {
    require(stats && path, "NULL argument");
    require(order == BTS_ORDER_MEAN_LOSS_DESC || order == BTS_ORDER_FREQ_ASC,
            "invalid report order");
    const auto rows = bt::loss_report(stats->value,
                                      order == BTS_ORDER_FREQ_ASC
                                          ? bt::ReportOrder::kFreqAsc
                                          : bt::ReportOrder::kMeanLossDesc);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw bt::IoError(std::string("cannot open '") + path + "'");
    bt::write_report(out, rows);
    if (!out) throw bt::IoError(std::string("write failed for '") + path + "'");
  });
}

void bts_stats_free(bts_stats* stats) { delete stats; }

size_t bts_stats_size(const bts_stats* stats) {
  return stats ? stats->value.size() : 0;
}

bts_status bts_stats_lookup(const bts_stats* stats, const char* token,
                            uint64_t* freq, double* mean_loss,
                            double* std_loss) {
  g_last_error.clear();
  if (!stats || !token) return fail(BTS_ERR_USAGE, "NULL argument");
  const bt::TokenStats* st = stats->value.find(token);
  if (!st) return fail(BTS_ERR_NOT_FOUND, "token not in stats table");
  if (freq) *freq = st->freq;
  if (mean_loss) *mean_loss = st->mean_loss;
  if (std_loss) *std_loss = st->std_loss;
  return BTS_OK;
}

bts_status bts_stats_diff_save(const bts_stats* base, const bts_stats* retrained,
                               const char* path, size_t* shared,
                               size_t* missing_in_retrained,
                               size_t* missing_in_base, double* spearman) {
  return guarded([&] {
    require(base && retrained && path, "NULL argument");
    const auto diff = bt::diff_stats(base->value, retrained->value);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw bt::IoError(std::string("cannot open '") + path + "'");
    bt::write_diff(out, base->value, retrained->value, diff);
    if (!out) throw bt::IoError(std::string("write failed for '") + path + "'");
    if (shared) *shared = diff.delta.size();
    if (missing_in_retrained) {
      *missing_in_retrained = diff.missing_in_retrained.size();
    }
    if (missing_in_base) *missing_in_base = diff.missing_in_base.size();
    if (spearman) {
      std::vector<double> x, y;
      for (const auto& [tok, d] : diff.delta) {
        x.push_back(base->value.find(tok)->mean_loss);
        y.push_back(d);
      }
      *spearman = x.size() < 2 ? std::numeric_limits<double>::quiet_NaN()
                               : bt::spearman(x, y);
    }
  });
}

bts_status bts_difficulty_select(const bts_stats* stats, bts_criterion criterion,
                                 const bts_params* params, bts_difficulty** out) {
  return guarded([&] {
    require(stats && params && out, "NULL argument");
    bt::Criterion c;
    switch (criterion) {
      case BTS_CRITERION_FREQ:
        c = bt::Criterion::kFrequency;
        break;
      case BTS_CRITERION_MEAN_LOSS:
        c = bt::Criterion::kMeanLoss;
        break;
      case BTS_CRITERION_MEAN_AND_STD:
        c = bt::Criterion::kMeanAndStd;
        break;
      default:
        throw bt::UsageError("invalid criterion");
    }
    emit(out, bt::select_difficult(stats->value, c, to_config(*params).sampling));
  });
}

bts_status bts_difficulty_load(const char* path, bts_difficulty** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    emit(out, bt::read_difficulty(std::filesystem::path(path)));
  });
}

bts_status bts_difficulty_save(const bts_difficulty* set, const char* path) {
  return guarded([&] {
    require(set && path, "NULL argument");
    bt::write_difficulty(std::filesystem::path(path), set->value);
  });
}

void bts_difficulty_free(bts_difficulty* set) { delete set; }

size_t bts_difficulty_size(const bts_difficulty* set) {
  return set ? set->value.size() : 0;
}

int bts_difficulty_contains(const bts_difficulty* set, const char* token) {
  return set && token && set->value.contains(token) ? 1 : 0;
}

bts_status bts_embeddings_load(const char* path, bts_embeddings** out) {
  return guarded([&] {
    require(path && out, "NULL argument");
    emit(out, bt::EmbeddingTable::load(path));
  });
}

void bts_embeddings_free(bts_embeddings* table) { delete table; }

size_t bts_embeddings_size(const bts_embeddings* table) {
  return table ? table->value.size() : 0;
}

size_t bts_embeddings_dim(const bts_embeddings* table) {
  return table ? table->value.dim() : 0;
}

bts_status bts_sample_random(const bts_corpus* mono, uint64_t n, uint64_t seed,
                             bts_sample_set** out) {
  return guarded([&] {
    require(mono && out, "NULL argument");
    auto set = bt::random_sampling(mono->value, to_size(n), seed);
    publish_warning(set);
    emit(out, std::move(set));
  });
}

bts_status bts_sample_diff(const bts_difficulty* difficult,
                           const bts_corpus* mono, uint64_t n, uint64_t seed,
                           bts_sample_set** out) {
  return guarded([&] {
    require(difficult && mono && out, "NULL argument");
    auto set = bt::diff_sampling(difficult->value, mono->value, to_size(n), seed);
    publish_warning(set);
    emit(out, std::move(set));
  });
}

bts_status bts_sample_ratio(const bts_records* occurrences,
                            const bts_corpus* mono, uint64_t n, uint64_t seed,
                            bts_sample_set** out) {
  return guarded([&] {
    require(occurrences && mono && out, "NULL argument");
    const auto occ = occurrences_of(occurrences);
    auto set = bt::ratio_sampling(occ, mono->value, to_size(n), seed);
    publish_warning(set);
    emit(out, std::move(set));
  });
}

bts_status bts_sample_context(const bts_records* occurrences,
                              const bts_corpus* bitext_target,
                              const bts_corpus* mono, bts_context_kind context,
                              uint64_t w, bts_similarity_kind similarity,
                              const bts_embeddings* embeddings, double s,
                              uint64_t n, uint64_t seed, bts_sample_set** out) {
  return guarded([&] {
    require(occurrences && bitext_target && mono && out, "NULL argument");
    bt::ContextSpec ctx;
    switch (context) {
      case BTS_CONTEXT_WINDOW:
        ctx.kind = bt::ContextKind::kWindow;
        break;
      case BTS_CONTEXT_SUBWORD:
        ctx.kind = bt::ContextKind::kSubword;
        break;
      case BTS_CONTEXT_SENTENCE:
        ctx.kind = bt::ContextKind::kSentence;
        break;
      default:
        throw bt::UsageError("invalid context kind");
    }
    ctx.w = to_size(w);
    ctx.convention = bitext_target->value.convention();
    bt::SimilaritySpec sim;
    if (similarity == BTS_SIM_EMBEDDING) {
      require(embeddings, "embedding similarity requires an embedding table");
      sim.kind = bt::SimilarityKind::kEmbedding;
      sim.embeddings = &embeddings->value;
    } else if (similarity == BTS_SIM_MATCH) {
      sim.kind = bt::SimilarityKind::kMatch;
    } else {
      throw bt::UsageError("invalid similarity kind");
    }
    const auto occ = occurrences_of(occurrences);
    auto set = bt::context_sampling(occ, bitext_target->value, mono->value, ctx,
                                    sim, s, to_size(n), seed);
    publish_warning(set);
    emit(out, std::move(set));
  });
}

void bts_sample_set_free(bts_sample_set* set) { delete set; }

size_t bts_sample_set_size(const bts_sample_set* set) {
  return set ? set->value.size() : 0;
}

bts_status bts_sample_set_id(const bts_sample_set* set, size_t index,
                             size_t* sentence_id) {
  return guarded([&] {
    require(set && sentence_id, "NULL argument");
    require(index < set->value.size(), "sample index out of range");
    *sentence_id = set->value.sentence_ids[index];
  });
}

int bts_sample_set_exhausted(const bts_sample_set* set) {
  return set && set->value.exhausted ? 1 : 0;
}

const char* bts_sample_set_warning(const bts_sample_set* set) {
  return set ? set->value.warning.c_str() : "";
}

bts_status bts_sample_set_save(const bts_sample_set* set, const bts_corpus* mono,
                               const char* sentences_path,
                               const char* provenance_path) {
  return guarded([&] {
    require(set && mono && sentences_path && provenance_path, "NULL argument");
    bt::write_sample_set(sentences_path, provenance_path, set->value,
                         mono->value);
  });
}

bts_status bts_parse_ratio(const char* text, uint64_t* real_part,
                           uint64_t* syn_part) {
  return guarded([&] {
    require(text && real_part && syn_part, "NULL argument");
    const auto r = bt::MixRatio::parse(text);
    *real_part = r.real_part;
    *syn_part = r.syn_part;
  });
}

bts_status bts_mix_files(const char* real_source, const char* real_target,
                         const char* synthetic_source,
                         const char* synthetic_target, uint64_t real_part,
                         uint64_t syn_part, uint64_t seed, uint64_t epoch,
                         const char* out_source, const char* out_target,
                         bts_mix_summary* summary) {
  return guarded([&] {
    require(real_source && real_target && synthetic_source &&
                synthetic_target && out_source && out_target,
            "NULL argument");
    const auto real = bt::Bitext::load(real_source, real_target);
    const auto syn = bt::Bitext::load(synthetic_source, synthetic_target);
    const auto result = bt::mix(real, syn, {real_part, syn_part}, seed, epoch);
    bt::write_mix(out_source, out_target, result, real, syn);
    if (summary) {
      summary->real_count = result.real_count;
      summary->synthetic_required = result.synthetic_required;
      summary->synthetic_count = result.synthetic_count;
      summary->short_supply = result.short_supply ? 1 : 0;
    }
    if (result.short_supply) g_last_warning = result.warning;
  });
}

}  // extern "C"
