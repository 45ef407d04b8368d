#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "btsampler/error.hpp"
#include "btsampler/random.hpp"
#include "btsampler/sampler.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace btsampler;

namespace {

Corpus corpus(const std::string& text) { return Corpus::parse(text); }

bool contains_any(const Sentence& s, const DifficultySet& d) {
  return std::any_of(s.tokens.begin(), s.tokens.end(),
                     [&](const auto& t) { return d.contains(t); });
}

bool no_duplicates(const SampleSet& set) {
  std::set<std::size_t> seen(set.sentence_ids.begin(), set.sentence_ids.end());
  return seen.size() == set.sentence_ids.size();
}

DifficultySet dset(std::initializer_list<std::string> toks) {
  DifficultySet d;
  for (const auto& t : toks) d.tokens.insert(t);
  return d;
}

// The ratio loop transcribed directly: visit every sentence in candidate
// order; accept when some token is under quota; credit every contained
// quota token by its occurrence count.
std::vector<std::size_t> simulate_ratio(const std::vector<DifficultOccurrence>& occ,
                                        const Corpus& mono, std::size_t n,
                                        std::uint64_t seed,
                                        std::map<std::string, std::size_t>* counts) {
  std::map<std::string, double> quota;
  for (const auto& o : occ) quota[o.token] += 1.0;
  for (auto& [t, q] : quota) q = static_cast<double>(n) * q / static_cast<double>(occ.size());
  std::map<std::string, std::size_t> have;
  const auto key = stream_key(seed, Stream::kCandidates);
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  for (std::size_t id = 0; id < mono.size(); ++id) order.emplace_back(priority(key, id), id);
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> out;
  for (const auto& [p, id] : order) {
    if (out.size() == n) break;
    bool accept = false;
    for (const auto& y : mono[id].tokens) {
      if (quota.count(y) && static_cast<double>(have[y]) < quota[y]) accept = true;
    }
    if (!accept) continue;
    out.push_back(id);
    for (const auto& y : mono[id].tokens) {
      if (quota.count(y)) ++have[y];
    }
  }
  if (counts) *counts = have;
  return out;
}

std::vector<DifficultOccurrence> occurrences(
    std::initializer_list<std::pair<std::string, int>> per_token) {
  std::vector<DifficultOccurrence> out;
  std::size_t sid = 0;
  for (const auto& [tok, k] : per_token) {
    for (int i = 0; i < k; ++i) out.push_back({tok, sid++, 0, 9.0});
  }
  return out;
}

// 20 sentences with y1, 20 with y2, 20 with neither; one difficult token
// per sentence.
Corpus one_per_sentence() {
  std::string text;
  for (int i = 0; i < 20; ++i) {
    text += "a y1 b" + std::to_string(i) + "\n";
    text += "c" + std::to_string(i) + " y2\n";
    text += "f" + std::to_string(i) + " g\n";
  }
  return corpus(text);
}

std::size_t count_with(const SampleSet& s, const Corpus& c, const std::string& tok) {
  std::size_t n = 0;
  for (auto id : s.sentence_ids) {
    const auto& t = c[id].tokens;
    n += std::find(t.begin(), t.end(), tok) != t.end();
  }
  return n;
}

}  // namespace

TEST_CASE("draw order primitives") {
  std::vector<std::size_t> ids{4, 9, 1, 7, 3};
  const auto key = stream_key(42, Stream::kCandidates);
  auto full = draw_order(ids, key);
  CHECK(std::is_permutation(full.begin(), full.end(), ids.begin()));
  auto first = draw_first(ids, key, 3);
  CHECK(first == std::vector<std::size_t>(full.begin(), full.begin() + 3));
  CHECK(draw_first(ids, key, 99) == full);
  CHECK(mix64(0) == 0xe220a8397b1dcdafULL);  // SplitMix64 first output, seed 0
}

TEST_CASE("random_sampling") {
  auto m = corpus("a\nb\nc\n");
  auto s = random_sampling(m, 3, 1);
  auto sorted = s.sentence_ids;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == std::vector<std::size_t>{0, 1, 2});
  CHECK_FALSE(s.exhausted);
  CHECK(random_sampling(m, 3, 1) == s);
  auto over = random_sampling(m, 10, 1);
  CHECK(over.size() == 3);
  CHECK(over.exhausted);
  CHECK_THROWS_AS(random_sampling(Corpus{}, 1, 0), UsageError);
  CHECK_THROWS_AS(random_sampling(m, 0, 0), UsageError);
}

TEST_CASE("random_sampling is uniform over 10k seeds") {
  auto m = corpus("a\nb\n");
  int first = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    first += random_sampling(m, 1, seed).sentence_ids[0] == 0;
  }
  // binomial(10000, 0.5): sd = 50
  CHECK(std::abs(first - 5000) <= 150);
}

TEST_CASE("diff_sampling examples") {
  auto m = corpus("d x\ny z\n");
  auto s = diff_sampling(dset({"d"}), m, 1, 3);
  CHECK(s.sentence_ids == std::vector<std::size_t>{0});
  CHECK(s.provenance[0].trigger_token == "d");
  auto ex = diff_sampling(dset({"d"}), m, 2, 3);
  CHECK(ex.sentence_ids == std::vector<std::size_t>{0});
  CHECK(ex.exhausted);
  CHECK_FALSE(ex.warning.empty());
  CHECK_THROWS_AS(diff_sampling(DifficultySet{}, m, 1, 0), UsageError);
}

TEST_CASE("diff_sampling equals the rejection-sampling reference") {
  std::mt19937_64 rng(200);
  for (int round = 0; round < 60; ++round) {
    auto m = bts_test::uniform_corpus(200, 6, 60, rng);
    std::vector<std::string> hard;
    for (int k = 0; k < 1 + static_cast<int>(rng() % 5); ++k) {
      hard.push_back("t" + std::to_string(rng() % 70));
    }
    DifficultySet d;
    d.tokens.insert(hard.begin(), hard.end());
    const std::size_t n = 1 + rng() % 80;
    const std::uint64_t seed = rng();
    auto got = diff_sampling(d, m, n, seed);
    CHECK(got.sentence_ids == bts_test::rejection_diff_sampling(hard, m, n, seed));
    CHECK(no_duplicates(got));
    for (std::size_t k = 0; k < got.size(); ++k) {
      CHECK(contains_any(m[got.sentence_ids[k]], d));
      CHECK(d.contains(got.provenance[k].trigger_token));
    }
  }
}

TEST_CASE("quotas follow the occurrence ratio") {
  auto occ = occurrences({{"y1", 2}, {"y2", 4}});
  auto q = compute_quotas(occ, 6);
  CHECK(q.quota.at("y1") == 2.0);
  CHECK(q.quota.at("y2") == 4.0);
  auto q5 = compute_quotas(occ, 5);
  CHECK(q5.quota.at("y1") == doctest::Approx(5.0 / 3.0));
  CHECK(q5.quota.at("y2") == doctest::Approx(10.0 / 3.0));
  CHECK(q5.quota.at("y1") + q5.quota.at("y2") == doctest::Approx(5.0));
  CHECK_THROWS_AS(compute_quotas({}, 5), UsageError);
}

TEST_CASE("ratio_sampling reproduces the 2:4 example") {
  const auto m = one_per_sentence();
  const auto occ = occurrences({{"y1", 2}, {"y2", 4}});
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    QuotaTable final;
    auto s = ratio_sampling(occ, m, 6, seed, &final);
    CHECK(s.size() == 6);
    CHECK(count_with(s, m, "y1") == 2);
    CHECK(count_with(s, m, "y2") == 4);
    CHECK(final.count.at("y1") == 2);
    CHECK(final.count.at("y2") == 4);
    CHECK_FALSE(s.exhausted);
  }
}

TEST_CASE("ratio_sampling with fractional quotas") {
  const auto m = one_per_sentence();
  const auto occ = occurrences({{"y1", 2}, {"y2", 4}});
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    auto s = ratio_sampling(occ, m, 5, seed);
    std::map<std::string, std::size_t> sim_counts;
    CHECK(s.sentence_ids == simulate_ratio(occ, m, 5, seed, &sim_counts));
    CHECK(s.size() == 5);
    CHECK(count_with(s, m, "y1") <= 2);  // ceil(5/3)
    CHECK(count_with(s, m, "y2") <= 4);  // ceil(10/3)
  }
}

TEST_CASE("ratio_sampling matches the transcribed loop on random corpora") {
  std::mt19937_64 rng(31);
  for (int round = 0; round < 60; ++round) {
    auto m = bts_test::uniform_corpus(150, 5, 40, rng);
    std::vector<DifficultOccurrence> occ;
    const int kinds = 1 + static_cast<int>(rng() % 4);
    for (int k = 0; k < kinds; ++k) {
      const std::string tok = "t" + std::to_string(rng() % 40);
      for (int c = 0; c < 1 + static_cast<int>(rng() % 5); ++c) {
        occ.push_back({tok, 0, 0, 9.0});
      }
    }
    const std::size_t n = 1 + rng() % 40;
    const std::uint64_t seed = rng();
    auto got = ratio_sampling(occ, m, n, seed);
    CHECK(got.sentence_ids == simulate_ratio(occ, m, n, seed, nullptr));
    CHECK(no_duplicates(got));
    for (const auto& p : got.provenance) {
      CHECK(std::find(p.credited.begin(), p.credited.end(), p.trigger_token) !=
            p.credited.end());
    }
  }
}

TEST_CASE("ratio_sampling credits co-occurring tokens") {
  auto m = corpus("y1 y2 y2\ny1 x\ny2 x\n");
  const auto occ = occurrences({{"y1", 1}, {"y2", 1}});
  QuotaTable final;
  auto s = ratio_sampling(occ, m, 2, 0, &final);
  std::size_t y2_credit = 0;
  for (auto id : s.sentence_ids) {
    for (const auto& t : m[id].tokens) y2_credit += t == "y2";
  }
  CHECK(final.count.at("y2") == y2_credit);
}

TEST_CASE("context_sampling with exact match") {
  // difficult "R" in a 4+4 window
  auto bitext = corpus("p q r s R t u v w\n");
  std::vector<DifficultOccurrence> occ{{"R", 0, 4, 9.0}};
  auto mono = corpus(
      "x p q r s R t u v w y\n"   // identical window
      "p q r s R t u v z\n"       // 7 of 8
      "p q r z R z u v w\n"       // 6 of 8 = 0.75
      "a b c\n");
  ContextSpec ctx;
  SimilaritySpec sim;
  auto s = context_sampling(occ, bitext, mono, ctx, sim, 0.75, 10, 1);
  std::set<std::size_t> got(s.sentence_ids.begin(), s.sentence_ids.end());
  CHECK(got == std::set<std::size_t>{0, 1});
  CHECK(s.exhausted);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const auto& p = s.provenance[k];
    CHECK(p.trigger_token == "R");
    CHECK(*p.matched_sentence_id == 0);
    CHECK(*p.matched_position == 4);
    CHECK(*p.similarity > 0.75);
    CHECK(*p.similarity == (s.sentence_ids[k] == 0 ? 1.0 : 0.875));
  }
}

TEST_CASE("context_sampling strict threshold at 0.75 with w=2") {
  auto bitext = corpus("a b R c d\n");
  std::vector<DifficultOccurrence> occ{{"R", 0, 2, 9.0}};
  auto mono = corpus("a b R c d\na x R c d\n");
  ContextSpec ctx;
  ctx.w = 2;
  auto s = context_sampling(occ, bitext, mono, ctx, {}, 0.75, 5, 0);
  CHECK(s.sentence_ids == std::vector<std::size_t>{0});
}

TEST_CASE("context_sampling flags truncated match windows") {
  auto bitext = corpus("l1 l2 R r1 r2\n");
  std::vector<DifficultOccurrence> occ{{"R", 0, 2, 9.0}};
  auto mono = corpus("R r1 r2 more\n");
  ContextSpec ctx;
  ctx.w = 2;
  auto s = context_sampling(occ, bitext, mono, ctx, {}, 0.75, 5, 0);
  REQUIRE(s.size() == 1);
  CHECK(s.provenance[0].truncated);
  CHECK(*s.provenance[0].similarity == 1.0);
}

TEST_CASE("context_sampling with subword context") {
  auto bitext = corpus("He attended Stan@@ ford University\n");
  std::vector<DifficultOccurrence> occ{{"Stan@@", 0, 2, 9.0}};
  auto mono = corpus(
      "near Stan@@ ford University\n"
      "Stan@@ ley Cup\n"
      "a Stan@@ ford Law School\n");
  ContextSpec ctx;
  ctx.kind = ContextKind::kSubword;
  auto s = context_sampling(occ, bitext, mono, ctx, {}, 0.75, 5, 3);
  std::set<std::size_t> got(s.sentence_ids.begin(), s.sentence_ids.end());
  CHECK(got == std::set<std::size_t>{0, 2});
}

TEST_CASE("context_sampling with embeddings separates domains") {
  auto bitext = corpus(
      "Buddy Holly was part of the first group inducted into the Rock and "
      "Roll Hall of Fame on its formation\n");
  std::vector<DifficultOccurrence> occ{{"Rock", 0, 11, 8.0}};
  auto mono = corpus(
      "a 2008 Rock and Roll Hall of Fame inductee\n"
      "the Rock and Roll Hall of Famers gave birth to music\n"
      "members of the Rock and Roll Hall of Fame Foundation\n"
      "the Rock formation of granite and basalt layers\n"
      "a layer of sedimentary Rock with basalt and granite\n"
      "erosion of the Rock cliff exposed stone\n");

  std::map<std::string, std::vector<double>> raw;
  for (const char* t : {"Roll", "Hall", "Fame", "Famers", "Foundation", "music",
                        "inductee", "inducted", "birth", "gave", "group"}) {
    raw[t] = {1.0, 0.05};
  }
  for (const char* t : {"granite", "basalt", "formation", "layers", "layer",
                        "sedimentary", "cliff", "stone", "erosion", "exposed"}) {
    raw[t] = {0.05, 1.0};
  }
  for (const char* t : {"the", "of", "and", "a", "into", "with", "to", "members",
                        "2008", "first", "was", "part"}) {
    raw[t] = {0.3, 0.3};
  }
  EmbeddingTable table(2);
  for (const auto& [t, v] : raw) table.add(t, v);

  ContextSpec ctx;
  SimilaritySpec sim{SimilarityKind::kEmbedding, &table};
  auto s = context_sampling(occ, bitext, mono, ctx, sim, 0.75, 10, 5);

  // brute force the acceptance set
  const auto dctx = token_window(bitext[0], 11, 4);
  std::vector<std::string> dwin(dctx.tokens.begin(), dctx.tokens.end());
  std::set<std::size_t> expected;
  for (const auto& sent : mono) {
    for (std::size_t i = 0; i < sent.size(); ++i) {
      if (sent.tokens[i] != "Rock") continue;
      auto w = token_window(sent, i, 4);
      auto cos = bts_test::brute_cosine({w.tokens.begin(), w.tokens.end()}, dwin, raw);
      if (cos && *cos > 0.75L) expected.insert(sent.id);
    }
  }
  std::set<std::size_t> got(s.sentence_ids.begin(), s.sentence_ids.end());
  CHECK(got == expected);
  CHECK(got == std::set<std::size_t>{0, 1, 2});
}

TEST_CASE("context_sampling at s=-1 with embeddings degenerates to diff_sampling") {
  std::mt19937_64 rng(66);
  for (int round = 0; round < 20; ++round) {
    auto bitext = bts_test::uniform_corpus(50, 8, 30, rng);
    auto mono = bts_test::uniform_corpus(300, 8, 30, rng);
    EmbeddingTable table(3);
    std::uniform_real_distribution<double> pos(0.1, 1.0);
    for (int t = 0; t < 30; ++t) {
      std::vector<double> v{pos(rng), pos(rng), pos(rng)};
      table.add("t" + std::to_string(t), v);
    }
    std::vector<DifficultOccurrence> occ;
    DifficultySet d;
    for (int k = 0; k < 3; ++k) {
      const auto& sent = bitext[rng() % bitext.size()];
      const std::size_t p = rng() % sent.size();
      occ.push_back({sent.tokens[p], sent.id, p, 9.0});
      d.tokens.insert(sent.tokens[p]);
    }
    // windows must be non-empty for a similarity to exist
    std::vector<std::vector<std::string>> filtered;
    for (const auto& sent : mono) {
      auto t = sent.tokens;
      if (t.size() == 1) t.push_back("t0");
      filtered.push_back(t);
    }
    auto mono2 = Corpus::from_tokens(filtered);
    bool bitext_ok = true;
    for (const auto& o : occ) bitext_ok = bitext_ok && bitext[o.sentence_id].size() > 1;
    if (!bitext_ok) continue;

    ContextSpec ctx;
    ctx.w = 2;
    SimilaritySpec sim{SimilarityKind::kEmbedding, &table};
    const std::size_t n = 1 + rng() % 60;
    const std::uint64_t seed = rng();
    auto a = context_sampling(occ, bitext, mono2, ctx, sim, -1.0, n, seed);
    auto b = diff_sampling(d, mono2, n, seed);
    CHECK(a.sentence_ids == b.sentence_ids);
  }
}

TEST_CASE("context_sampling errors") {
  auto bitext = corpus("a b\n");
  auto mono = corpus("a b\n");
  std::vector<DifficultOccurrence> bad_id{{"a", 5, 0, 9.0}};
  CHECK_THROWS_AS(context_sampling(bad_id, bitext, mono, {}, {}, 0.5, 1, 0), DataError);
  std::vector<DifficultOccurrence> bad_tok{{"b", 0, 0, 9.0}};
  CHECK_THROWS_AS(context_sampling(bad_tok, bitext, mono, {}, {}, 0.5, 1, 0), DataError);
  std::vector<DifficultOccurrence> ok{{"a", 0, 0, 9.0}};
  CHECK_THROWS_AS(context_sampling(ok, bitext, mono, {}, {}, 1.5, 1, 0), UsageError);
  CHECK_THROWS_AS(context_sampling(ok, bitext, mono, {}, {}, -0.5, 1, 0), UsageError);
  SimilaritySpec no_table{SimilarityKind::kEmbedding, nullptr};
  CHECK_THROWS_AS(context_sampling(ok, bitext, mono, {}, no_table, 0.5, 1, 0),
                  UsageError);
  CHECK_THROWS_AS(context_sampling({}, bitext, mono, {}, {}, 0.5, 1, 0), UsageError);
}

TEST_CASE("sample set serialization") {
  auto m = corpus("y1 y2\nx\ny1\n");
  const auto occ = occurrences({{"y1", 1}, {"y2", 1}});
  auto s = ratio_sampling(occ, m, 2, 0);
  std::ostringstream sent, prov;
  write_sampled_sentences(sent, s, m);
  write_provenance(prov, s);
  std::string expected_sent;
  for (auto id : s.sentence_ids) expected_sent += Corpus::join(m[id]) + "\n";
  CHECK(sent.str() == expected_sent);
  const std::string p = prov.str();
  CHECK(p.rfind(std::string(kProvenanceHeader) + "\n", 0) == 0);
  CHECK(std::count(p.begin(), p.end(), '\n') == static_cast<long>(s.size() + 1));
}

TEST_CASE("samplers are deterministic and seed-sensitive") {
  std::mt19937_64 rng(12);
  auto m = bts_test::uniform_corpus(300, 6, 20, rng);
  auto d = dset({"t1", "t2", "t3"});
  const auto occ = occurrences({{"t1", 2}, {"t2", 3}});
  CHECK(random_sampling(m, 50, 9) == random_sampling(m, 50, 9));
  CHECK(diff_sampling(d, m, 50, 9) == diff_sampling(d, m, 50, 9));
  CHECK(ratio_sampling(occ, m, 20, 9) == ratio_sampling(occ, m, 20, 9));
  CHECK(random_sampling(m, 50, 9).sentence_ids != random_sampling(m, 50, 10).sentence_ids);
  CHECK(diff_sampling(d, m, 50, 9).sentence_ids != diff_sampling(d, m, 50, 10).sentence_ids);
}
