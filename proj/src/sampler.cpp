#include "btsampler/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>

#include "btsampler/error.hpp"
#include "btsampler/random.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

InvertedIndex::InvertedIndex(const Corpus& corpus) {
  for (const auto& s : corpus) {
    for (const auto& tok : s.tokens) {
      auto& ids = postings_[tok];
      if (ids.empty() || ids.back() != s.id) ids.push_back(s.id);
    }
  }
}

std::span<const std::size_t> InvertedIndex::sentences_with(
    std::string_view token) const {
  auto it = postings_.find(token);
  if (it == postings_.end()) return {};
  return it->second;
}

std::vector<std::size_t> InvertedIndex::merge(
    std::vector<std::span<const std::size_t>> lists) {
  std::vector<std::size_t> out;
  std::size_t total = 0;
  for (auto l : lists) total += l.size();
  out.reserve(total);
  for (auto l : lists) out.insert(out.end(), l.begin(), l.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

namespace {

void require_positive(std::size_t n) {
  if (n == 0) throw UsageError("sample size must be positive");
}

void finish(SampleSet& set, std::string_view algo) {
  if (set.size() < set.requested) {
    set.exhausted = true;
    set.warning = std::string(algo) + ": only " + std::to_string(set.size()) +
                  " of " + std::to_string(set.requested) +
                  " requested sentences are eligible";
  }
}

std::vector<std::size_t> all_ids(const Corpus& corpus) {
  std::vector<std::size_t> ids(corpus.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

std::uint64_t candidate_key(std::uint64_t seed) {
  return stream_key(seed, Stream::kCandidates);
}

}  // namespace

SampleSet random_sampling(const Corpus& mono, std::size_t n,
                          std::uint64_t seed) {
  require_positive(n);
  if (mono.empty()) throw UsageError("random_sampling: empty corpus");
  SampleSet set;
  set.requested = n;
  const auto ids = all_ids(mono);
  set.sentence_ids = draw_first(ids, candidate_key(seed), n);
  set.provenance.resize(set.sentence_ids.size());
  finish(set, "random");
  return set;
}

SampleSet diff_sampling(const DifficultySet& difficult, const Corpus& mono,
                        std::size_t n, std::uint64_t seed) {
  require_positive(n);
  if (difficult.empty()) throw UsageError("diff_sampling: empty difficulty set");
  SampleSet set;
  set.requested = n;
  const InvertedIndex index(mono);
  const auto eligible = index.sentences_with_any(difficult.tokens);
  set.sentence_ids = draw_first(eligible, candidate_key(seed), n);
  for (std::size_t id : set.sentence_ids) {
    Provenance p;
    for (const auto& tok : mono[id].tokens) {
      if (difficult.contains(tok)) {
        p.trigger_token = tok;
        break;
      }
    }
    set.provenance.push_back(std::move(p));
  }
  finish(set, "diffsampling");
  return set;
}

bool QuotaTable::under_quota(std::string_view token) const {
  auto q = quota.find(token);
  if (q == quota.end()) return false;
  auto c = count.find(token);
  const double have = c == count.end() ? 0.0 : static_cast<double>(c->second);
  return have < q->second;
}

QuotaTable compute_quotas(std::span<const DifficultOccurrence> occurrences,
                          std::size_t n) {
  if (occurrences.empty()) throw UsageError("no difficult occurrences");
  std::map<std::string, std::size_t, std::less<>> per_token;
  for (const auto& o : occurrences) ++per_token[o.token];
  QuotaTable table;
  const double total = static_cast<double>(occurrences.size());
  for (const auto& [tok, c] : per_token) {
    table.quota.emplace(tok, static_cast<double>(n) * static_cast<double>(c) / total);
    table.count.emplace(tok, 0);
  }
  return table;
}

SampleSet ratio_sampling(std::span<const DifficultOccurrence> occurrences,
                         const Corpus& mono, std::size_t n, std::uint64_t seed,
                         QuotaTable* final_quotas) {
  require_positive(n);
  QuotaTable quotas = compute_quotas(occurrences, n);
  SampleSet set;
  set.requested = n;

  const InvertedIndex index(mono);
  std::vector<std::string_view> tokens;
  for (const auto& [tok, q] : quotas.quota) tokens.push_back(tok);
  const auto order =
      draw_order(index.sentences_with_any(tokens), candidate_key(seed));

  std::size_t open_tokens = quotas.quota.size();
  for (std::size_t id : order) {
    if (set.size() == n || open_tokens == 0) break;
    // difficult tokens of the candidate with their occurrence counts, in
    // order of first appearance
    std::vector<std::pair<std::string_view, std::size_t>> found;
    for (const auto& tok : mono[id].tokens) {
      if (!quotas.quota.contains(tok)) continue;
      auto it = std::find_if(found.begin(), found.end(),
                             [&](const auto& f) { return f.first == tok; });
      if (it == found.end()) {
        found.emplace_back(tok, 1);
      } else {
        ++it->second;
      }
    }
    auto trigger = std::find_if(found.begin(), found.end(), [&](const auto& f) {
      return quotas.under_quota(f.first);
    });
    if (trigger == found.end()) continue;

    Provenance p;
    p.trigger_token = std::string(trigger->first);
    for (const auto& [tok, c] : found) {
      const bool was_open = quotas.under_quota(tok);
      quotas.count.find(tok)->second += c;
      if (was_open && !quotas.under_quota(tok)) --open_tokens;
      p.credited.emplace_back(tok);
    }
    set.sentence_ids.push_back(id);
    set.provenance.push_back(std::move(p));
  }
  finish(set, "ratio");
  if (final_quotas) *final_quotas = std::move(quotas);
  return set;
}

ContextWindow ContextSpec::extract(const Sentence& sentence,
                                   std::size_t i) const {
  switch (kind) {
    case ContextKind::kWindow:
      return token_window(sentence, i, w);
    case ContextKind::kSubword:
      return subword_context(sentence, i, convention);
    case ContextKind::kSentence:
      return sentence_context(sentence, i);
  }
  throw UsageError("invalid context kind");
}

namespace {

struct DifficultContext {
  std::size_t sentence_id;
  std::size_t position;
  ContextWindow window;
};

struct Score {
  double value;
  bool truncated;
};

std::optional<Score> similarity(const ContextWindow& candidate,
                                const ContextWindow& difficult,
                                const SimilaritySpec& sim) {
  if (sim.kind == SimilarityKind::kEmbedding) {
    auto v = sim_embedding(candidate, difficult, *sim.embeddings);
    if (!v) return std::nullopt;
    return Score{*v, false};
  }
  auto aligned = align_windows(candidate, difficult);
  if (aligned.a.empty()) return std::nullopt;
  return Score{sim_match(aligned.a, aligned.b), aligned.truncated};
}

}  // namespace

SampleSet context_sampling(std::span<const DifficultOccurrence> occurrences,
                           const Corpus& bitext_target, const Corpus& mono,
                           const ContextSpec& ctx, const SimilaritySpec& sim,
                           double s, std::size_t n, std::uint64_t seed) {
  require_positive(n);
  if (occurrences.empty()) throw UsageError("no difficult occurrences");
  if (sim.kind == SimilarityKind::kEmbedding) {
    if (!sim.embeddings) throw UsageError("embedding similarity needs a table");
    if (s < -1.0 || s > 1.0) throw UsageError("s must lie in [-1, 1]");
  } else if (s < 0.0 || s > 1.0) {
    throw UsageError("s must lie in [0, 1] for match similarity");
  }
  if (ctx.kind == ContextKind::kWindow && ctx.w == 0) {
    throw UsageError("window size must be positive");
  }

  std::map<std::string, std::vector<DifficultContext>, std::less<>> contexts;
  for (const auto& o : occurrences) {
    if (o.sentence_id >= bitext_target.size()) {
      throw DataError("difficult occurrence references unknown sentence_id " +
                      std::to_string(o.sentence_id));
    }
    const Sentence& sent = bitext_target[o.sentence_id];
    if (o.position >= sent.size() || sent.tokens[o.position] != o.token) {
      throw DataError("difficult occurrence '" + o.token + "' at sentence " +
                      std::to_string(o.sentence_id) + " position " +
                      std::to_string(o.position) +
                      " does not match the bitext target");
    }
    contexts[o.token].push_back(
        {o.sentence_id, o.position, ctx.extract(sent, o.position)});
  }

  SampleSet set;
  set.requested = n;
  const InvertedIndex index(mono);
  std::vector<std::string_view> tokens;
  for (const auto& [tok, c] : contexts) tokens.push_back(tok);
  const auto order =
      draw_order(index.sentences_with_any(tokens), candidate_key(seed));

  for (std::size_t id : order) {
    if (set.size() == n) break;
    const Sentence& cand = mono[id];
    std::optional<Provenance> best;
    for (std::size_t i = 0; i < cand.size(); ++i) {
      auto it = contexts.find(cand.tokens[i]);
      if (it == contexts.end()) continue;
      const ContextWindow cm = ctx.extract(cand, i);
      for (const auto& dc : it->second) {
        auto score = similarity(cm, dc.window, sim);
        if (!score || !(score->value > s)) continue;
        if (!best || score->value > *best->similarity) {
          Provenance p;
          p.trigger_token = it->first;
          p.matched_sentence_id = dc.sentence_id;
          p.matched_position = dc.position;
          p.similarity = score->value;
          p.truncated = score->truncated;
          best = std::move(p);
        }
      }
    }
    if (best) {
      set.sentence_ids.push_back(id);
      set.provenance.push_back(std::move(*best));
    }
  }
  finish(set, "context");
  return set;
}

void write_sampled_sentences(std::ostream& out, const SampleSet& set,
                             const Corpus& mono) {
  for (std::size_t id : set.sentence_ids) out << Corpus::join(mono.at(id)) << '\n';
}

void write_provenance(std::ostream& out, const SampleSet& set) {
  out << kProvenanceHeader << '\n';
  auto opt = [](const auto& v) {
    return v ? std::to_string(*v) : std::string("-");
  };
  for (std::size_t k = 0; k < set.size(); ++k) {
    const Provenance& p = set.provenance[k];
    std::string credited;
    for (const auto& t : p.credited) {
      if (!credited.empty()) credited += ',';
      credited += t;
    }
    out << set.sentence_ids[k] << '\t'
        << (p.trigger_token.empty() ? "-" : p.trigger_token) << '\t'
        << opt(p.matched_sentence_id) << '\t' << opt(p.matched_position) << '\t'
        << (p.similarity ? format_real(*p.similarity) : "-") << '\t'
        << (credited.empty() ? "-" : credited) << '\t' << (p.truncated ? 1 : 0)
        << '\n';
  }
}

void write_sample_set(const std::filesystem::path& sentences_path,
                      const std::filesystem::path& provenance_path,
                      const SampleSet& set, const Corpus& mono) {
  std::ofstream sent(sentences_path, std::ios::binary | std::ios::trunc);
  if (!sent) {
    throw IoError("cannot open '" + sentences_path.string() + "' for writing");
  }
  write_sampled_sentences(sent, set, mono);
  std::ofstream prov(provenance_path, std::ios::binary | std::ios::trunc);
  if (!prov) {
    throw IoError("cannot open '" + provenance_path.string() + "' for writing");
  }
  write_provenance(prov, set);
  if (!sent || !prov) throw IoError("failed writing sample set");
}

}  // namespace btsampler
