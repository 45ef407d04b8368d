#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "btsampler/context.hpp"
#include "btsampler/corpus.hpp"
#include "btsampler/difficulty.hpp"

namespace btsampler {

// token -> ascending ids of the sentences containing it.
class InvertedIndex {
 public:
  explicit InvertedIndex(const Corpus& corpus);

  std::span<const std::size_t> sentences_with(std::string_view token) const;

  // Sorted union of sentences_with() over `tokens`.
  template <class Range>
  std::vector<std::size_t> sentences_with_any(const Range& tokens) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  std::unordered_map<std::string, std::vector<std::size_t>, Hash,
                     std::equal_to<>>
      postings_;

  static std::vector<std::size_t> merge(
      std::vector<std::span<const std::size_t>> lists);
};

template <class Range>
std::vector<std::size_t> InvertedIndex::sentences_with_any(
    const Range& tokens) const {
  std::vector<std::span<const std::size_t>> lists;
  for (const auto& tok : tokens) {
    auto ids = sentences_with(tok);
    if (!ids.empty()) lists.push_back(ids);
  }
  return merge(std::move(lists));
}

// Why a sentence was accepted.
struct Provenance {
  std::string trigger_token;  // empty for random sampling
  std::optional<std::size_t> matched_sentence_id;
  std::optional<std::size_t> matched_position;
  std::optional<double> similarity;
  std::vector<std::string> credited;  // ratio sampling quota tokens
  bool truncated = false;             // match windows cut to a common shape

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

// Sampled monolingual sentence ids in acceptance order.
struct SampleSet {
  std::vector<std::size_t> sentence_ids;
  std::vector<Provenance> provenance;
  std::size_t requested = 0;
  bool exhausted = false;  // fewer than `requested` sentences were eligible
  std::string warning;

  std::size_t size() const noexcept { return sentence_ids.size(); }
  friend bool operator==(const SampleSet&, const SampleSet&) = default;
};

SampleSet random_sampling(const Corpus& mono, std::size_t n,
                          std::uint64_t seed);

// Sentences containing at least one token of `difficult`.
SampleSet diff_sampling(const DifficultySet& difficult, const Corpus& mono,
                        std::size_t n, std::uint64_t seed);

// Per-token quotas proportional to the number of difficult occurrences.
struct QuotaTable {
  std::map<std::string, double, std::less<>> quota;
  std::map<std::string, std::size_t, std::less<>> count;

  bool under_quota(std::string_view token) const;
};
QuotaTable compute_quotas(std::span<const DifficultOccurrence> occurrences,
                          std::size_t n);

SampleSet ratio_sampling(std::span<const DifficultOccurrence> occurrences,
                         const Corpus& mono, std::size_t n, std::uint64_t seed,
                         QuotaTable* final_quotas = nullptr);

enum class ContextKind { kWindow, kSubword, kSentence };
enum class SimilarityKind { kMatch, kEmbedding };

struct ContextSpec {
  ContextKind kind = ContextKind::kWindow;
  std::size_t w = 4;
  SubwordConvention convention;

  ContextWindow extract(const Sentence& sentence, std::size_t i) const;
};

struct SimilaritySpec {
  SimilarityKind kind = SimilarityKind::kMatch;
  const EmbeddingTable* embeddings = nullptr;  // required for kEmbedding
};

// Accepts a candidate when some occurrence of a difficult token in it has a
// context more similar than `s` to one of that token's difficult contexts in
// `bitext_target`.
SampleSet context_sampling(std::span<const DifficultOccurrence> occurrences,
                           const Corpus& bitext_target, const Corpus& mono,
                           const ContextSpec& ctx, const SimilaritySpec& sim,
                           double s, std::size_t n, std::uint64_t seed);

inline constexpr std::string_view kProvenanceHeader =
    "sentence_id\ttrigger_token\tmatched_sentence_id\tmatched_position\t"
    "similarity\tcredited_tokens\ttruncated";

void write_sampled_sentences(std::ostream& out, const SampleSet& set,
                             const Corpus& mono);
void write_provenance(std::ostream& out, const SampleSet& set);
void write_sample_set(const std::filesystem::path& sentences_path,
                      const std::filesystem::path& provenance_path,
                      const SampleSet& set, const Corpus& mono);

}  // namespace btsampler
