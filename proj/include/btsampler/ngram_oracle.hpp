#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "btsampler/corpus.hpp"
#include "btsampler/loss_stats.hpp"

namespace btsampler {

struct LmOptions {
  std::size_t order = 3;
  double k = 0.1;
  // Reserve an unknown-token type in the vocabulary. Without it the model is
  // closed-vocabulary and scoring an unseen token is a DataError.
  bool open_vocabulary = true;
};

// Add-k smoothed n-gram language model, used as a stand-in loss source:
//
//   p(w | h) = (c(h, w) + k) / (c(h) + k |V|)
//
// where h is the n-1 preceding tokens (sentence starts padded with "<s>"),
// c(h) is the number of predictions made from h, and V is the training
// vocabulary plus "<unk>" when open. Every corpus token is one prediction;
// the end of sentence is not scored and is not part of V.
class NGramLM {
 public:
  static constexpr std::string_view kBegin = "<s>";
  static constexpr std::string_view kUnknown = "<unk>";

  static NGramLM train(const Corpus& corpus, const LmOptions& options = {});

  std::size_t order() const noexcept { return options_.order; }
  double k() const noexcept { return options_.k; }
  std::size_t vocabulary_size() const noexcept;
  bool in_vocabulary(std::string_view token) const;
  // Symbols p() normalizes over.
  std::vector<std::string> vocabulary() const;

  // p(token | history); `history` holds the preceding tokens, most recent
  // last. Only the last order-1 entries are used and short histories are
  // padded with "<s>".
  double probability(std::span<const std::string> history,
                     std::string_view token) const;

  // Count of an m-gram (1 <= m <= order) in the padded training data.
  std::size_t ngram_count(std::span<const std::string> ngram) const;

  // One record per corpus token, loss = -ln p(token | history).
  std::vector<TokenLossRecord> score(const Corpus& corpus) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };
  using CountMap =
      std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>>;

  static std::string key_of(std::span<const std::string_view> tokens);
  double probability_padded(std::span<const std::string_view> context,
                            std::string_view token) const;

  LmOptions options_;
  std::unordered_set<std::string, Hash, std::equal_to<>> vocab_;
  std::vector<CountMap> counts_;  // counts_[m-1]: m-gram counts
  CountMap history_totals_;       // c(h) for (order-1)-token histories
};

}  // namespace btsampler
