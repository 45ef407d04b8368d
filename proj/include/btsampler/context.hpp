#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "btsampler/corpus.hpp"

namespace btsampler {

// Tokens around a center position, center excluded. The first `left` tokens
// precede the center, the rest follow it. Views point into the sentence the
// window was taken from.
struct ContextWindow {
  std::vector<std::string_view> tokens;
  std::size_t left = 0;

  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }
  std::size_t right() const noexcept { return tokens.size() - left; }
};

// Up to w tokens on each side of position i.
ContextWindow token_window(const Sentence& sentence, std::size_t i,
                           std::size_t w);
// The other subword units of the word containing position i.
ContextWindow subword_context(const Sentence& sentence, std::size_t i,
                              const SubwordConvention& convention);
// Every token except position i.
ContextWindow sentence_context(const Sentence& sentence, std::size_t i);

// Fraction of aligned positions holding identical tokens. Requires equal,
// non-zero lengths.
double sim_match(const ContextWindow& a, const ContextWindow& b);

// Two windows cut to a common shape: each side is truncated to the shorter
// of the two, keeping the tokens nearest the center.
struct AlignedWindows {
  ContextWindow a;
  ContextWindow b;
  bool truncated = false;
};
AlignedWindows align_windows(const ContextWindow& a, const ContextWindow& b);

// Word vectors in word2vec text format.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t dim);

  static EmbeddingTable load(const std::filesystem::path& path);
  static EmbeddingTable parse(std::string_view content,
                              std::string_view source = {});

  void add(std::string token, std::span<const double> vector);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return index_.size(); }
  // Empty span when the token is out of vocabulary.
  std::span<const double> find(std::string_view token) const;

 private:
  struct Hash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
      return std::hash<std::string_view>{}(s);
    }
  };

  std::size_t dim_ = 0;
  std::unordered_map<std::string, std::size_t, Hash, std::equal_to<>> index_;
  std::vector<double> data_;
};

// Cosine between the averaged in-vocabulary vectors of each window.
// std::nullopt when either window has no in-vocabulary token or a zero mean
// vector; callers treat that as below every threshold.
std::optional<double> sim_embedding(const ContextWindow& a,
                                    const ContextWindow& b,
                                    const EmbeddingTable& table);

}  // namespace btsampler
