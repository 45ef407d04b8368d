#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace btsampler {

// Subword marker convention: a token ending in `marker` joins the token that
// follows it into one word ("Stan@@ ford").
struct SubwordConvention {
  std::string marker = "@@";

  bool joins_next(std::string_view token) const noexcept;
  void validate() const;
};

struct Sentence {
  std::size_t id = 0;
  std::vector<std::string> tokens;

  std::size_t size() const noexcept { return tokens.size(); }
};

// Inclusive run of positions forming one word.
struct WordSpan {
  std::size_t first = 0;
  std::size_t last = 0;

  std::size_t size() const noexcept { return last - first + 1; }
  bool contains(std::size_t pos) const noexcept {
    return pos >= first && pos <= last;
  }
  friend bool operator==(const WordSpan&, const WordSpan&) = default;
};

// A tokenized corpus, one sentence per line. Immutable after construction.
class Corpus {
 public:
  Corpus() = default;

  static Corpus load(const std::filesystem::path& path,
                     const SubwordConvention& convention = {});
  // Parses in-memory text with the same rules as load().
  static Corpus parse(std::string_view content, std::string source_path = {},
                      const SubwordConvention& convention = {});
  // Builds a corpus from already-split sentences; validates every token.
  static Corpus from_tokens(std::vector<std::vector<std::string>> sentences,
                            const SubwordConvention& convention = {});

  std::size_t size() const noexcept { return sentences_.size(); }
  bool empty() const noexcept { return sentences_.empty(); }
  const Sentence& operator[](std::size_t id) const { return sentences_[id]; }
  const Sentence& at(std::size_t id) const;
  auto begin() const noexcept { return sentences_.begin(); }
  auto end() const noexcept { return sentences_.end(); }

  const std::string& source_path() const noexcept { return source_path_; }
  const SubwordConvention& convention() const noexcept { return convention_; }
  std::size_t token_count() const noexcept;

  // Byte-identical inverse of parse().
  std::string serialize() const;
  void save(const std::filesystem::path& path) const;

  static std::string join(const Sentence& sentence);

 private:
  std::vector<Sentence> sentences_;
  std::string source_path_;
  SubwordConvention convention_;
  bool trailing_newline_ = true;
};

// Partition of a sentence's positions into words under `convention`.
std::vector<WordSpan> word_spans(const Sentence& sentence,
                                 const SubwordConvention& convention);

// The word containing position `pos`.
WordSpan word_span_at(const Sentence& sentence, std::size_t pos,
                      const SubwordConvention& convention);

}  // namespace btsampler
