#include "btsampler/corpus.hpp"

#include "btsampler/error.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

bool SubwordConvention::joins_next(std::string_view token) const noexcept {
  return token.size() >= marker.size() && token.ends_with(marker);
}

void SubwordConvention::validate() const {
  if (marker.empty()) throw UsageError("subword marker must be non-empty");
  for (char c : marker) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      throw UsageError("subword marker must not contain whitespace");
    }
  }
}

namespace {

bool has_whitespace(std::string_view token) {
  for (char c : token) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
        c == '\f') {
      return true;
    }
  }
  return false;
}

void check_token(std::string_view token, std::size_t line) {
  if (token.empty()) {
    throw DataError("empty token at line " + std::to_string(line) +
                    " (tokens must be separated by single spaces)");
  }
  if (has_whitespace(token)) {
    throw DataError("token with whitespace at line " + std::to_string(line));
  }
}

}  // namespace

Corpus Corpus::load(const std::filesystem::path& path,
                    const SubwordConvention& convention) {
  return parse(read_file(path), path.string(), convention);
}

Corpus Corpus::parse(std::string_view content, std::string source_path,
                     const SubwordConvention& convention) {
  convention.validate();
  if (!is_valid_utf8(content)) {
    throw DataError("corpus '" + source_path + "' is not valid UTF-8");
  }
  Corpus corpus;
  corpus.source_path_ = std::move(source_path);
  corpus.convention_ = convention;
  Lines lines = split_lines(content);
  corpus.trailing_newline_ = lines.trailing_newline || lines.lines.empty();
  corpus.sentences_.reserve(lines.lines.size());
  for (std::size_t i = 0; i < lines.lines.size(); ++i) {
    const std::size_t line_no = i + 1;
    std::string_view line = lines.lines[i];
    if (line.empty()) {
      throw DataError("empty sentence at line " + std::to_string(line_no));
    }
    Sentence sentence;
    sentence.id = i;
    for (std::string_view tok : split(line, ' ')) {
      check_token(tok, line_no);
      sentence.tokens.emplace_back(tok);
    }
    corpus.sentences_.push_back(std::move(sentence));
  }
  return corpus;
}

Corpus Corpus::from_tokens(std::vector<std::vector<std::string>> sentences,
                           const SubwordConvention& convention) {
  convention.validate();
  Corpus corpus;
  corpus.convention_ = convention;
  corpus.sentences_.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (sentences[i].empty()) {
      throw DataError("empty sentence at line " + std::to_string(i + 1));
    }
    for (const auto& tok : sentences[i]) check_token(tok, i + 1);
    corpus.sentences_.push_back(Sentence{i, std::move(sentences[i])});
  }
  return corpus;
}

const Sentence& Corpus::at(std::size_t id) const {
  if (id >= sentences_.size()) {
    throw DataError("sentence id " + std::to_string(id) +
                    " out of range for corpus of " +
                    std::to_string(sentences_.size()) + " sentences");
  }
  return sentences_[id];
}

std::size_t Corpus::token_count() const noexcept {
  std::size_t n = 0;
  for (const auto& s : sentences_) n += s.size();
  return n;
}

std::string Corpus::join(const Sentence& sentence) {
  std::string out;
  for (std::size_t i = 0; i < sentence.tokens.size(); ++i) {
    if (i) out += ' ';
    out += sentence.tokens[i];
  }
  return out;
}

std::string Corpus::serialize() const {
  std::string out;
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    if (i) out += '\n';
    out += join(sentences_[i]);
  }
  if (trailing_newline_ && !sentences_.empty()) out += '\n';
  return out;
}

void Corpus::save(const std::filesystem::path& path) const {
  write_file(path, serialize());
}

std::vector<WordSpan> word_spans(const Sentence& sentence,
                                 const SubwordConvention& convention) {
  std::vector<WordSpan> spans;
  const std::size_t n = sentence.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!convention.joins_next(sentence.tokens[i]) || i + 1 == n) {
      spans.push_back({start, i});
      start = i + 1;
    }
  }
  return spans;
}

WordSpan word_span_at(const Sentence& sentence, std::size_t pos,
                      const SubwordConvention& convention) {
  if (pos >= sentence.size()) {
    throw UsageError("position " + std::to_string(pos) +
                     " out of range for sentence of length " +
                     std::to_string(sentence.size()));
  }
  std::size_t first = pos;
  while (first > 0 && convention.joins_next(sentence.tokens[first - 1])) {
    --first;
  }
  std::size_t last = pos;
  while (last + 1 < sentence.size() &&
         convention.joins_next(sentence.tokens[last])) {
    ++last;
  }
  return {first, last};
}

}  // namespace btsampler
