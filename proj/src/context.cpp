#include "btsampler/context.hpp"

#include <algorithm>
#include <cmath>

#include "btsampler/error.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

namespace {

void check_position(const Sentence& sentence, std::size_t i) {
  if (i >= sentence.size()) {
    throw UsageError("context position " + std::to_string(i) +
                     " out of range for sentence of length " +
                     std::to_string(sentence.size()));
  }
}

ContextWindow range_without(const Sentence& sentence, std::size_t first,
                            std::size_t last, std::size_t center) {
  ContextWindow win;
  win.tokens.reserve(last - first);
  for (std::size_t j = first; j <= last; ++j) {
    if (j == center) continue;
    win.tokens.emplace_back(sentence.tokens[j]);
  }
  win.left = center - first;
  return win;
}

}  // namespace

ContextWindow token_window(const Sentence& sentence, std::size_t i,
                           std::size_t w) {
  check_position(sentence, i);
  if (w == 0) throw UsageError("window size must be positive");
  const std::size_t first = i >= w ? i - w : 0;
  const std::size_t last = std::min(sentence.size() - 1, i + std::min(w, sentence.size()));
  return range_without(sentence, first, last, i);
}

ContextWindow subword_context(const Sentence& sentence, std::size_t i,
                              const SubwordConvention& convention) {
  check_position(sentence, i);
  const WordSpan span = word_span_at(sentence, i, convention);
  return range_without(sentence, span.first, span.last, i);
}

ContextWindow sentence_context(const Sentence& sentence, std::size_t i) {
  check_position(sentence, i);
  return range_without(sentence, 0, sentence.size() - 1, i);
}

double sim_match(const ContextWindow& a, const ContextWindow& b) {
  if (a.size() != b.size()) {
    throw UsageError("sim_match: window lengths differ (" +
                     std::to_string(a.size()) + " vs " +
                     std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw UsageError("sim_match: similarity of empty windows");
  std::size_t same = 0;
  for (std::size_t k = 0; k < a.size(); ++k) same += a.tokens[k] == b.tokens[k];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

AlignedWindows align_windows(const ContextWindow& a, const ContextWindow& b) {
  const std::size_t left = std::min(a.left, b.left);
  const std::size_t right = std::min(a.right(), b.right());
  auto cut = [&](const ContextWindow& w) {
    ContextWindow out;
    out.left = left;
    out.tokens.reserve(left + right);
    auto begin = w.tokens.begin() + static_cast<std::ptrdiff_t>(w.left - left);
    out.tokens.assign(begin, begin + static_cast<std::ptrdiff_t>(left + right));
    return out;
  };
  AlignedWindows out{cut(a), cut(b), false};
  out.truncated = out.a.size() != a.size() || out.b.size() != b.size();
  return out;
}

EmbeddingTable::EmbeddingTable(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw UsageError("embedding dimension must be positive");
}

void EmbeddingTable::add(std::string token, std::span<const double> vector) {
  if (vector.size() != dim_) {
    throw DataError("embedding for '" + token + "' has " +
                    std::to_string(vector.size()) + " values, expected " +
                    std::to_string(dim_));
  }
  const std::size_t slot = index_.size();
  auto [it, inserted] = index_.emplace(std::move(token), slot);
  if (!inserted) throw DataError("duplicate embedding token '" + it->first + "'");
  data_.insert(data_.end(), vector.begin(), vector.end());
}

std::span<const double> EmbeddingTable::find(std::string_view token) const {
  auto it = index_.find(token);
  if (it == index_.end()) return {};
  return {data_.data() + it->second * dim_, dim_};
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
  return parse(read_file(path), path.string());
}

EmbeddingTable EmbeddingTable::parse(std::string_view content,
                                     std::string_view source) {
  const std::string where =
      source.empty() ? std::string("<embeddings>") : std::string(source);
  if (!is_valid_utf8(content)) throw DataError(where + ": not valid UTF-8");
  Lines lines = split_lines(content);
  auto fields_of = [](std::string_view line) {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\r')) {
      line.remove_suffix(1);
    }
    return split(line, ' ');
  };
  if (lines.lines.empty()) throw DataError(where + ": missing header");
  auto header = fields_of(lines.lines[0]);
  if (header.size() != 2) {
    throw DataError(where + ":1: header must be 'count dim'");
  }
  std::uint64_t count = 0, dim = 0;
  try {
    count = parse_count(header[0], "count");
    dim = parse_count(header[1], "dim");
  } catch (const DataError& e) {
    throw DataError(where + ":1: " + e.what());
  }
  if (dim == 0) throw DataError(where + ":1: dimension must be positive");

  EmbeddingTable table(dim);
  std::vector<double> vec(dim);
  std::size_t rows = 0;
  for (std::size_t i = 1; i < lines.lines.size(); ++i) {
    const std::string at = where + ":" + std::to_string(i + 1);
    if (lines.lines[i].empty()) continue;
    auto f = fields_of(lines.lines[i]);
    if (f.size() != dim + 1) {
      throw DataError(at + ": expected token and " + std::to_string(dim) +
                      " values, found " + std::to_string(f.size() - 1));
    }
    try {
      for (std::size_t k = 0; k < dim; ++k) {
        vec[k] = parse_real(f[k + 1], "embedding value");
        if (!std::isfinite(vec[k])) throw DataError("non-finite embedding value");
      }
      table.add(std::string(f[0]), vec);
    } catch (const DataError& e) {
      throw DataError(at + ": " + e.what());
    }
    ++rows;
  }
  if (rows != count) {
    throw DataError(where + ": header declares " + std::to_string(count) +
                    " vectors but file has " + std::to_string(rows));
  }
  return table;
}

namespace {

// Mean of the in-vocabulary vectors; empty when none is in vocabulary.
std::vector<double> mean_vector(const ContextWindow& win,
                                const EmbeddingTable& table) {
  std::vector<double> sum(table.dim(), 0.0);
  std::size_t hits = 0;
  for (auto tok : win.tokens) {
    auto v = table.find(tok);
    if (v.empty()) continue;
    ++hits;
    for (std::size_t k = 0; k < v.size(); ++k) sum[k] += v[k];
  }
  if (hits == 0) return {};
  for (double& x : sum) x /= static_cast<double>(hits);
  return sum;
}

}  // namespace

std::optional<double> sim_embedding(const ContextWindow& a,
                                    const ContextWindow& b,
                                    const EmbeddingTable& table) {
  const auto va = mean_vector(a, table);
  const auto vb = mean_vector(b, table);
  if (va.empty() || vb.empty()) return std::nullopt;
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < va.size(); ++k) {
    dot += va[k] * vb[k];
    na += va[k] * va[k];
    nb += vb[k] * vb[k];
  }
  if (na == 0.0 || nb == 0.0) return std::nullopt;
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

}  // namespace btsampler
