#include "btsampler/ngram_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "btsampler/error.hpp"

namespace btsampler {

std::string NGramLM::key_of(std::span<const std::string_view> tokens) {
  // tokens never contain spaces, so a space-joined key is unambiguous
  std::string key;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) key += ' ';
    key += tokens[i];
  }
  return key;
}

namespace {

std::vector<std::string_view> padded(const Sentence& s, std::size_t order) {
  std::vector<std::string_view> out(order - 1, NGramLM::kBegin);
  for (const auto& t : s.tokens) out.emplace_back(t);
  return out;
}

}  // namespace

NGramLM NGramLM::train(const Corpus& corpus, const LmOptions& options) {
  if (options.order == 0) throw UsageError("n-gram order must be >= 1");
  if (!(options.k > 0.0) || !std::isfinite(options.k)) {
    throw UsageError("smoothing constant k must be finite and > 0");
  }
  if (corpus.empty()) throw UsageError("cannot train on an empty corpus");

  NGramLM lm;
  lm.options_ = options;
  lm.counts_.resize(options.order);
  const std::size_t n = options.order;
  for (const auto& s : corpus) {
    const auto toks = padded(s, n);
    for (const auto& t : s.tokens) lm.vocab_.insert(t);
    for (std::size_t m = 1; m <= n; ++m) {
      for (std::size_t end = m; end <= toks.size(); ++end) {
        ++lm.counts_[m - 1][key_of(std::span(toks).subspan(end - m, m))];
      }
    }
    for (std::size_t t = n - 1; t < toks.size(); ++t) {
      ++lm.history_totals_[key_of(std::span(toks).subspan(t - (n - 1), n - 1))];
    }
  }
  if (options.open_vocabulary) lm.vocab_.emplace(kUnknown);
  return lm;
}

std::size_t NGramLM::vocabulary_size() const noexcept { return vocab_.size(); }

bool NGramLM::in_vocabulary(std::string_view token) const {
  return vocab_.contains(token);
}

std::vector<std::string> NGramLM::vocabulary() const {
  std::vector<std::string> v(vocab_.begin(), vocab_.end());
  std::sort(v.begin(), v.end());
  return v;
}

std::size_t NGramLM::ngram_count(std::span<const std::string> ngram) const {
  if (ngram.empty() || ngram.size() > options_.order) {
    throw UsageError("ngram_count: length must be in [1, order]");
  }
  std::vector<std::string_view> views(ngram.begin(), ngram.end());
  const auto& table = counts_[ngram.size() - 1];
  auto it = table.find(key_of(views));
  return it == table.end() ? 0 : it->second;
}

double NGramLM::probability_padded(std::span<const std::string_view> context,
                                   std::string_view token) const {
  std::string_view event = token;
  if (!vocab_.contains(token)) {
    if (!options_.open_vocabulary) {
      throw DataError("token '" + std::string(token) +
                      "' is outside the closed vocabulary");
    }
    event = kUnknown;
  }
  std::string hkey = key_of(context);
  std::size_t c_h = 0;
  if (auto it = history_totals_.find(hkey); it != history_totals_.end()) {
    c_h = it->second;
  }
  std::size_t c_hw = 0;
  std::string full = hkey.empty() ? std::string(event) : hkey + ' ' + std::string(event);
  const auto& top = counts_[options_.order - 1];
  if (auto it = top.find(full); it != top.end()) c_hw = it->second;
  const double k = options_.k;
  return (static_cast<double>(c_hw) + k) /
         (static_cast<double>(c_h) + k * static_cast<double>(vocab_.size()));
}

double NGramLM::probability(std::span<const std::string> history,
                            std::string_view token) const {
  const std::size_t need = options_.order - 1;
  std::vector<std::string_view> ctx;
  ctx.reserve(need);
  const std::size_t have = std::min(need, history.size());
  for (std::size_t i = have; i < need; ++i) ctx.push_back(kBegin);
  for (std::size_t i = history.size() - have; i < history.size(); ++i) {
    ctx.emplace_back(history[i]);
  }
  return probability_padded(ctx, token);
}

std::vector<TokenLossRecord> NGramLM::score(const Corpus& corpus) const {
  std::vector<TokenLossRecord> records;
  records.reserve(corpus.token_count());
  const std::size_t n = options_.order;
  for (const auto& s : corpus) {
    const auto toks = padded(s, n);
    for (std::size_t pos = 0; pos < s.size(); ++pos) {
      const std::size_t t = pos + n - 1;
      const double p = probability_padded(
          std::span(toks).subspan(t - (n - 1), n - 1), toks[t]);
      // p <= 1, so -log p >= 0; the max() clears a possible -0.0
      records.push_back({s.id, pos, s.tokens[pos], std::max(0.0, -std::log(p))});
    }
  }
  return records;
}

}  // namespace btsampler
