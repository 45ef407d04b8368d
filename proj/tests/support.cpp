#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "btsampler/random.hpp"

namespace bts_test {

namespace {

std::vector<double> zipf_weights(std::size_t size, double exponent) {
  std::vector<double> w(size);
  for (std::size_t r = 0; r < size; ++r) {
    w[r] = 1.0 / std::pow(static_cast<double>(r + 1), exponent);
  }
  return w;
}

}  // namespace

ZipfVocabulary::ZipfVocabulary(std::size_t size, double exponent) {
  const auto w = zipf_weights(size, exponent);
  dist_ = std::discrete_distribution<std::size_t>(w.begin(), w.end());
  for (std::size_t r = 0; r < size; ++r) tokens_.push_back("w" + std::to_string(r));
}

std::string ZipfVocabulary::draw(std::mt19937_64& rng) { return tokens_[dist_(rng)]; }

btsampler::Corpus zipf_corpus(std::size_t sentences, std::size_t min_len,
                              std::size_t max_len, ZipfVocabulary& vocab,
                              std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::vector<std::vector<std::string>> out(sentences);
  for (auto& s : out) {
    const std::size_t l = len(rng);
    for (std::size_t i = 0; i < l; ++i) s.push_back(vocab.draw(rng));
  }
  return btsampler::Corpus::from_tokens(std::move(out));
}

btsampler::Corpus uniform_corpus(std::size_t sentences, std::size_t max_len,
                                 std::size_t vocab, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> len(1, max_len);
  std::uniform_int_distribution<std::size_t> tok(0, vocab - 1);
  std::vector<std::vector<std::string>> out(sentences);
  for (auto& s : out) {
    const std::size_t l = len(rng);
    for (std::size_t i = 0; i < l; ++i) s.push_back("t" + std::to_string(tok(rng)));
  }
  return btsampler::Corpus::from_tokens(std::move(out));
}

std::vector<btsampler::TokenLossRecord> random_records(std::size_t count,
                                                       std::size_t vocab,
                                                       std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> tok(0, vocab - 1);
  std::exponential_distribution<double> loss(0.3);
  std::vector<btsampler::TokenLossRecord> out;
  for (std::size_t i = 0; i < count; ++i) {
    out.push_back({i / 10, i % 10, "t" + std::to_string(tok(rng)), loss(rng)});
  }
  return out;
}

std::map<std::string, BruteStats> brute_aggregate(
    const std::vector<btsampler::TokenLossRecord>& records) {
  std::vector<std::string> distinct;
  for (const auto& r : records) {
    if (std::find(distinct.begin(), distinct.end(), r.token) == distinct.end()) {
      distinct.push_back(r.token);
    }
  }
  std::map<std::string, BruteStats> out;
  for (const auto& tok : distinct) {
    long double sum = 0;
    std::size_t n = 0;
    for (const auto& r : records) {
      if (r.token == tok) {
        sum += r.loss;
        ++n;
      }
    }
    const long double mean = sum / n;
    long double sq = 0;
    for (const auto& r : records) {
      if (r.token == tok) sq += (r.loss - mean) * (r.loss - mean);
    }
    out[tok] = {n, mean, std::sqrt(sq / n)};
  }
  return out;
}

std::vector<std::size_t> rejection_diff_sampling(
    const std::vector<std::string>& difficult, const btsampler::Corpus& mono,
    std::size_t n, std::uint64_t seed) {
  // the candidate order: every sentence, ascending (priority, id)
  const auto key = btsampler::stream_key(seed, btsampler::Stream::kCandidates);
  std::vector<std::pair<std::uint64_t, std::size_t>> order;
  for (std::size_t id = 0; id < mono.size(); ++id) {
    order.emplace_back(btsampler::priority(key, id), id);
  }
  std::sort(order.begin(), order.end());
  std::vector<std::size_t> picked;
  for (const auto& [prio, id] : order) {
    if (picked.size() == n) break;
    bool hit = false;
    for (const auto& tok : mono[id].tokens) {
      for (const auto& d : difficult) hit = hit || tok == d;
    }
    if (hit) picked.push_back(id);
  }
  return picked;
}

std::optional<long double> brute_cosine(
    const std::vector<std::string>& a, const std::vector<std::string>& b,
    const std::map<std::string, std::vector<double>>& table) {
  auto mean = [&](const std::vector<std::string>& w)
      -> std::optional<std::vector<long double>> {
    std::vector<long double> sum;
    std::size_t hits = 0;
    for (const auto& t : w) {
      auto it = table.find(t);
      if (it == table.end()) continue;
      if (sum.empty()) sum.assign(it->second.size(), 0.0L);
      for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += it->second[k];
      ++hits;
    }
    if (hits == 0) return std::nullopt;
    for (auto& x : sum) x /= hits;
    return sum;
  };
  auto va = mean(a);
  auto vb = mean(b);
  if (!va || !vb) return std::nullopt;
  long double dot = 0, na = 0, nb = 0;
  for (std::size_t k = 0; k < va->size(); ++k) {
    dot += (*va)[k] * (*vb)[k];
    na += (*va)[k] * (*va)[k];
    nb += (*vb)[k] * (*vb)[k];
  }
  if (na == 0 || nb == 0) return std::nullopt;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("btsampler-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace bts_test
