#pragma once

// Test-only generators and brute-force oracles. Nothing here calls the
// library code path it is used to check.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "btsampler/context.hpp"
#include "btsampler/corpus.hpp"
#include "btsampler/difficulty.hpp"
#include "btsampler/loss_stats.hpp"

namespace bts_test {

// Token "w<rank>" drawn with probability proportional to 1/(rank+1)^exponent.
class ZipfVocabulary {
 public:
  ZipfVocabulary(std::size_t size, double exponent);
  std::string draw(std::mt19937_64& rng);

 private:
  std::vector<std::string> tokens_;
  std::discrete_distribution<std::size_t> dist_;
};

btsampler::Corpus zipf_corpus(std::size_t sentences, std::size_t min_len,
                              std::size_t max_len, ZipfVocabulary& vocab,
                              std::mt19937_64& rng);

// Uniform tokens t0..t(vocab-1).
btsampler::Corpus uniform_corpus(std::size_t sentences, std::size_t max_len,
                                 std::size_t vocab, std::mt19937_64& rng);

std::vector<btsampler::TokenLossRecord> random_records(std::size_t count,
                                                       std::size_t vocab,
                                                       std::mt19937_64& rng);

// Per-token freq / mean / population std by re-scanning the records once per
// distinct token, accumulating in long double.
struct BruteStats {
  std::size_t freq;
  long double mean;
  long double std;
};
std::map<std::string, BruteStats> brute_aggregate(
    const std::vector<btsampler::TokenLossRecord>& records);

// Rejection-sampling reference: visit all of `mono` in the seeded candidate order
// and keep sentences with a difficult token, scanning tokens linearly.
std::vector<std::size_t> rejection_diff_sampling(
    const std::vector<std::string>& difficult, const btsampler::Corpus& mono,
    std::size_t n, std::uint64_t seed);

// cos(mean(a), mean(b)) over in-vocabulary tokens; nullopt if undefined.
std::optional<long double> brute_cosine(
    const std::vector<std::string>& a, const std::vector<std::string>& b,
    const std::map<std::string, std::vector<double>>& table);

// Fresh scratch directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

std::string slurp(const std::filesystem::path& path);
void spit(const std::filesystem::path& path, const std::string& content);

}  // namespace bts_test
