#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "btsampler/loss_stats.hpp"

namespace btsampler {

inline constexpr std::string_view kDifficultyHeader = "#btsampler-difficulty-v1";

enum class Criterion { kFrequency, kMeanLoss, kMeanAndStd };

std::string_view to_string(Criterion c) noexcept;
Criterion parse_criterion(std::string_view name);

// Sampling hyperparameters with their standard defaults.
struct SamplingConfig {
  double mu = 5.0;          // mean-loss threshold
  double rho = 10.0;        // loss standard deviation threshold
  std::uint64_t eta = 5000; // frequency threshold
  double s = 0.75;          // context similarity threshold
  std::uint64_t w = 4;      // context window half-width
  std::optional<std::uint64_t> n;      // sample size; unset = bitext size
  std::uint64_t seed = 0;
  std::optional<double> theta;         // occurrence threshold; unset = mu

  double occurrence_threshold() const noexcept { return theta.value_or(mu); }
};

// Difficult tokens together with the rule that selected them.
struct DifficultySet {
  std::set<std::string, std::less<>> tokens;
  Criterion criterion = Criterion::kMeanLoss;
  double mu = 0.0;
  double rho = 0.0;
  std::uint64_t eta = 0;

  bool contains(std::string_view token) const { return tokens.contains(token); }
  std::size_t size() const noexcept { return tokens.size(); }
  bool empty() const noexcept { return tokens.empty(); }

  friend bool operator==(const DifficultySet&, const DifficultySet&) = default;
};

// A token occurrence in the bitext whose loss exceeds the occurrence
// threshold.
struct DifficultOccurrence {
  std::string token;
  std::size_t sentence_id = 0;
  std::size_t position = 0;
  double loss = 0.0;

  friend bool operator==(const DifficultOccurrence&,
                         const DifficultOccurrence&) = default;
};

// freq < eta
DifficultySet by_frequency(const StatsTable& stats, std::uint64_t eta);
// mean_loss > mu
DifficultySet by_mean_loss(const StatsTable& stats, double mu);
// mean_loss > mu and std_loss > rho
DifficultySet by_mean_and_std(const StatsTable& stats, double mu, double rho);

DifficultySet select_difficult(const StatsTable& stats, Criterion criterion,
                               const SamplingConfig& config);

// Records with loss > theta, in input order.
std::vector<DifficultOccurrence> difficult_occurrences(
    std::span<const TokenLossRecord> records, double theta);

// Header line carrying criterion and thresholds, then sorted tokens.
void write_difficulty(std::ostream& out, const DifficultySet& set);
void write_difficulty(const std::filesystem::path& path,
                      const DifficultySet& set);
DifficultySet read_difficulty(std::istream& in, std::string_view source = {});
DifficultySet read_difficulty(const std::filesystem::path& path);

}  // namespace btsampler
