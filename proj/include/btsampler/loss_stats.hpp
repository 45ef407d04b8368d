#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace btsampler {

class Corpus;

inline constexpr std::string_view kLossFileHeader = "#btsampler-loss-v1";
inline constexpr std::string_view kReportHeader =
    "token\tfreq\tmean_loss\tstd_loss";

// One token occurrence and its prediction loss, in nats.
struct TokenLossRecord {
  std::size_t sentence_id = 0;
  std::size_t position = 0;
  std::string token;
  double loss = 0.0;

  friend bool operator==(const TokenLossRecord&,
                         const TokenLossRecord&) = default;
};

struct TokenStats {
  std::string token;
  std::size_t freq = 0;
  double mean_loss = 0.0;
  double std_loss = 0.0;  // population standard deviation

  friend bool operator==(const TokenStats&, const TokenStats&) = default;
};

// token -> TokenStats, iterated in byte-lexicographic token order.
class StatsTable {
 public:
  using Map = std::map<std::string, TokenStats, std::less<>>;

  void insert(TokenStats stats);
  const TokenStats* find(std::string_view token) const;
  std::size_t size() const noexcept { return rows_.size(); }
  bool empty() const noexcept { return rows_.empty(); }
  auto begin() const noexcept { return rows_.begin(); }
  auto end() const noexcept { return rows_.end(); }

  friend bool operator==(const StatsTable&, const StatsTable&) = default;

 private:
  Map rows_;
};

// Throws DataError naming the first record whose loss is negative or not
// finite. With a corpus attached, sentence ids, positions and tokens must
// also agree with it.
void validate_records(std::span<const TokenLossRecord> records,
                      const Corpus* corpus = nullptr);

// Per-token frequency, mean and population standard deviation. Each token's
// losses are summed in ascending order with Neumaier compensation, so the
// table is bit-identical for any permutation of `records`.
StatsTable aggregate(std::span<const TokenLossRecord> records);

struct StatsDiff {
  std::map<std::string, double, std::less<>> delta;  // retrained - base
  std::vector<std::string> missing_in_retrained;
  std::vector<std::string> missing_in_base;
};

StatsDiff diff_stats(const StatsTable& base, const StatsTable& retrained);

enum class ReportOrder { kMeanLossDesc, kFreqAsc };

// Rows ordered by `order`; ties broken by token.
std::vector<TokenStats> loss_report(const StatsTable& stats, ReportOrder order);

// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> x, std::span<const double> y);

// Loss-record files: "#btsampler-loss-v1" then
// sentence_id<TAB>position<TAB>token<TAB>loss per line.
std::vector<TokenLossRecord> read_loss_records(std::istream& in,
                                               std::string_view source = {});
std::vector<TokenLossRecord> read_loss_records(
    const std::filesystem::path& path);
void write_loss_records(std::ostream& out,
                        std::span<const TokenLossRecord> records);
void write_loss_records(const std::filesystem::path& path,
                        std::span<const TokenLossRecord> records);

void write_report(std::ostream& out, std::span<const TokenStats> rows);
StatsTable read_report(std::istream& in, std::string_view source = {});
StatsTable read_report(const std::filesystem::path& path);

// token, status, base_mean, retrained_mean, delta. Tokens present on one
// side only carry status missing_in_base / missing_in_retrained and "-" for
// the absent values.
void write_diff(std::ostream& out, const StatsTable& base,
                const StatsTable& retrained, const StatsDiff& diff);

}  // namespace btsampler
