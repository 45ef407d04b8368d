#include "btsampler/loss_stats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <unordered_map>

#include "btsampler/corpus.hpp"
#include "btsampler/error.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

void StatsTable::insert(TokenStats stats) {
  std::string key = stats.token;
  auto [it, inserted] = rows_.emplace(std::move(key), std::move(stats));
  if (!inserted) throw DataError("duplicate token in stats table: " + it->first);
}

const TokenStats* StatsTable::find(std::string_view token) const {
  auto it = rows_.find(token);
  return it == rows_.end() ? nullptr : &it->second;
}

namespace {

std::string describe(const TokenLossRecord& r, std::size_t index) {
  return "record " + std::to_string(index) + " (sentence " +
         std::to_string(r.sentence_id) + ", position " +
         std::to_string(r.position) + ", token '" + r.token + "')";
}

// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace

void validate_records(std::span<const TokenLossRecord> records,
                      const Corpus* corpus) {
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!std::isfinite(r.loss)) {
      throw DataError(describe(r, i) + " has non-finite loss");
    }
    if (r.loss < 0.0) {
      throw DataError(describe(r, i) + " has negative loss " +
                      format_real(r.loss));
    }
    if (corpus == nullptr) continue;
    if (r.sentence_id >= corpus->size()) {
      throw DataError(describe(r, i) + " references unknown sentence");
    }
    const Sentence& s = (*corpus)[r.sentence_id];
    if (r.position >= s.size()) {
      throw DataError(describe(r, i) + " position beyond sentence length " +
                      std::to_string(s.size()));
    }
    if (s.tokens[r.position] != r.token) {
      throw DataError(describe(r, i) + " disagrees with corpus token '" +
                      s.tokens[r.position] + "'");
    }
  }
}

StatsTable aggregate(std::span<const TokenLossRecord> records) {
  if (records.empty()) throw UsageError("aggregate: no loss records");
  validate_records(records);

  // Each token's losses are summed in ascending order, which makes the
  // result independent of record order as well as deterministic.
  std::unordered_map<std::string_view, std::vector<double>> losses;
  for (const auto& r : records) losses[r.token].push_back(r.loss);

  StatsTable table;
  for (auto& [tok, v] : losses) {
    std::sort(v.begin(), v.end());
    CompensatedSum sum;
    for (double x : v) sum.add(x);
    const double n = static_cast<double>(v.size());
    const double mean = sum.value() / n;
    CompensatedSum sq_dev;
    for (double x : v) sq_dev.add((x - mean) * (x - mean));

    TokenStats st;
    st.token = std::string(tok);
    st.freq = v.size();
    st.mean_loss = mean;
    st.std_loss = v.size() == 1 ? 0.0 : std::sqrt(sq_dev.value() / n);
    table.insert(std::move(st));
  }
  return table;
}

StatsDiff diff_stats(const StatsTable& base, const StatsTable& retrained) {
  StatsDiff diff;
  for (const auto& [tok, st] : base) {
    if (const TokenStats* r = retrained.find(tok)) {
      diff.delta.emplace(tok, r->mean_loss - st.mean_loss);
    } else {
      diff.missing_in_retrained.push_back(tok);
    }
  }
  for (const auto& [tok, st] : retrained) {
    if (!base.find(tok)) diff.missing_in_base.push_back(tok);
  }
  return diff;
}

std::vector<TokenStats> loss_report(const StatsTable& stats,
                                    ReportOrder order) {
  if (stats.empty()) throw UsageError("loss_report: empty stats table");
  std::vector<TokenStats> rows;
  rows.reserve(stats.size());
  for (const auto& [tok, st] : stats) rows.push_back(st);
  // rows are already in token order; stable_sort keeps it for ties
  if (order == ReportOrder::kMeanLossDesc) {
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
      return a.mean_loss > b.mean_loss;
    });
  } else {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.freq < b.freq; });
  }
  return rows;
}

namespace {

std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw UsageError("spearman: need two equal-length samples of size >= 2");
  }
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  const double n = static_cast<double>(x.size());
  const double mean = (n + 1.0) / 2.0;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    const double dx = rx[i] - mean;
    const double dy = ry[i] - mean;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

namespace {

std::string where(std::string_view source, std::size_t line) {
  std::string s = source.empty() ? std::string("<stream>") : std::string(source);
  return s + ":" + std::to_string(line);
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

}  // namespace

std::vector<TokenLossRecord> read_loss_records(std::istream& in,
                                               std::string_view source) {
  std::string line;
  if (!std::getline(in, line) || line != kLossFileHeader) {
    throw DataError(where(source, 1) + ": missing header '" +
                    std::string(kLossFileHeader) + "'");
  }
  std::vector<TokenLossRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 4) {
      throw DataError(where(source, line_no) + ": expected 4 tab-separated fields");
    }
    if (f[2].empty()) throw DataError(where(source, line_no) + ": empty token");
    TokenLossRecord r;
    try {
      r.sentence_id = parse_count(f[0], "sentence_id");
      r.position = parse_count(f[1], "position");
      r.token = std::string(f[2]);
      r.loss = parse_real(f[3], "loss");
    } catch (const DataError& e) {
      throw DataError(where(source, line_no) + ": " + e.what());
    }
    if (!std::isfinite(r.loss) || r.loss < 0.0) {
      throw DataError(where(source, line_no) +
                      ": loss must be finite and non-negative");
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<TokenLossRecord> read_loss_records(
    const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_loss_records(in, path.string());
}

void write_loss_records(std::ostream& out,
                        std::span<const TokenLossRecord> records) {
  out << kLossFileHeader << '\n';
  for (const auto& r : records) {
    out << r.sentence_id << '\t' << r.position << '\t' << r.token << '\t'
        << format_real(r.loss) << '\n';
  }
}

void write_loss_records(const std::filesystem::path& path,
                        std::span<const TokenLossRecord> records) {
  auto out = open_out(path);
  write_loss_records(out, records);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void write_report(std::ostream& out, std::span<const TokenStats> rows) {
  out << kReportHeader << '\n';
  for (const auto& r : rows) {
    out << r.token << '\t' << r.freq << '\t' << format_real(r.mean_loss) << '\t'
        << format_real(r.std_loss) << '\n';
  }
}

StatsTable read_report(std::istream& in, std::string_view source) {
  std::string line;
  if (!std::getline(in, line) || line != kReportHeader) {
    throw DataError(where(source, 1) + ": missing report header");
  }
  StatsTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto f = split(line, '\t');
    if (f.size() != 4 || f[0].empty()) {
      throw DataError(where(source, line_no) + ": expected 4 tab-separated fields");
    }
    try {
      TokenStats st;
      st.token = std::string(f[0]);
      st.freq = parse_count(f[1], "freq");
      st.mean_loss = parse_real(f[2], "mean_loss");
      st.std_loss = parse_real(f[3], "std_loss");
      if (st.freq == 0) throw DataError("freq must be positive");
      table.insert(std::move(st));
    } catch (const DataError& e) {
      throw DataError(where(source, line_no) + ": " + e.what());
    }
  }
  return table;
}

StatsTable read_report(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_report(in, path.string());
}

void write_diff(std::ostream& out, const StatsTable& base,
                const StatsTable& retrained, const StatsDiff& diff) {
  out << "token\tstatus\tbase_mean\tretrained_mean\tdelta\n";
  for (const auto& [tok, d] : diff.delta) {
    out << tok << "\tboth\t" << format_real(base.find(tok)->mean_loss) << '\t'
        << format_real(retrained.find(tok)->mean_loss) << '\t' << format_real(d)
        << '\n';
  }
  for (const auto& tok : diff.missing_in_retrained) {
    out << tok << "\tmissing_in_retrained\t"
        << format_real(base.find(tok)->mean_loss) << "\t-\t-\n";
  }
  for (const auto& tok : diff.missing_in_base) {
    out << tok << "\tmissing_in_base\t-\t"
        << format_real(retrained.find(tok)->mean_loss) << "\t-\n";
  }
}

}  // namespace btsampler
