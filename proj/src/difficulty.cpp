#include "btsampler/difficulty.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "btsampler/error.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

std::string_view to_string(Criterion c) noexcept {
  switch (c) {
    case Criterion::kFrequency:
      return "freq";
    case Criterion::kMeanLoss:
      return "mean_loss";
    case Criterion::kMeanAndStd:
      return "mean_and_std";
  }
  return "unknown";
}

Criterion parse_criterion(std::string_view name) {
  if (name == "freq") return Criterion::kFrequency;
  if (name == "mean_loss" || name == "mean-loss") return Criterion::kMeanLoss;
  if (name == "mean_and_std" || name == "mean-std" || name == "mean-and-std") {
    return Criterion::kMeanAndStd;
  }
  throw UsageError("unknown difficulty criterion '" + std::string(name) + "'");
}

DifficultySet by_frequency(const StatsTable& stats, std::uint64_t eta) {
  if (eta == 0) throw UsageError("by_frequency: eta must be positive");
  DifficultySet set;
  set.criterion = Criterion::kFrequency;
  set.eta = eta;
  for (const auto& [tok, st] : stats) {
    if (st.freq < eta) set.tokens.insert(tok);
  }
  return set;
}

DifficultySet by_mean_loss(const StatsTable& stats, double mu) {
  DifficultySet set;
  set.criterion = Criterion::kMeanLoss;
  set.mu = mu;
  for (const auto& [tok, st] : stats) {
    if (st.mean_loss > mu) set.tokens.insert(tok);
  }
  return set;
}

DifficultySet by_mean_and_std(const StatsTable& stats, double mu, double rho) {
  DifficultySet set;
  set.criterion = Criterion::kMeanAndStd;
  set.mu = mu;
  set.rho = rho;
  for (const auto& [tok, st] : stats) {
    if (st.mean_loss > mu && st.std_loss > rho) set.tokens.insert(tok);
  }
  return set;
}

DifficultySet select_difficult(const StatsTable& stats, Criterion criterion,
                               const SamplingConfig& config) {
  switch (criterion) {
    case Criterion::kFrequency:
      return by_frequency(stats, config.eta);
    case Criterion::kMeanLoss:
      return by_mean_loss(stats, config.mu);
    case Criterion::kMeanAndStd:
      return by_mean_and_std(stats, config.mu, config.rho);
  }
  throw UsageError("invalid criterion");
}

std::vector<DifficultOccurrence> difficult_occurrences(
    std::span<const TokenLossRecord> records, double theta) {
  std::vector<DifficultOccurrence> out;
  for (const auto& r : records) {
    if (r.loss > theta) {
      out.push_back({r.token, r.sentence_id, r.position, r.loss});
    }
  }
  return out;
}

void write_difficulty(std::ostream& out, const DifficultySet& set) {
  out << kDifficultyHeader << "\tcriterion=" << to_string(set.criterion);
  switch (set.criterion) {
    case Criterion::kFrequency:
      out << "\teta=" << set.eta;
      break;
    case Criterion::kMeanLoss:
      out << "\tmu=" << format_real(set.mu);
      break;
    case Criterion::kMeanAndStd:
      out << "\tmu=" << format_real(set.mu) << "\trho=" << format_real(set.rho);
      break;
  }
  out << '\n';
  for (const auto& tok : set.tokens) out << tok << '\n';
}

void write_difficulty(const std::filesystem::path& path,
                      const DifficultySet& set) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_difficulty(out, set);
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

DifficultySet read_difficulty(std::istream& in, std::string_view source) {
  const std::string where =
      source.empty() ? std::string("<stream>") : std::string(source);
  std::string line;
  if (!std::getline(in, line)) throw DataError(where + ": empty difficulty file");
  auto fields = split(line, '\t');
  if (fields.front() != kDifficultyHeader) {
    throw DataError(where + ":1: missing header '" +
                    std::string(kDifficultyHeader) + "'");
  }
  DifficultySet set;
  bool have_criterion = false;
  for (std::size_t i = 1; i < fields.size(); ++i) {
    auto eq = fields[i].find('=');
    if (eq == std::string_view::npos) {
      throw DataError(where + ":1: malformed header field '" +
                      std::string(fields[i]) + "'");
    }
    auto key = fields[i].substr(0, eq);
    auto value = fields[i].substr(eq + 1);
    if (key == "criterion") {
      try {
        set.criterion = parse_criterion(value);
      } catch (const UsageError& e) {
        throw DataError(where + ":1: " + e.what());
      }
      have_criterion = true;
    } else if (key == "mu") {
      set.mu = parse_real(value, "mu");
    } else if (key == "rho") {
      set.rho = parse_real(value, "rho");
    } else if (key == "eta") {
      set.eta = parse_count(value, "eta");
    } else {
      throw DataError(where + ":1: unknown header field '" + std::string(key) +
                      "'");
    }
  }
  if (!have_criterion) throw DataError(where + ":1: header lacks criterion");
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line.find_first_of(" \t\r") != std::string::npos) {
      throw DataError(where + ":" + std::to_string(line_no) +
                      ": token contains whitespace");
    }
    set.tokens.insert(line);
  }
  return set;
}

DifficultySet read_difficulty(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_difficulty(in, path.string());
}

}  // namespace btsampler
