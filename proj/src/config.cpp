#include "btsampler/config.hpp"

#include <fstream>
#include <istream>

#include "btsampler/error.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

namespace {

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r";
  auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

template <class F>
auto as_usage(std::string_view key, F&& parse) {
  try {
    return parse();
  } catch (const DataError& e) {
    throw UsageError("config key '" + std::string(key) + "': " + e.what());
  }
}

}  // namespace

void RunConfig::set(std::string_view key, std::string_view value) {
  auto real = [&] { return as_usage(key, [&] { return parse_real(value, key); }); };
  auto count = [&] { return as_usage(key, [&] { return parse_count(value, key); }); };
  const bool is_auto = value == "auto";

  if (key == "mu") {
    sampling.mu = real();
  } else if (key == "rho") {
    sampling.rho = real();
  } else if (key == "eta") {
    sampling.eta = count();
    if (sampling.eta == 0) throw UsageError("eta must be positive");
  } else if (key == "s") {
    sampling.s = real();
    if (sampling.s < -1.0 || sampling.s > 1.0) {
      throw UsageError("s must lie in [-1, 1]");
    }
  } else if (key == "w") {
    sampling.w = count();
    if (sampling.w == 0) throw UsageError("w must be positive");
  } else if (key == "n") {
    if (is_auto) {
      sampling.n.reset();
    } else {
      sampling.n = count();
      if (*sampling.n == 0) throw UsageError("n must be positive");
    }
  } else if (key == "seed") {
    sampling.seed = count();
  } else if (key == "theta") {
    if (is_auto) {
      sampling.theta.reset();
    } else {
      sampling.theta = real();
    }
  } else if (key == "marker") {
    if (value.empty() || value.find_first_of(" \t") != std::string_view::npos) {
      throw UsageError("marker must be non-empty and free of whitespace");
    }
    marker = std::string(value);
  } else if (key == "lm_order") {
    lm_order = count();
    if (lm_order == 0) throw UsageError("lm_order must be >= 1");
  } else if (key == "lm_k") {
    lm_k = real();
    if (!(lm_k > 0.0)) throw UsageError("lm_k must be > 0");
  } else {
    throw UsageError("unknown config key '" + std::string(key) + "'");
  }
}

std::vector<std::pair<std::string, std::string>> RunConfig::entries() const {
  return {
      {"mu", format_real(sampling.mu)},
      {"rho", format_real(sampling.rho)},
      {"eta", std::to_string(sampling.eta)},
      {"s", format_real(sampling.s)},
      {"w", std::to_string(sampling.w)},
      {"n", sampling.n ? std::to_string(*sampling.n) : "auto"},
      {"seed", std::to_string(sampling.seed)},
      {"theta", sampling.theta ? format_real(*sampling.theta) : "auto"},
      {"marker", marker},
      {"lm_order", std::to_string(lm_order)},
      {"lm_k", format_real(lm_k)},
  };
}

void apply_config(std::istream& in, RunConfig& config, std::string_view source) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view text = line;
    if (auto hash = text.find('#'); hash != std::string_view::npos) {
      text = text.substr(0, hash);
    }
    text = trim(text);
    if (text.empty()) continue;
    auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(std::string(source) + ":" + std::to_string(line_no) +
                       ": expected 'key = value'");
    }
    try {
      config.set(trim(text.substr(0, eq)), trim(text.substr(eq + 1)));
    } catch (const UsageError& e) {
      throw UsageError(std::string(source) + ":" + std::to_string(line_no) +
                       ": " + e.what());
    }
  }
}

void apply_config_file(const std::filesystem::path& path, RunConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config '" + path.string() + "'");
  apply_config(in, config, path.string());
}

}  // namespace btsampler
