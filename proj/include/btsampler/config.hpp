#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "btsampler/difficulty.hpp"

namespace btsampler {

// Everything a pipeline run can be configured with. Config files are
// "key = value" lines; '#' starts a comment. Unknown keys are errors.
//
//   mu, rho, eta, s, w, n, seed, theta   sampling hyperparameters
//   marker                               subword marker suffix
//   lm_order, lm_k                       n-gram oracle order and add-k
struct RunConfig {
  SamplingConfig sampling;
  std::string marker = "@@";
  std::uint64_t lm_order = 3;
  double lm_k = 0.1;

  // Applies one key/value pair; throws UsageError for unknown keys or bad
  // values.
  void set(std::string_view key, std::string_view value);

  // Effective values as ordered key/value pairs. Unset optionals are
  // rendered as "auto".
  std::vector<std::pair<std::string, std::string>> entries() const;
};

void apply_config(std::istream& in, RunConfig& config,
                  std::string_view source = {});
void apply_config_file(const std::filesystem::path& path, RunConfig& config);

}  // namespace btsampler
