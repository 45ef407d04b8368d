#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "btsampler/corpus.hpp"

namespace btsampler {

// real:synthetic proportion, e.g. 1:4.
struct MixRatio {
  std::uint64_t real_part = 1;
  std::uint64_t syn_part = 1;

  static MixRatio parse(std::string_view text);
  std::string str() const;
};

// Line-aligned source/target corpora.
struct Bitext {
  Corpus source;
  Corpus target;

  static Bitext load(const std::filesystem::path& source_path,
                     const std::filesystem::path& target_path,
                     const SubwordConvention& convention = {});
  std::size_t size() const noexcept { return source.size(); }
  void validate() const;  // DataError when line counts differ
};

struct MixEntry {
  bool synthetic = false;
  std::size_t index = 0;  // line in the real or synthetic bitext

  friend bool operator==(const MixEntry&, const MixEntry&) = default;
};

struct MixResult {
  std::vector<MixEntry> pairs;  // in shuffled output order
  std::size_t real_count = 0;
  std::size_t synthetic_required = 0;
  std::size_t synthetic_count = 0;
  bool short_supply = false;
  std::string warning;
};

// All real pairs plus floor(|real| * syn_part / real_part) synthetic pairs
// drawn without replacement, shuffled by (seed, epoch).
MixResult mix(const Bitext& real, const Bitext& synthetic, MixRatio ratio,
              std::uint64_t seed, std::uint64_t epoch = 0);

void write_mix(const std::filesystem::path& source_out,
               const std::filesystem::path& target_out, const MixResult& result,
               const Bitext& real, const Bitext& synthetic);

}  // namespace btsampler
