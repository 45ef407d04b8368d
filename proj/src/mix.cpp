#include "btsampler/mix.hpp"

#include <limits>

#include "btsampler/error.hpp"
#include "btsampler/random.hpp"
#include "btsampler/text_io.hpp"

namespace btsampler {

MixRatio MixRatio::parse(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) {
    throw UsageError("ratio must look like REAL:SYN, got '" + std::string(text) + "'");
  }
  MixRatio r;
  try {
    r.real_part = parse_count(parts[0], "real part");
    r.syn_part = parse_count(parts[1], "synthetic part");
  } catch (const DataError& e) {
    throw UsageError(e.what());
  }
  if (r.real_part == 0 || r.syn_part == 0) {
    throw UsageError("both ratio parts must be >= 1");
  }
  return r;
}

std::string MixRatio::str() const {
  return std::to_string(real_part) + ":" + std::to_string(syn_part);
}

Bitext Bitext::load(const std::filesystem::path& source_path,
                    const std::filesystem::path& target_path,
                    const SubwordConvention& convention) {
  Bitext b{Corpus::load(source_path, convention),
           Corpus::load(target_path, convention)};
  b.validate();
  return b;
}

void Bitext::validate() const {
  if (source.size() != target.size()) {
    throw DataError("misaligned bitext: " + std::to_string(source.size()) +
                    " source lines vs " + std::to_string(target.size()) +
                    " target lines");
  }
}

MixResult mix(const Bitext& real, const Bitext& synthetic, MixRatio ratio,
              std::uint64_t seed, std::uint64_t epoch) {
  real.validate();
  synthetic.validate();
  if (ratio.real_part == 0 || ratio.syn_part == 0) {
    throw UsageError("both ratio parts must be >= 1");
  }
  MixResult result;
  result.real_count = real.size();
  if (real.size() != 0 &&
      ratio.syn_part > std::numeric_limits<std::uint64_t>::max() / real.size()) {
    throw UsageError("mix: ratio " + ratio.str() + " overflows the pair count");
  }
  result.synthetic_required = real.size() * ratio.syn_part / ratio.real_part;

  std::vector<std::size_t> syn_ids(synthetic.size());
  for (std::size_t i = 0; i < syn_ids.size(); ++i) syn_ids[i] = i;
  const auto chosen = draw_first(syn_ids, stream_key(seed, Stream::kMixSelect),
                                 result.synthetic_required);
  result.synthetic_count = chosen.size();
  if (chosen.size() < result.synthetic_required) {
    result.short_supply = true;
    result.warning = "mix: ratio " + ratio.str() + " needs " +
                     std::to_string(result.synthetic_required) +
                     " synthetic pairs but only " +
                     std::to_string(chosen.size()) + " are available; using all";
  }

  std::vector<MixEntry> pool;
  pool.reserve(real.size() + chosen.size());
  for (std::size_t i = 0; i < real.size(); ++i) pool.push_back({false, i});
  for (std::size_t i : chosen) pool.push_back({true, i});

  std::vector<std::size_t> slots(pool.size());
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = i;
  const auto key = stream_key(
      seed, static_cast<std::uint64_t>(Stream::kMixShuffle) + epoch);
  for (std::size_t slot : draw_order(slots, key)) result.pairs.push_back(pool[slot]);
  return result;
}

void write_mix(const std::filesystem::path& source_out,
               const std::filesystem::path& target_out, const MixResult& result,
               const Bitext& real, const Bitext& synthetic) {
  std::string src, tgt;
  for (const auto& e : result.pairs) {
    const Bitext& b = e.synthetic ? synthetic : real;
    src += Corpus::join(b.source.at(e.index));
    src += '\n';
    tgt += Corpus::join(b.target.at(e.index));
    tgt += '\n';
  }
  write_file(source_out, src);
  write_file(target_out, tgt);
}

}  // namespace btsampler
