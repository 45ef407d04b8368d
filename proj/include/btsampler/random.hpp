#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace btsampler {

// Every random decision in the library is a pure function of (seed, stream,
// item id). An item's draw rank is its keyed SplitMix64 priority; ascending
// priority (ties by id) is the order in which items are drawn without
// replacement. The scheme is integer-only and therefore identical on every
// platform.
inline constexpr std::string_view kGeneratorName = "splitmix64-priority-v1";

// Named streams so that independent decisions under one seed never share
// draws.
enum class Stream : std::uint64_t {
  kCandidates = 1,    // sampler candidate order
  kMixSelect = 2,     // synthetic pair selection in mix
  kMixShuffle = 3,    // epoch shuffle base; epoch e uses kMixShuffle + e
};

// SplitMix64 output function applied to x (Steele, Lea & Flood 2014).
std::uint64_t mix64(std::uint64_t x) noexcept;

// Key for one named stream under a user seed.
std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept;
inline std::uint64_t stream_key(std::uint64_t seed, Stream stream) noexcept {
  return stream_key(seed, static_cast<std::uint64_t>(stream));
}

// Draw rank of item `id` under `key`. Lower draws first.
std::uint64_t priority(std::uint64_t key, std::uint64_t id) noexcept;

// `ids` reordered by ascending (priority, id).
std::vector<std::size_t> draw_order(std::span<const std::size_t> ids,
                                    std::uint64_t key);

// The first `n` items of draw_order(ids, key), computed without sorting
// the whole range.
std::vector<std::size_t> draw_first(std::span<const std::size_t> ids,
                                    std::uint64_t key, std::size_t n);

}  // namespace btsampler
