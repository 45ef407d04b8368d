#include "btsampler/random.hpp"

#include <algorithm>

namespace btsampler {

std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) noexcept {
  return mix64(mix64(seed) ^ (stream * 0xd1b54a32d192ed03ULL));
}

std::uint64_t priority(std::uint64_t key, std::uint64_t id) noexcept {
  return mix64(key ^ mix64(id));
}

namespace {

struct Keyed {
  std::uint64_t prio;
  std::size_t id;
  bool operator<(const Keyed& o) const noexcept {
    return prio != o.prio ? prio < o.prio : id < o.id;
  }
};

std::vector<Keyed> keyed(std::span<const std::size_t> ids, std::uint64_t key) {
  std::vector<Keyed> out;
  out.reserve(ids.size());
  for (std::size_t id : ids) out.push_back({priority(key, id), id});
  return out;
}

std::vector<std::size_t> strip(const std::vector<Keyed>& k, std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(k[i].id);
  return out;
}

}  // namespace

std::vector<std::size_t> draw_order(std::span<const std::size_t> ids,
                                    std::uint64_t key) {
  auto k = keyed(ids, key);
  std::sort(k.begin(), k.end());
  return strip(k, k.size());
}

std::vector<std::size_t> draw_first(std::span<const std::size_t> ids,
                                    std::uint64_t key, std::size_t n) {
  auto k = keyed(ids, key);
  n = std::min(n, k.size());
  std::partial_sort(k.begin(), k.begin() + static_cast<std::ptrdiff_t>(n),
                    k.end());
  return strip(k, n);
}

}  // namespace btsampler
