#pragma once

#include <cstdint>
#include <vector>

namespace acst {

// splitmix64: 64-bit state, identical output on every platform. std::
// distributions are implementation-defined, which would break byte-identical
// reports across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n). Modulo bias is negligible for the small n used here.
  std::uint64_t next_below(std::uint64_t n) { return n ? next() % n : 0; }

  std::uint8_t next_byte() { return static_cast<std::uint8_t>(next() & 0xff); }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[static_cast<std::size_t>(next_below(items.size()))];
  }

  std::vector<std::uint8_t> bytes(std::size_t n) {
    std::vector<std::uint8_t> out(n);
    std::size_t i = 0;
    while (i + 8 <= n) {
      const std::uint64_t v = next();
      for (int j = 0; j < 8; ++j) {
        out[i++] = static_cast<std::uint8_t>(v >> (8 * j));
      }
    }
    if (i < n) {
      const std::uint64_t v = next();
      for (int j = 0; i < n; ++j) {
        out[i++] = static_cast<std::uint8_t>(v >> (8 * j));
      }
    }
    return out;
  }

 private:
  std::uint64_t state_;
};

}  // namespace acst
