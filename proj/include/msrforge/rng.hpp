#pragma once

#include <cstdint>
#include <random>

namespace msrforge {

// Seeded deterministic generator. mt19937_64's output sequence is fixed by
// the standard, so equal seeds give equal streams on every platform.
class rng {
 public:
  explicit rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  // draw in [0, n); the modulo bias is irrelevant for search/simulation use
  std::uint32_t below(std::uint32_t n) {
    return n == 0 ? 0 : static_cast<std::uint32_t>(eng_() % n);
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace msrforge
