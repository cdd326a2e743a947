#pragma once

// Counter-based random numbers (Philox4x32-10). Every draw is a pure
// function of (seed, stream label, draw index), so sampling can be split
// across rows or threads without changing a single bit of the output.

#include <array>
#include <cstdint>
#include <string>

namespace covgeom {

struct RngSpec {
  std::uint64_t seed = 0;
  std::string stream;
};

class CounterRng {
 public:
  using Block = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit CounterRng(const RngSpec& spec);

  /// Raw Philox4x32-10 bijection.
  static Block Philox(Block counter, Key key);

  /// Four 32-bit words for the given block counter.
  Block Draw(std::uint64_t counter) const;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double Uniform(std::uint64_t index) const;

  /// Standard normal (Box-Muller on one block; indices 2k and 2k+1 share it).
  double Normal(std::uint64_t index) const;

  const Key& key() const { return key_; }

 private:
  Key key_;
};

}  // namespace covgeom
