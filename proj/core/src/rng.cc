#include "covgeom/rng.h"

#include <cmath>
#include <numbers>

namespace covgeom {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

std::uint64_t Fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

double ToUnit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((std::uint64_t{hi} << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

}  // namespace

CounterRng::CounterRng(const RngSpec& spec) {
  const std::uint64_t k = SplitMix64(spec.seed) ^ Fnv1a(spec.stream);
  key_ = {static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
}

CounterRng::Block CounterRng::Philox(Block ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0],
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1],
           static_cast<std::uint32_t>(p0)};
  }
  return ctr;
}

CounterRng::Block CounterRng::Draw(std::uint64_t counter) const {
  return Philox({static_cast<std::uint32_t>(counter),
                 static_cast<std::uint32_t>(counter >> 32), 0u, 0u},
                key_);
}

double CounterRng::Uniform(std::uint64_t index) const {
  const Block b = Draw(index >> 1);
  return (index & 1) ? ToUnit(b[2], b[3]) : ToUnit(b[0], b[1]);
}

double CounterRng::Normal(std::uint64_t index) const {
  const Block b = Draw(index >> 1);
  const double radius = std::sqrt(-2.0 * std::log(ToUnit(b[0], b[1])));
  const double angle = 2.0 * std::numbers::pi * ToUnit(b[2], b[3]);
  return radius * ((index & 1) ? std::sin(angle) : std::cos(angle));
}

}  // namespace covgeom
