#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace treeload {

using Philox4x64Block = std::array<std::uint64_t, 4>;
using Philox4x64Key = std::array<std::uint64_t, 2>;

// Philox4x64-10 block function (Salmon et al., Random123).
Philox4x64Block philox4x64(Philox4x64Block counter, Philox4x64Key key);

std::uint64_t splitmix64(std::uint64_t x);

struct RngSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;
};

// Counter-mode generator. Stream (seed, id) uses key {seed, splitmix64(id)}
// and counters 0, 1, 2, ... with the four output words consumed in order.
class Philox4x64 {
 public:
  using result_type = std::uint64_t;

  explicit Philox4x64(RngSpec spec);
  Philox4x64(Philox4x64Key key, Philox4x64Block counter);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (index_ == 4) refill();
    return buffer_[index_++];
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, bound) by multiply-shift with rejection.
  std::uint64_t uniform_below(std::uint64_t bound);

 private:
  void refill();

  Philox4x64Key key_;
  Philox4x64Block counter_;
  Philox4x64Block buffer_{};
  int index_ = 4;
};

}  // namespace treeload
