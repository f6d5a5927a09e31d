#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hyperrec/random.hpp"

namespace hyperrec {

/// Walker/Vose alias table: O(n) build, O(1) draws from a fixed discrete
/// distribution given by nonnegative weights.
class AliasTable {
 public:
  AliasTable() = default;
  explicit AliasTable(std::span<const double> weights);

  std::size_t size() const { return prob_.size(); }
  bool empty() const { return prob_.empty(); }

  /// One engine draw per sample in the common case: the high 32 bits pick
  /// a column (unbiased multiply-shift with rejection), the low 32 bits
  /// decide between the column and its alias.
  template <class Gen = Engine>
  std::size_t sample(Gen& eng) const {
    const std::uint64_t n = prob_.size();
    for (;;) {
      const std::uint64_t x = eng();
      const std::uint64_t m = (x >> 32) * n;
      if ((m & 0xffffffffULL) < threshold_) continue;
      const std::size_t i = m >> 32;
      const double coin = static_cast<double>(x & 0xffffffffULL) * 0x1.0p-32;
      // Branch-free select; the coin is unpredictable by design.
      const std::size_t keep = coin < prob_[i];
      return keep * i + (1 - keep) * alias_[i];
    }
  }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
  std::uint64_t threshold_ = 0;  // (2^32 - n) mod n
};

}  // namespace hyperrec
