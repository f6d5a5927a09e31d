#include "hyperrec/alias_table.hpp"

#include <numeric>

#include "hyperrec/error.hpp"

namespace hyperrec {

AliasTable::AliasTable(std::span<const double> weights) {
  const std::size_t n = weights.size();
  if (n == 0) throw ValidationError("alias table needs at least one weight");
  if (n > 0xffffffffULL) throw ValidationError("alias table supports at most 2^32 - 1 weights");
  threshold_ = (0x100000000ULL - n) % n;
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw ValidationError("alias table weights must have a positive sum");

  prob_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    if (weights[i] < 0.0) throw ValidationError("alias table weights must be nonnegative");
    scaled[i] = weights[i] * static_cast<double>(n) / total;
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const auto s = small.back();
    small.pop_back();
    const auto l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  // Leftovers are 1 up to round-off.
  for (auto i : large) { prob_[i] = 1.0; alias_[i] = i; }
  for (auto i : small) { prob_[i] = 1.0; alias_[i] = i; }
}

}  // namespace hyperrec
