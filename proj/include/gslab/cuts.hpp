#pragma once

// Gray-code walk over the nonempty subsets of a region, maintaining the
// boundary sum  sum_{f in dB} w_f  in O(degree) per step.

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "gslab/error.hpp"
#include "gslab/lattice.hpp"

namespace gslab {

inline constexpr std::size_t kMaxSubsetRegion = 24;

struct CutNeighbor {
  double w;
  int bit;  // region position of the other endpoint, -1 when outside the region
};

class CutWalker {
 public:
  /// Weights are indexed by lattice edge. Sums are resynchronized from scratch
  /// every kResync steps so rounding does not accumulate over 2^24 updates.
  CutWalker(const Lattice& lattice, const Region& region, std::span<const double> w,
            std::size_t cap = kMaxSubsetRegion)
      : members_(region.members().begin(), region.members().end()) {
    if (region.size() > cap) {
      throw SizingError("subset enumeration over " + std::to_string(region.size()) + " vertices exceeds cap " +
                        std::to_string(cap));
    }
    if (region.empty()) throw StructuralError("subset enumeration needs a nonempty region");
    adj_.resize(region.size());
    const auto members = region.members();
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (EdgeId f : lattice.incident(members[i])) {
        const auto j = region.index_of(lattice.other(f, members[i]));
        adj_[i].push_back({w[f], j ? static_cast<int>(*j) : -1});
      }
    }
  }

  std::size_t size() const { return adj_.size(); }

  /// Boundary sum of the subset encoded by mask, computed directly.
  double sum(std::uint32_t mask) const {
    double s = 0.0;
    for (std::size_t i = 0; i < adj_.size(); ++i) {
      if (!(mask >> i & 1U)) continue;
      for (const auto& nb : adj_[i])
        if (nb.bit < 0 || !(mask >> nb.bit & 1U)) s += nb.w;
    }
    return s;
  }

  /// Calls visit(mask, boundary_sum) for every nonempty subset, in Gray-code order.
  template <class Visit>
  void for_each(Visit&& visit) const {
    const std::uint64_t total = std::uint64_t{1} << adj_.size();
    std::uint32_t mask = 0;
    double s = 0.0;
    for (std::uint64_t i = 1; i < total; ++i) {
      const int bit = std::countr_zero(i);
      const bool adding = !(mask >> bit & 1U);
      double d = 0.0;
      for (const auto& nb : adj_[bit]) {
        const bool other_in = nb.bit >= 0 && (mask >> nb.bit & 1U);
        d += other_in ? -nb.w : nb.w;
      }
      mask ^= 1U << bit;
      s += adding ? d : -d;
      if ((i & (kResync - 1)) == 0) s = sum(mask);
      visit(mask, s);
    }
  }

  /// Region vertices selected by mask.
  std::vector<VertexId> members(std::uint32_t mask) const {
    std::vector<VertexId> out;
    for (std::size_t i = 0; i < members_.size(); ++i)
      if (mask >> i & 1U) out.push_back(members_[i]);
    return out;
  }

 private:
  static constexpr std::uint64_t kResync = 4096;
  std::vector<VertexId> members_;
  std::vector<std::vector<CutNeighbor>> adj_;
};

}  // namespace gslab
