#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/cuts.hpp"
#include "gslab/error.hpp"
#include "gslab/groundstate.hpp"
#include "gslab/lattice.hpp"
#include "gslab/spins.hpp"

namespace gslab {

inline constexpr int kBisectionSteps = 60;
inline constexpr std::size_t kMaxDropletCandidates = 4096;

struct SuperSatisfied {
  double s = 0.0;    // min of the two endpoint values
  double s_x = 0.0;  // first (lower-index) endpoint
  double s_y = 0.0;
  bool flag = false;  // |J_e| > S_e
};

/// S_e^x = sum of |J_f| over the other edges f at endpoint x.
inline SuperSatisfied super_satisfied_values(const CouplingConfig& j, EdgeId e) {
  const Lattice& lat = j.lattice();
  const auto [x, y] = lat.endpoints(e);
  auto side = [&](VertexId v) {
    double s = 0.0;
    for (EdgeId f : lat.incident(v))
      if (f != e) s += std::abs(j[f]);
    return s;
  };
  SuperSatisfied r{0.0, side(x), side(y), false};
  r.s = std::min(r.s_x, r.s_y);
  r.flag = std::abs(j[e]) > r.s;
  return r;
}

/// Endpoint-specific value S_e^v.
inline double super_satisfied_at(const CouplingConfig& j, EdgeId e, VertexId v) {
  const auto ss = super_satisfied_values(j, e);
  const auto [x, y] = j.lattice().endpoints(e);
  if (v == x) return ss.s_x;
  if (v == y) return ss.s_y;
  throw StructuralError("vertex is not an endpoint of the edge");
}

struct EdgeAnalysis {
  double ground_min = 0.0;  // min over all nonempty B of the boundary sum
  double flexibility = 0.0;
  double critical = 0.0;
  std::vector<std::vector<VertexId>> droplets;  // canonical representatives
  bool truncated = false;                       // more minimizers than kMaxDropletCandidates
};

namespace detail {

inline std::vector<double> bond_weights(const CouplingConfig& j, const SpinConfig& sigma) {
  std::vector<double> w(j.lattice().num_edges());
  for (EdgeId f = 0; f < w.size(); ++f) w[f] = j[f] * sigma.bond(f);
  return w;
}

inline std::pair<std::uint32_t, std::uint32_t> endpoint_bits(const Lattice& lat, EdgeId e, const Region& region) {
  lat.check_edge(e);
  const auto [a, b] = lat.endpoints(e);
  const auto ia = region.index_of(a), ib = region.index_of(b);
  if (!ia && !ib) throw StructuralError("edge has no endpoint in the region");
  return {ia ? 1U << *ia : 0U, ib ? 1U << *ib : 0U};
}

}  // namespace detail

/// One subset walk computing the ground-state margin, the flexibility, the
/// critical value and the critical droplets of e.
inline EdgeAnalysis analyze_edge(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  check_same_lattice(j, sigma);
  const Lattice& lat = j.lattice();
  const auto [ma, mb] = detail::endpoint_bits(lat, e, region);
  // Walk with J_e zeroed: the objective of the critical value. The bond term of e
  // is added back for the ground-state margin and the flexibility.
  auto w = detail::bond_weights(j, sigma);
  const double we = w[e];
  w[e] = 0.0;
  CutWalker walker(lat, region, w);

  double ground = std::numeric_limits<double>::infinity();
  double other = ground;
  std::vector<std::pair<double, std::uint32_t>> cand;
  bool truncated = false;
  walker.for_each([&](std::uint32_t mask, double s) {
    const bool cut = static_cast<bool>(mask & ma) != static_cast<bool>(mask & mb);
    ground = std::min(ground, cut ? s + we : s);
    if (!cut || s > other + tol::slack) return;
    other = std::min(other, s);
    cand.emplace_back(s, mask);
    if (cand.size() > 2 * kMaxDropletCandidates) {
      std::erase_if(cand, [&](const auto& c) { return c.first > other + tol::slack; });
      if (cand.size() > kMaxDropletCandidates) {
        cand.resize(kMaxDropletCandidates);
        truncated = true;
      }
    }
  });

  EdgeAnalysis out;
  std::uint32_t best_mask = 0;
  double best_exact = std::numeric_limits<double>::infinity();
  for (const auto& [s, mask] : cand) {
    if (s > other + tol::slack) continue;
    const double exact = walker.sum(mask);
    if (exact < best_exact) {
      best_exact = exact;
      best_mask = mask;
    }
  }
  const double other_exact = walker.sum(best_mask);
  out.critical = -other_exact * sigma.bond(e);
  out.flexibility = other_exact + we;
  out.ground_min = ground;
  out.truncated = truncated;

  // A and region \ A share a boundary exactly when nothing leaves the region.
  const bool closed = boundary_edges(lat, region).empty();
  const std::uint32_t all = static_cast<std::uint32_t>((std::uint64_t{1} << region.size()) - 1);
  std::vector<std::uint32_t> reps;
  for (const auto& [s, mask] : cand) {
    if (walker.sum(mask) > other_exact + tol::slack) continue;
    reps.push_back(closed && (mask & 1U) ? all ^ mask : mask);
  }
  std::sort(reps.begin(), reps.end());
  reps.erase(std::unique(reps.begin(), reps.end()), reps.end());
  for (std::uint32_t m : reps) out.droplets.push_back(walker.members(m));
  return out;
}

namespace detail {
inline EdgeAnalysis checked_analysis(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  auto a = analyze_edge(j, sigma, e, region);
  if (a.ground_min < -tol::slack) throw PreconditionError("configuration is not a ground state on the region");
  return a;
}
}  // namespace detail

/// sigma_e C_e = -min_{A: e in dA} sum_{dA \ e} J sigma sigma, over nonempty A in the region.
inline double critical_value(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  return detail::checked_analysis(j, sigma, e, region).critical;
}

/// min_{A: e in dA} sum_{dA} J sigma sigma.
inline double flexibility(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  return detail::checked_analysis(j, sigma, e, region).flexibility;
}

inline std::vector<std::vector<VertexId>> critical_droplets(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e,
                                                            const Region& region) {
  return detail::checked_analysis(j, sigma, e, region).droplets;
}

/// Membership in G_{+e} (sigma_e = +1) or G_{-e}: the ground-state test over the
/// subsets whose boundary avoids e.
inline bool in_signed_class(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  check_same_lattice(j, sigma);
  const Lattice& lat = j.lattice();
  const auto [ma, mb] = detail::endpoint_bits(lat, e, region);
  const auto w = detail::bond_weights(j, sigma);
  CutWalker walker(lat, region, w);
  double m = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  walker.for_each([&](std::uint32_t mask, double s) {
    if (static_cast<bool>(mask & ma) != static_cast<bool>(mask & mb)) return;
    if (s < m) {
      m = s;
      arg = mask;
    }
  });
  return m == std::numeric_limits<double>::infinity() || walker.sum(arg) >= -tol::slack;
}

/// sigma with the droplet flipped.
inline SpinConfig flip_droplet(const SpinConfig& sigma, const std::vector<VertexId>& droplet) {
  return sigma.flipped_on(Region(sigma.lattice(), droplet));
}

/// Flips a critical droplet of e and verifies the pairing: the bond of e changes
/// sign, the result lies in the opposite signed class, and its critical value
/// does not move in the wrong direction.
inline SpinConfig droplet_flip(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e,
                               const std::vector<VertexId>& droplet, const Region& region) {
  const SpinConfig flipped = flip_droplet(sigma, droplet);
  if (flipped.bond(e) != -sigma.bond(e)) throw VerificationError("droplet boundary does not contain the edge");
  if (!in_signed_class(j, flipped, e, region)) {
    throw VerificationError("flipped configuration fails the signed ground-state test");
  }
  const double before = detail::critical_value_raw(j, sigma, e, region);
  const double after = detail::critical_value_raw(j, flipped, e, region);
  const bool ok = sigma.bond(e) > 0 ? after >= before - tol::slack : after <= before + tol::slack;
  if (!ok) {
    throw VerificationError("critical value moved the wrong way under the droplet flip (" + std::to_string(before) +
                            " -> " + std::to_string(after) + ")");
  }
  return flipped;
}

/// Threshold of J_e for membership, located by bisection on the ground-state test.
inline double critical_value_bisection(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  check_same_lattice(j, sigma);
  if (!is_ground_state(j, sigma, region).ok) throw PreconditionError("configuration is not a ground state on the region");
  const double s = super_satisfied_values(j, e).s;
  const bool plus = sigma.bond(e) > 0;
  // Strict test (no slack) so the located point is the threshold itself.
  auto member = [&](double y) { return is_ground_state(modify(j, e, y), sigma, region, 0.0).ok; };
  // Membership holds above the threshold for sigma_e = +1 and below it otherwise.
  double in = plus ? s + 1.0 : -s - 1.0;
  double out = plus ? -s - 1.0 : s + 1.0;
  if (!member(in) || member(out)) throw InconsistencyError("membership is not monotone across the bracket");
  for (int i = 0; i < kBisectionSteps; ++i) {
    const double mid = 0.5 * (in + out);
    (member(mid) ? in : out) = mid;
  }
  if (!member(0.5 * (in + (plus ? s + 1.0 : -s - 1.0)))) {
    throw InconsistencyError("membership lost above the located threshold");
  }
  return 0.5 * (in + out);
}

struct CriticalReport {
  EdgeId edge = 0;
  double coupling = 0.0;
  double critical = 0.0;
  double flexibility = 0.0;
  SuperSatisfied supersat;
  int bond = 1;
  std::vector<std::vector<VertexId>> droplets;
  bool truncated = false;
  Region region;
};

inline CriticalReport critical_report(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  const auto a = detail::checked_analysis(j, sigma, e, region);
  return {e, j[e], a.critical, a.flexibility, super_satisfied_values(j, e), sigma.bond(e), a.droplets, a.truncated, region};
}

}  // namespace gslab
