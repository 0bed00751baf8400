#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/cuts.hpp"
#include "gslab/error.hpp"
#include "gslab/lattice.hpp"
#include "gslab/parallel.hpp"
#include "gslab/rng.hpp"
#include "gslab/spins.hpp"
#include "gslab/transfer.hpp"

namespace gslab {

inline constexpr std::size_t kMaxFreeSpins = 28;
inline constexpr std::size_t kMaxBoundary = 16;

enum class SolverKind { gray_code, transfer, automatic };

struct SolveOptions {
  SolverKind kind = SolverKind::gray_code;
  bool audit_ties = true;
  std::size_t free_spin_cap = kMaxFreeSpins;
};

struct GroundState {
  SpinConfig state;  // region spins, boundary values, +1 elsewhere
  double energy = 0.0;
  std::optional<SpinConfig> partner;  // global flip, reported under free boundary conditions
};

namespace detail {

/// Exhaustive Gray-code search with incremental local fields. Under free
/// boundary conditions region position 0 (the anchor) stays +1.
inline RawSolve gray_minimize(const CouplingConfig& j, const Region& region, const SpinConfig& base, bool fixed,
                              std::size_t cap) {
  const Lattice& lat = j.lattice();
  const std::size_t n = region.size();
  const std::size_t first = fixed ? 0 : 1;
  const std::size_t searched = n - first;
  if (searched > cap) {
    throw SizingError(std::to_string(searched) + " free spins exceed the exhaustive-search cap " + std::to_string(cap));
  }
  const auto fields = boundary_fields(j, region, base, fixed);
  struct Nb {
    std::uint32_t pos;
    double j;
  };
  std::vector<std::vector<Nb>> adj(n);
  const auto members = region.members();
  for (std::size_t i = 0; i < n; ++i) {
    for (EdgeId e : lat.incident(members[i])) {
      if (auto k = region.index_of(lat.other(e, members[i]))) adj[i].push_back({static_cast<std::uint32_t>(*k), j[e]});
    }
  }

  std::vector<Spin> s(n, 1);
  std::vector<double> h(n);
  double energy = 0.0;
  auto resync = [&] {
    energy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double hi = fields[i];
      for (const Nb& nb : adj[i]) hi += nb.j * s[nb.pos];
      h[i] = hi;
      energy -= s[i] * (0.5 * (hi - fields[i]) + fields[i]);
    }
  };
  resync();

  RawSolve r;
  r.best = energy;
  std::uint64_t best_code = 0;
  const std::uint64_t total = std::uint64_t{1} << searched;
  std::uint64_t code = 0;
  for (std::uint64_t g = 1; g < total; ++g) {
    const int bit = std::countr_zero(g);
    const std::size_t i = first + static_cast<std::size_t>(bit);
    energy += 2.0 * s[i] * h[i];
    s[i] = static_cast<Spin>(-s[i]);
    for (const Nb& nb : adj[i]) h[nb.pos] += 2.0 * nb.j * s[i];
    code ^= std::uint64_t{1} << bit;
    if ((g & 4095) == 0) resync();
    if (energy < r.best) {
      r.second = r.best;
      r.best = energy;
      best_code = code;
    } else if (energy < r.second) {
      r.second = energy;
    }
  }
  r.region_spins.assign(n, 1);
  for (std::size_t k = 0; k < searched; ++k)
    if (best_code >> k & 1U) r.region_spins[first + k] = -1;
  return r;
}

inline SolverKind pick_solver(const Lattice& lat, const Region& region, SolverKind requested) {
  if (requested != SolverKind::automatic) return requested;
  if (region.size() <= 20) return SolverKind::gray_code;
  if (const auto r = as_rect(lat, region); r && std::min(r->w, r->h) <= kMaxProfile) return SolverKind::transfer;
  return SolverKind::gray_code;
}

inline double tie_tolerance(const CouplingConfig& j, const Region& region) {
  return tol::tie * j.scale() * static_cast<double>(std::max<std::size_t>(1, detail::energy_terms(j.lattice(), region)));
}

}  // namespace detail

/// Exact minimizer of the region energy (plus cross terms to a fixed boundary).
/// A runner-up within the tie tolerance raises DegenerateDisorderError.
inline GroundState solve_ground_state(const CouplingConfig& j, const Region& region, const BoundaryCondition& bc,
                                      const SolveOptions& opts = {}) {
  if (region.empty()) throw StructuralError("solve region is empty");
  const Lattice& lat = j.lattice();
  lat.check_vertex(region.members().back());
  SpinConfig base = detail::base_config(j, region, bc);
  const SolverKind kind = detail::pick_solver(lat, region, opts.kind);
  const auto raw = kind == SolverKind::transfer ? detail::transfer_minimize(j, region, base, bc.fixed)
                                                : detail::gray_minimize(j, region, base, bc.fixed, opts.free_spin_cap);
  if (opts.audit_ties && raw.second - raw.best <= detail::tie_tolerance(j, region)) {
    throw DegenerateDisorderError("ground-state energy tie within tolerance (gap " + std::to_string(raw.second - raw.best) +
                                  ")");
  }
  const auto members = region.members();
  for (std::size_t i = 0; i < members.size(); ++i) base.set(members[i], raw.region_spins[i]);
  GroundState out{base, solve_energy(j, region, base, bc.fixed), std::nullopt};
  if (!bc.fixed) out.partner = base.flipped();
  return out;
}

struct GroundStateCheck {
  bool ok = true;
  double min_sum = std::numeric_limits<double>::infinity();  // most negative boundary sum
  std::vector<VertexId> witness;                             // a subset achieving it
};

/// sigma is a ground state on the window iff every nonempty B inside it has
/// sum_{dB} J sigma sigma >= -slack. Boundary edges may leave the window.
inline GroundStateCheck is_ground_state(const CouplingConfig& j, const SpinConfig& sigma, const Region& window,
                                        double slack = tol::slack) {
  check_same_lattice(j, sigma);
  const Lattice& lat = j.lattice();
  if (window.size() > kMaxSubsetRegion) throw SizingError("ground-state test window exceeds 24 vertices");
  if (window.empty()) return {};
  std::vector<double> w(lat.num_edges());
  for (EdgeId e = 0; e < w.size(); ++e) w[e] = j[e] * sigma.bond(e);
  CutWalker walker(lat, window, w);
  double best = std::numeric_limits<double>::infinity();
  std::uint32_t arg = 0;
  auto better_tie = [](std::uint32_t a, std::uint32_t b) {
    const bool a_anchor = a & 1U, b_anchor = b & 1U;
    if (a_anchor != b_anchor) return !a_anchor;
    const int pa = std::popcount(a), pb = std::popcount(b);
    return pa != pb ? pa < pb : a < b;
  };
  walker.for_each([&](std::uint32_t mask, double s) {
    if (s < best - 1e-12 || (std::abs(s - best) <= 1e-12 && better_tie(mask, arg))) {
      if (s < best) best = s;
      arg = mask;
    }
  });
  const double exact = walker.sum(arg);
  return {exact >= -slack, exact, walker.members(arg)};
}

namespace detail {

/// -min over nonempty A in the region with e in dA of sum_{dA \ e} J sigma sigma,
/// times sigma_e. No ground-state precondition.
inline double critical_value_raw(const CouplingConfig& j, const SpinConfig& sigma, EdgeId e, const Region& region) {
  const Lattice& lat = j.lattice();
  lat.check_edge(e);
  const auto [a, b] = lat.endpoints(e);
  const auto ia = region.index_of(a), ib = region.index_of(b);
  if (!ia && !ib) throw StructuralError("edge has no endpoint in the region");
  // J_e is zeroed so the result does not depend on it, not even through rounding.
  std::vector<double> w(lat.num_edges());
  for (EdgeId f = 0; f < w.size(); ++f) w[f] = f == e ? 0.0 : j[f] * sigma.bond(f);
  CutWalker walker(lat, region, w);
  const std::uint32_t ma = ia ? 1U << *ia : 0U, mb = ib ? 1U << *ib : 0U;
  // Near-minimizers are re-summed exactly so running-sum rounding cannot pick the argmin.
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, std::uint32_t>> cand;
  walker.for_each([&](std::uint32_t mask, double s) {
    const bool in_a = mask & ma, in_b = mask & mb;
    if (in_a == in_b || s > best + tol::slack) return;
    best = std::min(best, s);
    cand.emplace_back(s, mask);
    if (cand.size() > 4096) std::erase_if(cand, [&](const auto& c) { return c.first > best + tol::slack; });
  });
  double exact = std::numeric_limits<double>::infinity();
  for (const auto& [s, mask] : cand)
    if (s <= best + tol::slack) exact = std::min(exact, walker.sum(mask));
  return -exact * sigma.bond(e);
}

}  // namespace detail

struct WindowState {
  std::uint64_t key = 0;  // bit i set when window member i is -1
  std::string spins;      // window restriction, "+-..."
  std::uint64_t multiplicity = 0;
  std::uint64_t witness_bc = 0;  // bit i set when boundary vertex i is -1
  SpinConfig witness;            // the full solution under the witness boundary condition
  std::size_t partner = 0;       // index of the global-flip partner
  std::vector<double> critical;  // per tracked edge; see enumerate_window_ground_states
};

/// Distinct window restrictions of outer-region ground states over all boundary conditions.
struct GroundStateSet {
  Region outer;
  Region window;
  std::vector<VertexId> boundary;  // external boundary of outer, canonical order
  std::vector<EdgeId> tracked;
  std::uint64_t boundary_conditions = 0;  // number of boundary conditions solved, counting flips
  std::vector<WindowState> states;        // sorted by key

  std::size_t size() const { return states.size(); }
  std::optional<std::size_t> find(std::uint64_t key) const {
    auto it = std::lower_bound(states.begin(), states.end(), key,
                               [](const WindowState& s, std::uint64_t k) { return s.key < k; });
    if (it == states.end() || it->key != key) return std::nullopt;
    return static_cast<std::size_t>(it - states.begin());
  }
  std::optional<std::size_t> find(const SpinConfig& sigma) const { return find(window_key(sigma)); }

  std::uint64_t window_key(const SpinConfig& sigma) const {
    std::uint64_t k = 0;
    const auto m = window.members();
    for (std::size_t i = 0; i < m.size(); ++i)
      if (sigma[m[i]] < 0) k |= std::uint64_t{1} << i;
    return k;
  }

  /// Same restrictions with the same multiplicities.
  bool same_states(const GroundStateSet& other) const {
    if (states.size() != other.states.size()) return false;
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i].key != other.states[i].key || states[i].multiplicity != other.states[i].multiplicity) return false;
    return true;
  }
};

struct EnumerateOptions {
  std::vector<EdgeId> tracked;  // edges inside the window whose thresholds are aggregated
  SolveOptions solve{SolverKind::automatic, true, kMaxFreeSpins};
  std::size_t boundary_cap = kMaxBoundary;
  unsigned threads = 0;
};

/// Solves the outer region under every boundary condition (first boundary vertex
/// pinned to +1; flips supply the rest) and collects window restrictions.
///
/// For a tracked edge e, state r records min (sigma_e = +1) or max (sigma_e = -1)
/// over the boundary conditions producing r of the critical value of their outer
/// solution on the outer region: the threshold of J_e at which r enters or leaves.
inline GroundStateSet enumerate_window_ground_states(const CouplingConfig& j, const Region& outer, const Region& window,
                                                     const EnumerateOptions& opts = {}) {
  const Lattice& lat = j.lattice();
  if (outer.empty() || window.empty()) throw StructuralError("outer region and window must be nonempty");
  if (!window.subset_of(outer)) throw StructuralError("window must lie inside the outer region");
  if (window.size() > 63) throw SizingError("window exceeds 63 vertices");
  GroundStateSet gs{outer, window, external_boundary(lat, outer), opts.tracked, 0, {}};
  const std::size_t nb = gs.boundary.size();
  if (nb > opts.boundary_cap) {
    throw SizingError("outer region has " + std::to_string(nb) + " boundary vertices, cap is " +
                      std::to_string(opts.boundary_cap));
  }
  for (EdgeId e : opts.tracked) {
    const auto [a, b] = lat.endpoints(e);
    if (!window.contains(a) || !window.contains(b)) throw StructuralError("tracked edges must lie inside the window");
  }
  if (!opts.tracked.empty() && outer.size() > kMaxSubsetRegion) {
    throw SizingError("tracking critical values needs an outer region of at most 24 vertices");
  }

  struct Partial {
    std::uint64_t multiplicity = 0;
    std::uint64_t witness_bc = 0;
    std::optional<SpinConfig> witness;
    std::vector<double> critical;
  };
  using Bucket = std::map<std::uint64_t, Partial>;
  const std::uint64_t all_ones = nb == 0 ? 0 : (std::uint64_t{1} << nb) - 1;
  const std::uint64_t classes = nb == 0 ? 1 : std::uint64_t{1} << (nb - 1);

  auto absorb = [&](Bucket& bucket, const SpinConfig& sol, std::uint64_t bc_index, const std::vector<double>& crit) {
    const std::uint64_t key = gs.window_key(sol);
    auto [it, fresh] = bucket.try_emplace(key);
    Partial& p = it->second;
    ++p.multiplicity;
    if (fresh || bc_index < p.witness_bc) {
      p.witness_bc = bc_index;
      p.witness = sol;
    }
    if (fresh) {
      p.critical = crit;
    } else {
      for (std::size_t t = 0; t < crit.size(); ++t) {
        const bool plus = sol.bond(gs.tracked[t]) > 0;
        p.critical[t] = plus ? std::min(p.critical[t], crit[t]) : std::max(p.critical[t], crit[t]);
      }
    }
  };

  auto solve_one = [&](std::uint64_t cls, Bucket& bucket) {
    BoundaryCondition bc;
    std::uint64_t index = 0;
    if (nb > 0) {
      index = cls << 1;  // boundary vertex 0 stays +1
      std::vector<Spin> vals(nb);
      for (std::size_t i = 0; i < nb; ++i) vals[i] = (index >> i & 1U) ? -1 : 1;
      bc = BoundaryCondition::fixed_bc(gs.boundary, std::move(vals));
    }
    const GroundState sol = solve_ground_state(j, outer, bc, opts.solve);
    std::vector<double> crit;
    for (EdgeId e : gs.tracked) crit.push_back(detail::critical_value_raw(j, sol.state, e, outer));
    absorb(bucket, sol.state, index, crit);
    absorb(bucket, nb == 0 ? *sol.partner : sol.state.flipped(), index ^ all_ones, crit);
  };

  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(classes, 64));
  auto buckets = parallel_map(
      chunks,
      [&](std::size_t c) {
        Bucket b;
        for (std::uint64_t cls = c; cls < classes; cls += chunks) solve_one(cls, b);
        return b;
      },
      opts.threads);

  Bucket merged;
  for (auto& b : buckets) {
    for (auto& [key, p] : b) {
      auto [it, fresh] = merged.try_emplace(key, p);
      if (fresh) continue;
      Partial& m = it->second;
      m.multiplicity += p.multiplicity;
      if (p.witness_bc < m.witness_bc) {
        m.witness_bc = p.witness_bc;
        m.witness = p.witness;
      }
      for (std::size_t t = 0; t < p.critical.size(); ++t) {
        const bool plus = m.witness->bond(gs.tracked[t]) > 0;
        m.critical[t] = plus ? std::min(m.critical[t], p.critical[t]) : std::max(m.critical[t], p.critical[t]);
      }
    }
  }

  gs.boundary_conditions = nb == 0 ? 2 : classes * 2;
  const std::uint64_t window_ones = (std::uint64_t{1} << window.size()) - 1;
  for (auto& [key, p] : merged) {
    WindowState st{key, p.witness->restricted(window), p.multiplicity, p.witness_bc, *p.witness, 0, p.critical};
    gs.states.push_back(std::move(st));
  }
  for (auto& st : gs.states) {
    const auto partner = gs.find(st.key ^ window_ones);
    if (!partner) throw VerificationError("window ground states are not closed under global flip");
    st.partner = *partner;
    if (gs.states[*partner].multiplicity != st.multiplicity) {
      throw VerificationError("flip partners have different multiplicities");
    }
  }
  return gs;
}

struct UniformMeasure {
  std::vector<double> weights;
};

inline UniformMeasure uniform_measure(const GroundStateSet& gs) {
  if (gs.states.empty()) throw StructuralError("uniform measure needs a nonempty ground-state set");
  return {std::vector<double>(gs.states.size(), 1.0 / static_cast<double>(gs.states.size()))};
}

/// Two independent draws, with replacement, from the uniform measure.
inline std::pair<std::size_t, std::size_t> sample_replica_pair(const GroundStateSet& gs, std::uint64_t seed) {
  if (gs.states.empty()) throw StructuralError("cannot sample from an empty ground-state set");
  rng::Stream s(seed);
  const std::size_t a = s.next_below(gs.states.size());
  const std::size_t b = s.next_below(gs.states.size());
  return {a, b};
}

}  // namespace gslab
