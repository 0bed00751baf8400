#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/error.hpp"
#include "gslab/lattice.hpp"
#include "gslab/spins.hpp"

namespace gslab {

inline constexpr int kMaxRungLength = 12;

namespace detail {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), std::size_t{0}); }
  std::size_t find(std::size_t v) {
    while (parent_[v] != v) v = parent_[v] = parent_[parent_[v]];
    return v;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace detail

/// Edges whose bond products differ between the two replicas.
inline std::vector<EdgeId> interface(const SpinConfig& a, const SpinConfig& b) {
  if (!a.same_lattice(b)) throw StructuralError("replicas live on different lattices");
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < a.lattice().num_edges(); ++e)
    if (a.bond(e) != b.bond(e)) out.push_back(e);
  return out;
}

struct DomainWall {
  std::vector<EdgeId> dual_edges;       // primal ids, ascending
  std::vector<DualVertexId> vertices;   // ascending
  bool tethered = false;
  int axis_crossings = 0;
  std::size_t cycles = 0;  // independent cycles: edges - vertices + 1
};

struct WallSanity {
  std::size_t loops = 0;              // walls containing a cycle
  std::size_t dangling = 0;           // interior dual vertices of interface degree 1
  std::map<int, std::size_t> branch_hist;  // interface degree -> interior dual vertices
  std::size_t multiple_crossings = 0;      // walls crossing the x-axis more than once

  bool clean() const { return loops == 0 && dangling == 0 && multiple_crossings == 0; }
};

struct InterfaceDecomposition {
  std::vector<EdgeId> edges;
  std::vector<DomainWall> walls;  // ordered by smallest edge
  std::vector<int> wall_of;       // per primal edge, -1 off the interface
  WallSanity sanity;
};

/// Connected components of the interface in the dual graph.
inline InterfaceDecomposition decompose(const Lattice& lattice, std::vector<EdgeId> edges, const DualGraph& dual) {
  if (dual.num_edges() != lattice.num_edges()) throw StructuralError("dual graph does not belong to the lattice");
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  for (EdgeId e : edges) lattice.check_edge(e);

  InterfaceDecomposition out;
  out.edges = edges;
  out.wall_of.assign(lattice.num_edges(), -1);
  detail::DisjointSets sets(dual.num_vertices());
  std::vector<int> degree(dual.num_vertices(), 0);
  for (EdgeId e : edges) {
    const auto [a, b] = dual.endpoints(e);
    sets.unite(a, b);
    ++degree[a];
    ++degree[b];
  }
  std::map<std::size_t, int> root_to_wall;
  for (EdgeId e : edges) {
    const std::size_t root = sets.find(dual.endpoints(e).first);
    auto [it, fresh] = root_to_wall.emplace(root, static_cast<int>(out.walls.size()));
    if (fresh) out.walls.emplace_back();
    DomainWall& w = out.walls[static_cast<std::size_t>(it->second)];
    w.dual_edges.push_back(e);
    out.wall_of[e] = it->second;
    if (dual.crosses_x_axis(e)) {
      w.tethered = true;
      ++w.axis_crossings;
    }
  }
  for (DualVertexId v = 0; v < dual.num_vertices(); ++v) {
    if (degree[v] == 0) continue;
    out.walls[static_cast<std::size_t>(root_to_wall.at(sets.find(v)))].vertices.push_back(v);
    if (dual.vertex(v).interior) {
      ++out.sanity.branch_hist[degree[v]];
      if (degree[v] == 1) ++out.sanity.dangling;
    }
  }
  for (DomainWall& w : out.walls) {
    w.cycles = w.dual_edges.size() + 1 - w.vertices.size();
    if (w.cycles > 0) ++out.sanity.loops;
    if (w.axis_crossings > 1) ++out.sanity.multiple_crossings;
  }
  return out;
}

inline InterfaceDecomposition decompose(const SpinConfig& a, const SpinConfig& b) {
  return decompose(a.lattice(), interface(a, b), build_dual(a.lattice()));
}

/// N_{n,k}: tethered walls containing the dual of a horizontal edge of [-n,n] x {k}.
inline std::size_t count_tethered(const InterfaceDecomposition& d, const Lattice& lattice, int n, int k) {
  if (n < 0) throw SizingError("segment half-width must be >= 0");
  const auto left = lattice.vertex_at({-n, k}), right = lattice.vertex_at({n, k});
  if (!left || !right) throw SizingError("segment [-n,n] x {k} leaves the lattice");
  std::vector<char> seen(d.walls.size(), 0);
  std::size_t count = 0;
  for (int x = -n; x < n; ++x) {
    const auto e = lattice.edge_between(*lattice.vertex_at({x, k}), *lattice.vertex_at({x + 1, k}));
    const int w = d.wall_of.at(*e);
    if (w < 0 || seen[static_cast<std::size_t>(w)] || !d.walls[static_cast<std::size_t>(w)].tethered) continue;
    seen[static_cast<std::size_t>(w)] = 1;
    ++count;
  }
  return count;
}

/// Parity of negative couplings on a cycle equals parity of unsatisfied edges.
/// Accepts any nonempty edge set with even degree everywhere (sums of cycles).
inline bool parity_check(const CouplingConfig& j, const SpinConfig& sigma, const std::vector<EdgeId>& cycle) {
  check_same_lattice(j, sigma);
  const Lattice& lat = j.lattice();
  if (cycle.empty()) throw StructuralError("cycle is empty");
  std::vector<EdgeId> sorted = cycle;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw StructuralError("cycle repeats an edge");
  std::map<VertexId, int> degree;
  for (EdgeId e : sorted) {
    const auto [a, b] = lat.endpoints(e);
    ++degree[a];
    ++degree[b];
  }
  for (const auto& [v, deg] : degree)
    if (deg % 2 != 0) throw StructuralError("edge set is not a closed cycle");
  int negative = 0, unsatisfied = 0;
  for (EdgeId e : sorted) {
    if (j[e] < 0) ++negative;
    if ((j[e] > 0) != (sigma.bond(e) > 0)) ++unsatisfied;
  }
  return negative % 2 == unsatisfied % 2;
}

/// Edges of a face in cyclic order.
inline std::vector<EdgeId> face_cycle(const Face& f) { return {f.edges.begin(), f.edges.end()}; }

// ---- rungs ----

struct JlWalls {
  std::vector<std::vector<EdgeId>> walls;  // interface dual edges inside box_j, per wall
  std::vector<int> wall_of_vertex;         // per dual vertex, -1 when on no wall
};

struct Rung {
  std::vector<DualVertexId> vertices;
  std::vector<EdgeId> edges;  // primal edges crossed, in path order
  int wall_a = 0;             // wall_a < wall_b
  int wall_b = 0;
  double energy = 0.0;
};

inline bool edge_inside(const Lattice& lattice, EdgeId e, const Region& box) {
  const auto [a, b] = lattice.endpoints(e);
  return box.contains(a) && box.contains(b);
}

/// (j,l)-walls: interface dual edges inside box_j, joined when connected
/// through interface dual edges inside box_l.
inline JlWalls jl_walls(const Lattice& lattice, const DualGraph& dual, const std::vector<EdgeId>& interface_edges,
                        const Region& box_j, const Region& box_l) {
  if (!box_j.subset_of(box_l)) throw StructuralError("box_j must lie inside box_l");
  detail::DisjointSets sets(dual.num_vertices());
  for (EdgeId e : interface_edges) {
    if (!edge_inside(lattice, e, box_l)) continue;
    const auto [a, b] = dual.endpoints(e);
    sets.unite(a, b);
  }
  JlWalls out;
  out.wall_of_vertex.assign(dual.num_vertices(), -1);
  std::map<std::size_t, int> ids;
  std::vector<EdgeId> sorted = interface_edges;
  std::sort(sorted.begin(), sorted.end());
  for (EdgeId e : sorted) {
    if (!edge_inside(lattice, e, box_j)) continue;
    const auto [a, b] = dual.endpoints(e);
    auto [it, fresh] = ids.emplace(sets.find(a), static_cast<int>(out.walls.size()));
    if (fresh) out.walls.emplace_back();
    out.walls[static_cast<std::size_t>(it->second)].push_back(e);
    out.wall_of_vertex[a] = out.wall_of_vertex[b] = it->second;
  }
  return out;
}

/// Rung energy sum_{e in R} J_e sigma_e.
inline double rung_energy(const CouplingConfig& j, const SpinConfig& sigma, const std::vector<EdgeId>& edges) {
  double s = 0.0;
  for (EdgeId e : edges) s += j[e] * sigma.bond(e);
  return s;
}

/// Non-self-intersecting dual paths of length <= max_len inside box_j that join
/// two distinct (j,l)-walls and touch walls only at their ends.
inline std::vector<Rung> enumerate_rungs(const CouplingConfig& j, const SpinConfig& sigma,
                                         const std::vector<EdgeId>& interface_edges, const Region& box_j,
                                         const Region& box_l, int max_len) {
  check_same_lattice(j, sigma);
  if (max_len < 1 || max_len > kMaxRungLength) {
    throw SizingError("rung length must be in 1.." + std::to_string(kMaxRungLength));
  }
  const Lattice& lat = j.lattice();
  const DualGraph dual = build_dual(lat);
  const JlWalls walls = jl_walls(lat, dual, interface_edges, box_j, box_l);
  std::vector<Rung> out;
  if (walls.walls.size() < 2) return out;

  std::vector<char> usable(lat.num_edges(), 0), on_interface(lat.num_edges(), 0);
  for (EdgeId e : interface_edges) on_interface.at(e) = 1;
  for (EdgeId e = 0; e < lat.num_edges(); ++e) usable[e] = !on_interface[e] && edge_inside(lat, e, box_j);

  std::vector<char> visited(dual.num_vertices(), 0);
  std::vector<DualVertexId> path;
  std::vector<EdgeId> crossed;
  int start_wall = -1;
  auto dfs = [&](auto&& self, DualVertexId v) -> void {
    if (static_cast<int>(crossed.size()) == max_len) return;
    for (EdgeId e : dual.incident(v)) {
      if (!usable[e]) continue;
      const DualVertexId u = dual.other(e, v);
      if (visited[u]) continue;
      const int w = walls.wall_of_vertex[u];
      path.push_back(u);
      crossed.push_back(e);
      if (w >= 0) {
        if (w > start_wall) out.push_back({path, crossed, start_wall, w, rung_energy(j, sigma, crossed)});
      } else {
        visited[u] = 1;
        self(self, u);
        visited[u] = 0;
      }
      path.pop_back();
      crossed.pop_back();
    }
  };
  for (DualVertexId v = 0; v < dual.num_vertices(); ++v) {
    start_wall = walls.wall_of_vertex[v];
    if (start_wall < 0) continue;
    path.assign(1, v);
    crossed.clear();
    visited[v] = 1;
    dfs(dfs, v);
    visited[v] = 0;
  }
  std::sort(out.begin(), out.end(), [](const Rung& a, const Rung& b) {
    return std::tie(a.wall_a, a.wall_b, a.vertices) < std::tie(b.wall_a, b.wall_b, b.vertices);
  });
  return out;
}

struct RungInfima {
  std::optional<double> touching;          // I: rungs touching D0
  std::optional<double> touching_without;  // I': rungs touching D0 that avoid f
  std::optional<double> containing;        // I~: rungs containing f
};

inline RungInfima rung_infima(const std::vector<Rung>& rungs, int d0, EdgeId f) {
  RungInfima r;
  auto lower = [](std::optional<double>& slot, double v) {
    if (!slot || v < *slot) slot = v;
  };
  for (const Rung& rung : rungs) {
    const bool touches = rung.wall_a == d0 || rung.wall_b == d0;
    const bool has_f = std::find(rung.edges.begin(), rung.edges.end(), f) != rung.edges.end();
    if (touches) lower(r.touching, rung.energy);
    if (touches && !has_f) lower(r.touching_without, rung.energy);
    if (has_f) lower(r.containing, rung.energy);
  }
  return r;
}

}  // namespace gslab
