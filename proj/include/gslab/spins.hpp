#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/error.hpp"
#include "gslab/lattice.hpp"

namespace gslab {

using Spin = std::int8_t;

/// sigma: vertex -> {-1, +1} over a whole lattice.
class SpinConfig {
 public:
  SpinConfig(LatticePtr lattice, Spin fill = 1) : lattice_(std::move(lattice)) {
    if (!lattice_) throw StructuralError("spin config needs a lattice");
    check_spin(fill);
    spins_.assign(lattice_->num_vertices(), fill);
  }

  SpinConfig(LatticePtr lattice, std::vector<Spin> spins) : lattice_(std::move(lattice)), spins_(std::move(spins)) {
    if (!lattice_) throw StructuralError("spin config needs a lattice");
    if (spins_.size() != lattice_->num_vertices()) throw StructuralError("spin count does not match lattice");
    for (Spin s : spins_) check_spin(s);
  }

  /// "+-+..." in vertex order.
  static SpinConfig parse(LatticePtr lattice, std::string_view text) {
    std::vector<Spin> s;
    for (char c : text) {
      if (c == '+') s.push_back(1);
      else if (c == '-') s.push_back(-1);
      else throw ConfigError(std::string("spin strings use '+' and '-', got '") + c + "'");
    }
    return SpinConfig(std::move(lattice), std::move(s));
  }

  const Lattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  std::size_t size() const { return spins_.size(); }
  Spin operator[](VertexId v) const { return spins_[v]; }
  void set(VertexId v, Spin s) {
    lattice_->check_vertex(v);
    check_spin(s);
    spins_[v] = s;
  }
  const std::vector<Spin>& spins() const { return spins_; }

  /// sigma_e = sigma_x sigma_y.
  int bond(EdgeId e) const {
    const auto [a, b] = lattice_->endpoints(e);
    return spins_[a] * spins_[b];
  }

  SpinConfig flipped() const {
    SpinConfig out = *this;
    for (auto& s : out.spins_) s = static_cast<Spin>(-s);
    return out;
  }

  /// Flips every spin of the region.
  SpinConfig flipped_on(const Region& region) const {
    SpinConfig out = *this;
    for (VertexId v : region.members()) out.spins_.at(v) = static_cast<Spin>(-out.spins_.at(v));
    return out;
  }

  std::string to_string() const { return restricted(Region::all(*lattice_)); }

  std::string restricted(const Region& region) const {
    std::string s;
    s.reserve(region.size());
    for (VertexId v : region.members()) s.push_back(spins_.at(v) > 0 ? '+' : '-');
    return s;
  }

  bool same_lattice(const SpinConfig& other) const { return *lattice_ == *other.lattice_; }

  friend bool operator==(const SpinConfig& a, const SpinConfig& b) {
    return a.same_lattice(b) && a.spins_ == b.spins_;
  }

 private:
  static void check_spin(Spin s) {
    if (s != 1 && s != -1) throw StructuralError("spins are +1 or -1");
  }

  LatticePtr lattice_;
  std::vector<Spin> spins_;
};

/// Copies spins by coordinate onto another lattice; coordinates missing from
/// the source are a structural error.
inline SpinConfig transfer_spins(const SpinConfig& sigma, LatticePtr target) {
  std::vector<Spin> s(target->num_vertices());
  for (VertexId v = 0; v < s.size(); ++v) {
    const auto src = sigma.lattice().vertex_at(target->coord(v));
    if (!src) throw StructuralError("target lattice is not covered by the source configuration");
    s[v] = sigma[*src];
  }
  return SpinConfig(std::move(target), std::move(s));
}

/// Free, or fixed values on the external boundary of the solve region.
struct BoundaryCondition {
  bool fixed = false;
  std::vector<VertexId> vertices;  // sorted external boundary
  std::vector<Spin> values;

  static BoundaryCondition free_bc() { return {}; }
  static BoundaryCondition fixed_bc(std::vector<VertexId> vertices, std::vector<Spin> values) {
    if (vertices.size() != values.size()) throw StructuralError("boundary values do not match boundary vertices");
    return {true, std::move(vertices), std::move(values)};
  }
  /// Reads the boundary values off a full configuration.
  static BoundaryCondition from_config(const SpinConfig& sigma, const Region& region) {
    BoundaryCondition bc{true, external_boundary(sigma.lattice(), region), {}};
    for (VertexId v : bc.vertices) bc.values.push_back(sigma[v]);
    return bc;
  }

  friend bool operator==(const BoundaryCondition&, const BoundaryCondition&) = default;
};

inline void check_same_lattice(const CouplingConfig& j, const SpinConfig& sigma) {
  if (!(j.lattice() == sigma.lattice())) throw StructuralError("couplings and spins live on different lattices");
}

/// H = -sum J_xy sigma_x sigma_y over edges with both endpoints in the region,
/// summed in canonical edge order.
inline double hamiltonian(const CouplingConfig& j, const Region& region, const SpinConfig& sigma) {
  check_same_lattice(j, sigma);
  const Lattice& lat = j.lattice();
  const auto in = region.mask(lat);
  double h = 0.0;
  for (EdgeId e = 0; e < lat.num_edges(); ++e) {
    const auto [a, b] = lat.endpoints(e);
    if (in[a] && in[b]) h -= j[e] * sigma[a] * sigma[b];
  }
  return h;
}

/// Energy seen by a solve: the region Hamiltonian plus, under fixed conditions,
/// the cross terms to the boundary (read from sigma). One pass in canonical order.
inline double solve_energy(const CouplingConfig& j, const Region& region, const SpinConfig& sigma, bool fixed) {
  check_same_lattice(j, sigma);
  const Lattice& lat = j.lattice();
  const auto in = region.mask(lat);
  double h = 0.0;
  for (EdgeId e = 0; e < lat.num_edges(); ++e) {
    const auto [a, b] = lat.endpoints(e);
    if ((in[a] && in[b]) || (fixed && (in[a] || in[b]))) h -= j[e] * sigma[a] * sigma[b];
  }
  return h;
}

namespace detail {

/// +1 everywhere except the fixed boundary values; validates the boundary.
inline SpinConfig base_config(const CouplingConfig& j, const Region& region, const BoundaryCondition& bc) {
  SpinConfig base(j.lattice_ptr());
  if (!bc.fixed) return base;
  if (bc.vertices != external_boundary(j.lattice(), region)) {
    throw StructuralError("fixed boundary condition must cover exactly the external boundary of the region");
  }
  for (std::size_t i = 0; i < bc.vertices.size(); ++i) base.set(bc.vertices[i], bc.values[i]);
  return base;
}

/// Per region position: sum of J * boundary spin over edges leaving the region
/// (zero under free boundary conditions).
inline std::vector<double> boundary_fields(const CouplingConfig& j, const Region& region, const SpinConfig& base,
                                           bool fixed) {
  const Lattice& lat = j.lattice();
  std::vector<double> b(region.size(), 0.0);
  if (!fixed) return b;
  const auto members = region.members();
  for (std::size_t i = 0; i < members.size(); ++i) {
    for (EdgeId e : lat.incident(members[i])) {
      const VertexId u = lat.other(e, members[i]);
      if (!region.contains(u)) b[i] += j[e] * base[u];
    }
  }
  return b;
}

/// Number of energy terms a solve touches; scales the tie tolerance.
inline std::size_t energy_terms(const Lattice& lat, const Region& region) {
  std::size_t n = 0;
  for (VertexId v : region.members()) n += lat.degree(v);
  return n;
}

}  // namespace detail

}  // namespace gslab
