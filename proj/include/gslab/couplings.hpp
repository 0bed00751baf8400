#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gslab/error.hpp"
#include "gslab/lattice.hpp"
#include "gslab/rng.hpp"

namespace gslab {

using LatticePtr = std::shared_ptr<const Lattice>;

inline LatticePtr build_lattice(const LatticeSpec& spec, std::size_t vertex_cap = Lattice::kDefaultVertexCap) {
  return std::make_shared<const Lattice>(spec, vertex_cap);
}

namespace tol {
inline constexpr double tie = 1e-12;     // disorder audit, relative to the distribution scale
inline constexpr double slack = 1e-9;    // every ">= 0" inequality check
inline constexpr double oracle = 1e-6;   // agreement between independent computations
}  // namespace tol

enum class Family { gaussian, uniform_symmetric };

struct DistributionSpec {
  Family family = Family::gaussian;
  double a = 0.0;  // gaussian: mean; uniform: halfwidth
  double b = 1.0;  // gaussian: stddev; unused for uniform

  static DistributionSpec gaussian(double mean = 0.0, double stddev = 1.0) {
    if (!(stddev > 0.0) || !std::isfinite(stddev) || !std::isfinite(mean)) throw ConfigError("gaussian needs finite mean and stddev > 0");
    return {Family::gaussian, mean, stddev};
  }
  static DistributionSpec uniform(double halfwidth) {
    if (!(halfwidth > 0.0) || !std::isfinite(halfwidth)) throw ConfigError("uniform needs halfwidth > 0");
    return {Family::uniform_symmetric, halfwidth, 0.0};
  }

  double scale() const { return family == Family::gaussian ? b : a; }
  double mean() const { return family == Family::gaussian ? a : 0.0; }
  double stddev() const { return family == Family::gaussian ? b : a / std::sqrt(3.0); }

  /// nu((-inf, x]).
  double cdf(double x) const {
    if (family == Family::gaussian) return 0.5 * std::erfc(-(x - a) / (b * std::numbers::sqrt2));
    return std::clamp((x + a) / (2.0 * a), 0.0, 1.0);
  }
  /// nu([lo, hi]); continuous, so endpoints carry no mass.
  double mass(double lo, double hi) const { return hi <= lo ? 0.0 : cdf(hi) - cdf(lo); }

  double draw(rng::Stream& s) const {
    if (family == Family::gaussian) return a + b * s.next_normal();
    return (2.0 * s.next_unit() - 1.0) * a;
  }

  friend bool operator==(const DistributionSpec&, const DistributionSpec&) = default;
};

namespace detail {
inline std::vector<double> parse_double_list(std::string_view text, std::string_view what) {
  std::vector<double> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string tok(text.substr(0, comma));
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = std::string::npos;
    }
    if (used != tok.size() || tok.empty()) throw ConfigError("malformed " + std::string(what) + ": '" + tok + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}
}  // namespace detail

/// "gaussian:MEAN,SD" (or bare "gaussian"), "uniform:HALFWIDTH".
inline DistributionSpec parse_distribution(std::string_view text) {
  const auto colon = text.find(':');
  const auto family = text.substr(0, colon);
  const auto params = colon == std::string_view::npos ? std::vector<double>{}
                                                      : detail::parse_double_list(text.substr(colon + 1), "distribution");
  if (family == "gaussian" || family == "normal") {
    if (params.empty()) return DistributionSpec::gaussian();
    if (params.size() != 2) throw ConfigError("gaussian takes MEAN,SD");
    return DistributionSpec::gaussian(params[0], params[1]);
  }
  if (family == "uniform" || family == "uniform_symmetric") {
    if (params.size() != 1) throw ConfigError("uniform takes HALFWIDTH");
    return DistributionSpec::uniform(params[0]);
  }
  throw ConfigError("unknown distribution family '" + std::string(family) + "'");
}

inline std::string to_string(const DistributionSpec& d) {
  auto num = [](double v) {
    std::string s = std::to_string(v);
    s.erase(s.find_last_not_of('0') + 1);
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  };
  if (d.family == Family::gaussian) return "gaussian:" + num(d.a) + ',' + num(d.b);
  return "uniform:" + num(d.a);
}

struct Provenance {
  std::uint64_t seed = 0;
  DistributionSpec dist;
  std::uint32_t attempt = 0;  // tie-audit resamples before acceptance
};

/// One coupling value per lattice edge, indexed canonically.
class CouplingConfig {
 public:
  CouplingConfig(LatticePtr lattice, std::vector<double> values, std::optional<Provenance> provenance = std::nullopt)
      : lattice_(std::move(lattice)), values_(std::move(values)), provenance_(provenance) {
    if (!lattice_) throw StructuralError("coupling config needs a lattice");
    if (values_.size() != lattice_->num_edges()) {
      throw StructuralError("expected " + std::to_string(lattice_->num_edges()) + " coupling values, got " +
                            std::to_string(values_.size()));
    }
    for (double v : values_)
      if (!std::isfinite(v)) throw StructuralError("coupling values must be finite");
  }

  const Lattice& lattice() const { return *lattice_; }
  const LatticePtr& lattice_ptr() const { return lattice_; }
  std::size_t size() const { return values_.size(); }
  double operator[](EdgeId e) const { return values_[e]; }
  double at(EdgeId e) const {
    lattice_->check_edge(e);
    return values_[e];
  }
  std::span<const double> values() const { return values_; }

  /// Empty for hand-built or modified configurations ("manual").
  const std::optional<Provenance>& provenance() const { return provenance_; }
  bool manual() const { return !provenance_.has_value(); }

  /// Scale used for tie tolerances; 1 for manual configurations.
  double scale() const { return provenance_ ? provenance_->dist.scale() : 1.0; }

  friend bool operator==(const CouplingConfig& a, const CouplingConfig& b) {
    return *a.lattice_ == *b.lattice_ && a.values_ == b.values_;
  }

 private:
  LatticePtr lattice_;
  std::vector<double> values_;
  std::optional<Provenance> provenance_;
};

/// Key of an edge that depends only on its geometry: the lower-left endpoint and
/// the orientation. Shared edges of nested lattices get the same key.
inline std::uint64_t edge_key(const Lattice& lattice, EdgeId e) {
  const auto [a, b] = lattice.endpoints(e);
  const Coord p = lattice.coord(a);
  const auto ux = static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x));
  const auto uy = static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.y));
  return rng::combine((ux << 32) | uy, lattice.horizontal(e) ? 0 : 1);
}

/// True when two values agree within the tie tolerance.
inline bool has_tie(std::vector<double> values, double tolerance) {
  std::sort(values.begin(), values.end());
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] - values[i - 1] <= tolerance) return true;
  return false;
}

inline constexpr std::uint32_t kMaxTieResamples = 16;

/// Draws each edge from its own counter-based stream keyed by (seed, edge geometry).
/// The first attempt uses the seed as given; the rare tie-audit retry re-keys all edges.
inline CouplingConfig sample_couplings(LatticePtr lattice, const DistributionSpec& dist, std::uint64_t seed) {
  std::vector<double> values(lattice->num_edges());
  for (std::uint32_t attempt = 0; attempt <= kMaxTieResamples; ++attempt) {
    const std::uint64_t key = attempt == 0 ? seed : rng::combine(seed, attempt, 0x7469657265ULL);
    for (EdgeId e = 0; e < values.size(); ++e) {
      rng::Stream s(rng::combine(key, edge_key(*lattice, e)));
      values[e] = dist.draw(s);
    }
    if (!has_tie(values, tol::tie * dist.scale())) {
      return CouplingConfig(std::move(lattice), std::move(values), Provenance{seed, dist, attempt});
    }
  }
  throw DegenerateDisorderError("tie audit failed after " + std::to_string(kMaxTieResamples) + " resamples");
}

/// J(e, y): value y at e, unchanged elsewhere. The result is marked manual.
inline CouplingConfig modify(const CouplingConfig& j, EdgeId e, double y) {
  j.lattice().check_edge(e);
  if (!std::isfinite(y)) throw StructuralError("modified coupling must be finite");
  std::vector<double> v(j.values().begin(), j.values().end());
  v[e] = y;
  return CouplingConfig(j.lattice_ptr(), std::move(v));
}

/// Carries values onto a translated copy of the lattice, edge by edge.
inline CouplingConfig transport(const CouplingConfig& j, LatticePtr target) {
  const Lattice& src = j.lattice();
  if (src.spec().width != target->spec().width || src.spec().height != target->spec().height ||
      src.kind() != target->kind()) {
    throw StructuralError("transport needs lattices of the same shape");
  }
  // Same shape means identical canonical indexing.
  return CouplingConfig(std::move(target), std::vector<double>(j.values().begin(), j.values().end()));
}

/// Values on a sub-lattice, matched by vertex coordinates. The result is marked manual.
inline CouplingConfig restrict_to(const CouplingConfig& j, LatticePtr target) {
  const Lattice& src = j.lattice();
  std::vector<double> v(target->num_edges());
  for (EdgeId e = 0; e < target->num_edges(); ++e) {
    const auto [a, b] = target->endpoints(e);
    const auto sa = src.vertex_at(target->coord(a)), sb = src.vertex_at(target->coord(b));
    const auto se = sa && sb ? src.edge_between(*sa, *sb) : std::nullopt;
    if (!se) throw StructuralError("target lattice is not a sub-lattice of the couplings' lattice");
    v[e] = j[*se];
  }
  return CouplingConfig(std::move(target), std::move(v));
}

}  // namespace gslab
