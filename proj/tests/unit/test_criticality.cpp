#include <gtest/gtest.h>

#include <cmath>

#include "gslab/criticality.hpp"

using namespace gslab;

namespace {

struct SegmentCase {
  LatticePtr lat = build_lattice(LatticeSpec::segment(3));
  CouplingConfig j{lat, {1.5, -2.0}};
  SpinConfig sigma = SpinConfig::parse(lat, "++-");
  Region all = Region::all(*lat);
  EdgeId e = 0;  // {1,2} in one-based vertex names
};

/// Free ground state of the whole lattice.
SpinConfig ground(const CouplingConfig& j) { return solve_ground_state(j, Region::all(j.lattice()), {}).state; }

}  // namespace

TEST(Critical, SegmentExample) {
  SegmentCase c;
  EXPECT_DOUBLE_EQ(critical_value(c.j, c.sigma, c.e, c.all), 0.0);
  EXPECT_DOUBLE_EQ(flexibility(c.j, c.sigma, c.e, c.all), 1.5);
  EXPECT_NEAR(critical_value_bisection(c.j, c.sigma, c.e, c.all), 0.0, 1e-9);
}

TEST(Critical, IndependentOfOwnCoupling) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = ground(j);
    const auto region = Region::all(*lat);
    for (EdgeId e = 0; e < lat->num_edges(); ++e) {
      const double c = critical_value(j, sigma, e, region);
      // Move J_e but stay on the same side of the threshold so sigma stays a ground state.
      const double y = sigma.bond(e) > 0 ? c + 0.25 + std::abs(j[e]) : c - 0.25 - std::abs(j[e]);
      EXPECT_EQ(critical_value(modify(j, e, y), sigma, e, region), c);
      EXPECT_EQ(detail::critical_value_raw(modify(j, e, -y), sigma, e, region), c);
    }
  }
}

TEST(Critical, OracleAgreementAndFlexIdentity) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto region = Region::all(*lat);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = ground(j);
    const EdgeId e = static_cast<EdgeId>(seed % lat->num_edges());
    const double c = critical_value(j, sigma, e, region);
    EXPECT_NEAR(critical_value_bisection(j, sigma, e, region), c, tol::oracle);
    EXPECT_NEAR(flexibility(j, sigma, e, region), std::abs(j[e] - c), tol::slack);
    EXPECT_GE(flexibility(j, sigma, e, region), -tol::slack);
    EXPECT_EQ(flexibility(j, sigma.flipped(), e, region), flexibility(j, sigma, e, region));
  }
}

TEST(Critical, ThresholdDefinition) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto region = Region::all(*lat);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = ground(j);
    for (EdgeId e = 0; e < lat->num_edges(); ++e) {
      const double c = critical_value(j, sigma, e, region);
      const double inside = sigma.bond(e) > 0 ? c + 1 : c - 1;
      const double outside = sigma.bond(e) > 0 ? c - 1 : c + 1;
      EXPECT_TRUE(is_ground_state(modify(j, e, inside), sigma, region).ok);
      EXPECT_FALSE(is_ground_state(modify(j, e, outside), sigma, region).ok);
    }
  }
}

TEST(Critical, Preconditions) {
  SegmentCase c;
  EXPECT_THROW(critical_value(c.j, SpinConfig::parse(c.lat, "+++"), c.e, c.all), PreconditionError);
  auto lat = build_lattice(LatticeSpec::segment(5));
  const CouplingConfig j(lat, {1.0, 2.0, 3.0, 4.0});
  EXPECT_THROW(critical_value(j, SpinConfig(lat), 3, Region(*lat, {0, 1})), StructuralError);
}

TEST(SuperSatisfied, SegmentEdge) {
  SegmentCase c;
  const auto ss = super_satisfied_values(c.j, c.e);
  EXPECT_EQ(ss.s_x, 0.0);
  EXPECT_EQ(ss.s_y, 2.0);
  EXPECT_EQ(ss.s, 0.0);
  EXPECT_TRUE(ss.flag);
  EXPECT_TRUE(super_satisfied_values(modify(c.j, c.e, -0.01), c.e).flag);
}

TEST(SuperSatisfied, InteriorEdgeOfBox) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const VertexId x = *lat->vertex_at({1, 1}), y = *lat->vertex_at({2, 1});
  const EdgeId e = *lat->edge_between(x, y);
  std::vector<double> v(lat->num_edges(), 0.0);
  double next = 1.0;
  for (EdgeId f : lat->incident(x))
    if (f != e) v[f] = (next++) * (f % 2 ? -1 : 1);
  for (EdgeId f : lat->incident(y))
    if (f != e) v[f] = (next++) * (f % 2 ? 1 : -1);
  const CouplingConfig j(lat, v);
  const auto ss = super_satisfied_values(j, e);
  EXPECT_EQ(ss.s_x, 6.0);
  EXPECT_EQ(ss.s_y, 15.0);
  EXPECT_EQ(ss.s, 6.0);
}

TEST(SuperSatisfied, EmptySums) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  std::vector<double> v(lat->num_edges(), 0.0);
  v[4] = 0.7;
  EXPECT_EQ(super_satisfied_values(CouplingConfig(lat, v), 4).s, 0.0);
}

TEST(Critical, BoundHolds) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::uniform(1.0), seed);
    const auto sigma = ground(j);
    for (EdgeId e = 0; e < lat->num_edges(); ++e)
      EXPECT_LE(std::abs(critical_value(j, sigma, e, Region::all(*lat))), super_satisfied_values(j, e).s + tol::slack);
  }
}

TEST(Droplets, SegmentExample) {
  SegmentCase c;
  const auto d = critical_droplets(c.j, c.sigma, c.e, c.all);
  ASSERT_EQ(d.size(), 1u);
  // {first vertex} and its complement share a boundary; the representative avoids the anchor.
  EXPECT_EQ(d[0], (std::vector<VertexId>{1, 2}));
  EXPECT_EQ(boundary_edges(*c.lat, Region(*c.lat, d[0])), boundary_edges(*c.lat, Region(*c.lat, {0})));
}

TEST(Droplets, UniqueOnRandomBoxes) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  int unique = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    unique += critical_droplets(j, ground(j), static_cast<EdgeId>(seed % 12), Region::all(*lat)).size() == 1;
  }
  EXPECT_EQ(unique, 200);
}

TEST(Droplets, SegmentFlip) {
  SegmentCase c;
  const auto d = critical_droplets(c.j, c.sigma, c.e, c.all);
  const auto flipped = droplet_flip(c.j, c.sigma, c.e, d[0], c.all);
  // Flipping {2,3} equals flipping {1} up to a global flip.
  EXPECT_EQ(flipped.flipped().to_string(), "-+-");
  const auto direct = flip_droplet(c.sigma, {0});
  EXPECT_EQ(direct.to_string(), "-+-");
  EXPECT_TRUE(in_signed_class(c.j, direct, c.e, c.all));
  EXPECT_DOUBLE_EQ(detail::critical_value_raw(c.j, direct, c.e, c.all), 0.0);
}

TEST(Droplets, FlipIsInvolution) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 4);
  const auto sigma = ground(j);
  const auto d = critical_droplets(j, sigma, 3, Region::all(*lat));
  EXPECT_EQ(flip_droplet(flip_droplet(sigma, d[0]), d[0]), sigma);
}

TEST(Droplets, PairingOnRandomBoxes) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto region = Region::all(*lat);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = ground(j);
    const EdgeId e = static_cast<EdgeId>(seed % 12);
    const auto d = critical_droplets(j, sigma, e, region);
    ASSERT_FALSE(d.empty());
    const auto tilde = droplet_flip(j, sigma, e, d[0], region);
    const double c0 = critical_value(j, sigma, e, region);
    const double c1 = detail::critical_value_raw(j, tilde, e, region);
    if (sigma.bond(e) > 0) EXPECT_GE(c1, c0 - tol::slack);
    else EXPECT_LE(c1, c0 + tol::slack);
  }
}

TEST(Droplets, AvoidSuperSatisfiedEdges) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const auto region = Region::all(*lat);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    rng::Stream r(rng::derive(seed, 1));
    const EdgeId e = static_cast<EdgeId>(r.next_below(lat->num_edges()));
    EdgeId d;
    do d = static_cast<EdgeId>(r.next_below(lat->num_edges()));
    while (d == e);
    const auto [da, db] = lat->endpoints(d);
    const auto [ea, eb] = lat->endpoints(e);
    const VertexId x = (da != ea && da != eb) ? da : db;
    const double sx = super_satisfied_at(j, d, x);
    j = modify(j, d, (r.next_below(2) ? 1 : -1) * (sx + 0.05 + r.next_unit()));
    const auto sigma = ground(j);
    for (const auto& drop : critical_droplets(j, sigma, e, region)) {
      const auto b = boundary_edges(*lat, Region(*lat, drop));
      EXPECT_EQ(std::count(b.begin(), b.end(), d), 0);
    }
  }
}

TEST(Report, Fields) {
  SegmentCase c;
  const auto r = critical_report(c.j, c.sigma, c.e, c.all);
  EXPECT_EQ(r.coupling, 1.5);
  EXPECT_EQ(r.critical, 0.0);
  EXPECT_EQ(r.flexibility, 1.5);
  EXPECT_EQ(r.supersat.s, std::min(r.supersat.s_x, r.supersat.s_y));
  EXPECT_EQ(r.droplets.size(), 1u);
}
