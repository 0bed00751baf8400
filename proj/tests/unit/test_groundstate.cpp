#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "gslab/groundstate.hpp"

using namespace gslab;

namespace {

CouplingConfig manual(LatticePtr lat, std::vector<double> v) { return CouplingConfig(std::move(lat), std::move(v)); }

/// Independent reference: every configuration of the region, energies summed
/// directly from the edge list (no incremental updates).
double brute_force_min(const CouplingConfig& j, const Region& region, const BoundaryCondition& bc) {
  const Lattice& lat = j.lattice();
  std::vector<int> spin(lat.num_vertices(), 1);
  for (std::size_t i = 0; i < bc.vertices.size(); ++i) spin[bc.vertices[i]] = bc.values[i];
  const auto m = region.members();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << m.size()); ++code) {
    for (std::size_t i = 0; i < m.size(); ++i) spin[m[i]] = (code >> i & 1u) ? -1 : 1;
    double h = 0.0;
    for (EdgeId e = 0; e < lat.num_edges(); ++e) {
      const auto [a, b] = lat.endpoints(e);
      const bool ia = region.contains(a), ib = region.contains(b);
      if ((ia && ib) || (bc.fixed && (ia || ib))) h -= j[e] * spin[a] * spin[b];
    }
    best = std::min(best, h);
  }
  return best;
}

BoundaryCondition random_bc(const Lattice& lat, const Region& region, std::uint64_t seed) {
  auto verts = external_boundary(lat, region);
  rng::Stream s(seed);
  std::vector<Spin> vals;
  for (std::size_t i = 0; i < verts.size(); ++i) vals.push_back(s.next_below(2) ? 1 : -1);
  return BoundaryCondition::fixed_bc(std::move(verts), std::move(vals));
}

}  // namespace

TEST(Hamiltonian, ZeroCouplings) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto j = manual(lat, std::vector<double>(lat->num_edges(), 0.0));
  EXPECT_EQ(hamiltonian(j, Region::all(*lat), SpinConfig(lat)), 0.0);
}

TEST(Hamiltonian, SingleBond) {
  auto lat = build_lattice(LatticeSpec::segment(2));
  EXPECT_EQ(hamiltonian(manual(lat, {1.0}), Region::all(*lat), SpinConfig(lat)), -1.0);
}

TEST(Hamiltonian, SegmentExample) {
  auto lat = build_lattice(LatticeSpec::segment(3));
  const auto j = manual(lat, {1.5, -2.0});
  EXPECT_DOUBLE_EQ(hamiltonian(j, Region::all(*lat), SpinConfig::parse(lat, "++-")), -3.5);
  EXPECT_DOUBLE_EQ(brute_force_min(j, Region::all(*lat), {}), -3.5);
}

TEST(Hamiltonian, FlipSymmetry) {
  auto lat = build_lattice(LatticeSpec::box(4, 3));
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    std::vector<Spin> s(lat->num_vertices());
    rng::Stream r(seed + 1000);
    for (auto& x : s) x = r.next_below(2) ? 1 : -1;
    const SpinConfig sigma(lat, s);
    const auto region = Region::rect(*lat, {0, 0, 3, 2});
    EXPECT_EQ(hamiltonian(j, region, sigma), hamiltonian(j, region, sigma.flipped()));
  }
}

TEST(GroundStateTest, SegmentExampleIsGroundState) {
  auto lat = build_lattice(LatticeSpec::segment(3));
  const auto j = manual(lat, {1.5, -2.0});
  EXPECT_TRUE(is_ground_state(j, SpinConfig::parse(lat, "++-"), Region::all(*lat)).ok);
}

TEST(GroundStateTest, SegmentExampleWitness) {
  auto lat = build_lattice(LatticeSpec::segment(3));
  const auto j = manual(lat, {1.5, -2.0});
  const auto check = is_ground_state(j, SpinConfig::parse(lat, "+++"), Region::all(*lat));
  EXPECT_FALSE(check.ok);
  EXPECT_DOUBLE_EQ(check.min_sum, -2.0);
  EXPECT_EQ(check.witness, (std::vector<VertexId>{2}));  // the third vertex
}

TEST(GroundStateTest, FerromagnetEveryWindow) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  rng::Stream r(5);
  std::vector<double> v(lat->num_edges());
  for (auto& x : v) x = 0.1 + r.next_unit();
  const auto j = manual(lat, v);
  for (int w = 1; w <= 4; ++w)
    for (int h = 1; h <= 4; ++h)
      EXPECT_TRUE(is_ground_state(j, SpinConfig(lat), Region::rect(*lat, {0, 0, w, h})).ok);
}

TEST(GroundStateTest, WindowCap) {
  auto lat = build_lattice(LatticeSpec::box(5, 5));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 1);
  EXPECT_THROW(is_ground_state(j, SpinConfig(lat), Region::all(*lat)), SizingError);
}

TEST(Solve, SegmentExample) {
  auto lat = build_lattice(LatticeSpec::segment(3));
  const auto j = manual(lat, {1.5, -2.0});
  const auto gs = solve_ground_state(j, Region::all(*lat), BoundaryCondition::free_bc());
  EXPECT_EQ(gs.state.to_string(), "++-");
  ASSERT_TRUE(gs.partner.has_value());
  EXPECT_EQ(gs.partner->to_string(), "--+");
  EXPECT_DOUBLE_EQ(gs.energy, -3.5);
}

TEST(Solve, Ferromagnet2x2) {
  auto lat = build_lattice(LatticeSpec::box(2, 2));
  const auto gs = solve_ground_state(manual(lat, {1, 1, 1, 1}), Region::all(*lat), {});
  EXPECT_EQ(gs.state.to_string(), "++++");
  EXPECT_EQ(gs.partner->to_string(), "----");
  EXPECT_DOUBLE_EQ(gs.energy, -4.0);
}

TEST(Solve, TieIsReported) {
  auto lat = build_lattice(LatticeSpec::segment(3));
  EXPECT_THROW(solve_ground_state(manual(lat, {1.0, 0.0}), Region::all(*lat), {}), DegenerateDisorderError);
  SolveOptions lax;
  lax.audit_ties = false;
  EXPECT_NO_THROW(solve_ground_state(manual(lat, {1.0, 0.0}), Region::all(*lat), {}, lax));
}

TEST(Solve, FixedBoundaryConsistency) {
  auto lat = build_lattice(LatticeSpec::box(5, 4));
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto whole = solve_ground_state(j, Region::all(*lat), {});
    const auto inner = Region::rect(*lat, {1, 1, 3, 2});
    const auto bc = BoundaryCondition::from_config(whole.state, inner);
    const auto local = solve_ground_state(j, inner, bc);
    EXPECT_EQ(local.state.restricted(inner), whole.state.restricted(inner));
  }
}

TEST(Solve, MatchesBruteForce) {
  auto lat = build_lattice(LatticeSpec::box(5, 5));
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const auto j = sample_couplings(lat, seed % 2 ? DistributionSpec::gaussian() : DistributionSpec::uniform(1.0), seed);
    const Rect rects[] = {{0, 0, 4, 4}, {1, 1, 3, 3}, {0, 1, 5, 3}, {1, 0, 2, 5}};
    const Rect rect = rects[seed % 4];
    const auto region = Region::rect(*lat, rect);
    const BoundaryCondition bc = seed % 3 == 0 ? BoundaryCondition::free_bc() : random_bc(*lat, region, seed);
    const double ref = brute_force_min(j, region, bc);
    const auto gray = solve_ground_state(j, region, bc, {SolverKind::gray_code, true, kMaxFreeSpins});
    const auto dp = solve_ground_state(j, region, bc, {SolverKind::transfer, true, kMaxFreeSpins});
    EXPECT_EQ(gray.energy, ref) << "seed " << seed;
    EXPECT_EQ(dp.energy, ref) << "seed " << seed;
    EXPECT_EQ(gray.state, dp.state) << "seed " << seed;
    // Under free conditions on a subregion the spins outside are placeholders.
    if (bc.fixed) {
      EXPECT_TRUE(is_ground_state(j, gray.state, region).ok) << "seed " << seed;
    }
  }
}

TEST(Solve, TransferOnTallStrip) {
  auto lat = build_lattice(LatticeSpec::strip(8, 6));
  const auto region = Region::rect(*lat, {lat->min_x() + 1, 0, 6, 4});
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto bc = random_bc(*lat, region, seed);
    const auto gray = solve_ground_state(j, region, bc, {SolverKind::gray_code, true, kMaxFreeSpins});
    const auto dp = solve_ground_state(j, region, bc, {SolverKind::transfer, true, kMaxFreeSpins});
    EXPECT_EQ(gray.state, dp.state);
    EXPECT_DOUBLE_EQ(gray.energy, dp.energy);
  }
}

TEST(Solve, FreeSpinCap) {
  auto lat = build_lattice(LatticeSpec::box(6, 5));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 3);
  EXPECT_THROW(solve_ground_state(j, Region::all(*lat), {}), SizingError);
  EXPECT_NO_THROW(solve_ground_state(j, Region::all(*lat), {}, {SolverKind::transfer, true, kMaxFreeSpins}));
}

TEST(Solve, BoundaryMustMatch) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 3);
  const auto inner = Region::rect(*lat, {1, 1, 2, 2});
  EXPECT_THROW(solve_ground_state(j, inner, BoundaryCondition::fixed_bc({0}, {1})), StructuralError);
}

TEST(Enumerate, OneDimensionHasTwoStates) {
  for (int len = 3; len <= 12; ++len) {
    auto lat = build_lattice(LatticeSpec::segment(len));
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
      const auto gs = enumerate_window_ground_states(j, Region::all(*lat), Region::all(*lat));
      ASSERT_EQ(gs.size(), 2u);
      for (const auto& st : gs.states)
        for (EdgeId e = 0; e < lat->num_edges(); ++e) EXPECT_EQ(st.witness.bond(e), j[e] > 0 ? 1 : -1);
      // Inner window with boundary conditions on both sides: still flip-related pairs only
      // when the window holds a single bond class.
      const auto inner = Region::rect(*lat, {1, 0, len - 2, 1});
      const auto gi = enumerate_window_ground_states(j, inner, inner);
      EXPECT_GE(gi.size(), 2u);
      EXPECT_EQ(gi.size() % 2, 0u);
    }
  }
}

TEST(Enumerate, FerromagnetCenter) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto j = manual(lat, std::vector<double>(lat->num_edges(), 1.0));
  const auto center = Region(*lat, {*lat->vertex_at({1, 1})});
  const auto gs = enumerate_window_ground_states(j, Region::all(*lat), center);
  ASSERT_EQ(gs.size(), 2u);
  EXPECT_EQ(gs.states[0].spins, "+");
  EXPECT_EQ(gs.states[1].spins, "-");
}

TEST(Enumerate, CountingBoundsAndFlipClosure) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const auto outer = Region::rect(*lat, {1, 1, 2, 2});
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto gs = enumerate_window_ground_states(j, outer, outer);
    EXPECT_EQ(gs.size() % 2, 0u);
    EXPECT_LE(gs.size(), 16u);
    EXPECT_EQ(gs.boundary_conditions, 256u);
    std::uint64_t total = 0;
    for (const auto& st : gs.states) {
      total += st.multiplicity;
      EXPECT_EQ(gs.states[st.partner].multiplicity, st.multiplicity);
      EXPECT_EQ(gs.states[st.partner].key, st.key ^ 0xFu);
      EXPECT_TRUE(is_ground_state(j, st.witness, outer).ok);
    }
    EXPECT_EQ(total, 256u);
  }
}

TEST(Enumerate, SerialAndParallelAgree) {
  auto lat = build_lattice(LatticeSpec::box(5, 5));
  const auto outer = Region::rect(*lat, {1, 1, 3, 3});
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 77);
  EnumerateOptions one, four;
  one.threads = 1;
  four.threads = 4;
  const auto a = enumerate_window_ground_states(j, outer, outer, one);
  const auto b = enumerate_window_ground_states(j, outer, outer, four);
  ASSERT_TRUE(a.same_states(b));
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.states[i].witness_bc, b.states[i].witness_bc);
}

TEST(Enumerate, TranslationCovariance) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto lat = build_lattice(LatticeSpec::box(4, 4));
    LatticeSpec shifted_spec = LatticeSpec::box(4, 4);
    shifted_spec.origin = Coord{static_cast<int>(seed) - 5, 3};
    auto shifted = build_lattice(shifted_spec);
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto js = transport(j, shifted);
    const auto a = enumerate_window_ground_states(j, Region::rect(*lat, {1, 1, 2, 2}), Region::rect(*lat, {1, 1, 2, 1}));
    const Rect o{shifted->min_x() + 1, shifted->min_y() + 1, 2, 2};
    const Rect w{o.x0, o.y0, 2, 1};
    const auto b = enumerate_window_ground_states(js, Region::rect(*shifted, o), Region::rect(*shifted, w));
    EXPECT_TRUE(a.same_states(b));
  }
}

TEST(Enumerate, BoundaryCap) {
  auto lat = build_lattice(LatticeSpec::box(7, 7));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 1);
  const auto outer = Region::rect(*lat, {1, 1, 5, 5});
  EXPECT_THROW(enumerate_window_ground_states(j, outer, outer), SizingError);
}

TEST(UniformMeasure, EqualWeights) {
  auto lat = build_lattice(LatticeSpec::segment(4));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 1);
  const auto gs = enumerate_window_ground_states(j, Region::all(*lat), Region::all(*lat));
  const auto mu = uniform_measure(gs);
  ASSERT_EQ(mu.weights.size(), 2u);
  EXPECT_DOUBLE_EQ(mu.weights[0], 0.5);
  EXPECT_DOUBLE_EQ(mu.weights[1], 0.5);
}

TEST(UniformMeasure, PairEqualityFrequency) {
  GroundStateSet fake;
  for (int i = 0; i < 4; ++i) {
    auto lat = build_lattice(LatticeSpec::segment(2));
    fake.states.push_back({static_cast<std::uint64_t>(i), "", 1, 0, SpinConfig(lat), 0, {}});
  }
  const int draws = 100000;
  int equal = 0;
  for (int t = 0; t < draws; ++t) {
    const auto [a, b] = sample_replica_pair(fake, rng::derive(11, t));
    equal += a == b;
  }
  const double p = 0.25, sd = std::sqrt(p * (1 - p) / draws);
  EXPECT_LT(std::abs(equal / double(draws) - p), 3 * sd);
}
