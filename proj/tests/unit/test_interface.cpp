#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "gslab/groundstate.hpp"
#include "gslab/interface.hpp"

using namespace gslab;

namespace {

Region column(const Lattice& lat, int x) {
  std::vector<VertexId> v;
  for (VertexId i = 0; i < lat.num_vertices(); ++i)
    if (lat.coord(i).x == x) v.push_back(i);
  return Region(lat, v);
}

}  // namespace

TEST(Interface, Basics) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 3);
  SpinConfig s = solve_ground_state(j, Region::all(*lat), {}).state;
  EXPECT_TRUE(interface(s, s.flipped()).empty());
  const VertexId v = *lat->vertex_at({1, 2});
  const auto one = interface(s, s.flipped_on(Region(*lat, {v})));
  std::vector<EdgeId> inc(lat->incident(v).begin(), lat->incident(v).end());
  std::sort(inc.begin(), inc.end());
  EXPECT_EQ(one, inc);

  auto other = build_lattice(LatticeSpec::box(3, 3));
  EXPECT_THROW(interface(s, SpinConfig(other)), StructuralError);
}

TEST(Interface, SymmetryUnderFlips) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  rng::Stream rng(11);
  for (int t = 0; t < 50; ++t) {
    std::vector<Spin> a(lat->num_vertices()), b(lat->num_vertices());
    for (auto& s : a) s = rng.next_below(2) ? 1 : -1;
    for (auto& s : b) s = rng.next_below(2) ? 1 : -1;
    const SpinConfig sa(lat, a), sb(lat, b);
    EXPECT_EQ(interface(sa, sb), interface(sb, sa));
    EXPECT_EQ(interface(sa, sb), interface(sa.flipped(), sb));
  }
}

TEST(Interface, EnumeratedStatesMatchBondProducts) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const Region outer = Region::rect(*lat, {1, 1, 2, 2});
  int nonempty = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto gs = enumerate_window_ground_states(j, outer, outer);
    for (const auto& a : gs.states) {
      for (const auto& b : gs.states) {
        const auto got = interface(a.witness, b.witness);
        std::vector<EdgeId> ref;
        for (EdgeId e = 0; e < lat->num_edges(); ++e) {
          const auto [x, y] = lat->endpoints(e);
          if (a.witness[x] * a.witness[y] != b.witness[x] * b.witness[y]) ref.push_back(e);
        }
        EXPECT_EQ(got, ref);
        if (!got.empty()) ++nonempty;
      }
    }
  }
  EXPECT_GT(nonempty, 0);
}

TEST(Decompose, EmptyAndUnitLoop) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const SpinConfig plus(lat);
  const auto empty = decompose(plus, plus);
  EXPECT_TRUE(empty.walls.empty());
  EXPECT_TRUE(empty.sanity.clean());

  const auto loop = decompose(plus, plus.flipped_on(Region(*lat, {*lat->vertex_at({1, 1})})));
  ASSERT_EQ(loop.walls.size(), 1U);
  EXPECT_EQ(loop.walls[0].dual_edges.size(), 4U);
  EXPECT_EQ(loop.walls[0].vertices.size(), 4U);
  EXPECT_EQ(loop.walls[0].cycles, 1U);
  EXPECT_EQ(loop.sanity.loops, 1U);
  EXPECT_EQ(loop.sanity.dangling, 0U);
  EXPECT_FALSE(loop.sanity.clean());
  EXPECT_FALSE(loop.walls[0].tethered);
}

TEST(Decompose, DanglingAndBranching) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  // One interior edge alone leaves two interior dual ends of degree 1.
  const EdgeId e = *lat->edge_between(*lat->vertex_at({1, 1}), *lat->vertex_at({2, 1}));
  const auto d = decompose(*lat, {e}, build_dual(*lat));
  EXPECT_EQ(d.sanity.dangling, 2U);
  EXPECT_EQ(d.sanity.branch_hist.at(1), 2U);

  // Every edge around the centre face's corner (1,1)-(2,2) cell: degree 4 at that dual vertex.
  std::vector<EdgeId> cross;
  const Coord c{2, 2};
  for (EdgeId f : lat->incident(*lat->vertex_at(c))) cross.push_back(f);
  const auto d4 = decompose(*lat, cross, build_dual(*lat));
  EXPECT_EQ(d4.walls.size(), 1U);
  EXPECT_EQ(d4.sanity.branch_hist.at(2), 4U);
}

TEST(Decompose, ColumnFlipGivesTwoTetheredWalls) {
  auto lat = build_lattice(LatticeSpec::strip(7, 4));
  const SpinConfig plus(lat);
  const auto d = decompose(plus, plus.flipped_on(column(*lat, 0)));
  ASSERT_EQ(d.walls.size(), 2U);
  for (const auto& w : d.walls) {
    EXPECT_TRUE(w.tethered);
    EXPECT_EQ(w.axis_crossings, 1);
    EXPECT_EQ(w.cycles, 0U);
  }
  EXPECT_TRUE(d.sanity.clean());
  EXPECT_EQ(count_tethered(d, *lat, 0, 0), 0U);
  EXPECT_EQ(count_tethered(d, *lat, 1, 0), 2U);
  EXPECT_EQ(count_tethered(d, *lat, 3, 2), 2U);
  EXPECT_THROW(count_tethered(d, *lat, 4, 0), SizingError);
  EXPECT_THROW(count_tethered(d, *lat, 1, 4), SizingError);

  // A box has no x-axis, so nothing is tethered.
  auto box = build_lattice(LatticeSpec::box(5, 4));
  const SpinConfig bplus(box);
  for (const auto& w : decompose(bplus, bplus.flipped_on(column(*box, 2))).walls) EXPECT_FALSE(w.tethered);
}

TEST(Decompose, CountMonotoneInN) {
  auto lat = build_lattice(LatticeSpec::strip(11, 5));
  rng::Stream rng(5);
  for (int t = 0; t < 40; ++t) {
    std::vector<Spin> a(lat->num_vertices());
    for (auto& s : a) s = rng.next_below(2) ? 1 : -1;
    const auto d = decompose(SpinConfig(lat), SpinConfig(lat, a));
    for (int k = 0; k < 5; ++k) {
      std::size_t prev = 0;
      for (int n = 0; n <= 5; ++n) {
        const auto c = count_tethered(d, *lat, n, k);
        EXPECT_GE(c, prev);
        prev = c;
      }
    }
  }
  EXPECT_EQ(count_tethered(decompose(SpinConfig(lat), SpinConfig(lat)), *lat, 5, 0), 0U);
}

TEST(Parity, Examples) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto faces = lat->faces();
  CouplingConfig ferro(lat, std::vector<double>(lat->num_edges(), 1.0));
  for (const Face& f : faces) EXPECT_TRUE(parity_check(ferro, SpinConfig(lat), face_cycle(f)));

  // One negative coupling on a face: every configuration leaves an odd number unsatisfied.
  std::vector<double> values(ferro.values().begin(), ferro.values().end());
  values[faces[0].edges[1]] = -1.0;
  CouplingConfig frustrated(lat, values);
  for (std::uint32_t code = 0; code < 512; ++code) {
    std::vector<Spin> s(9);
    for (int i = 0; i < 9; ++i) s[i] = (code >> i & 1U) ? -1 : 1;
    const SpinConfig sigma(lat, s);
    int unsat = 0;
    for (EdgeId e : faces[0].edges)
      if ((frustrated[e] > 0) != (sigma.bond(e) > 0)) ++unsat;
    EXPECT_EQ(unsat % 2, 1);
    EXPECT_TRUE(parity_check(frustrated, sigma, face_cycle(faces[0])));
  }

  // The outer 8-cycle (sum of all four faces) is a cycle too.
  std::set<EdgeId> outer;
  for (const Face& f : faces)
    for (EdgeId e : f.edges)
      if (!outer.insert(e).second) outer.erase(e);
  EXPECT_TRUE(parity_check(frustrated, SpinConfig(lat), {outer.begin(), outer.end()}));

  EXPECT_THROW(parity_check(ferro, SpinConfig(lat), {}), StructuralError);
  EXPECT_THROW(parity_check(ferro, SpinConfig(lat), {0, 1}), StructuralError);
}

TEST(Parity, GroundStatesOfBox) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const Region outer = Region::rect(*lat, {1, 1, 2, 2});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    for (const auto& st : enumerate_window_ground_states(j, outer, outer).states)
      for (const Face& f : lat->faces()) EXPECT_TRUE(parity_check(j, st.witness, face_cycle(f)));
  }
}

TEST(Rungs, ParallelWallsAtDistanceOne) {
  auto lat = build_lattice(LatticeSpec::box(5, 4));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 9);
  const SpinConfig sigma(lat);
  const SpinConfig other = sigma.flipped_on(column(*lat, 2));
  const auto iface = interface(sigma, other);
  const Region all = Region::all(*lat);
  const auto rungs = enumerate_rungs(j, sigma, iface, all, all, 1);
  // One rung per interior row of faces, crossing the vertical edge of column 2.
  ASSERT_EQ(rungs.size(), 3U);
  for (const Rung& r : rungs) {
    ASSERT_EQ(r.edges.size(), 1U);
    EXPECT_FALSE(lat->horizontal(r.edges[0]));
    EXPECT_EQ(lat->coord(lat->endpoints(r.edges[0]).first).x, 2);
    EXPECT_EQ(r.energy, j[r.edges[0]] * sigma.bond(r.edges[0]));
    EXPECT_NE(r.wall_a, r.wall_b);
  }
  // Walls two cells apart: rungs of every length up to K, all off the interface.
  std::vector<VertexId> band;
  for (VertexId v = 0; v < lat->num_vertices(); ++v)
    if (lat->coord(v).x == 1 || lat->coord(v).x == 2) band.push_back(v);
  const SpinConfig wide = sigma.flipped_on(Region(*lat, band));
  const auto iface2 = interface(sigma, wide);
  const auto longer = enumerate_rungs(j, sigma, iface2, all, all, 7);
  EXPECT_TRUE(enumerate_rungs(j, sigma, iface2, all, all, 1).empty());
  EXPECT_GT(longer.size(), 3U);
  for (const Rung& r : longer) {
    for (EdgeId e : r.edges) EXPECT_TRUE(std::find(iface2.begin(), iface2.end(), e) == iface2.end());
    EXPECT_EQ(rung_energy(j, sigma, r.edges), rung_energy(j, wide, r.edges));
    EXPECT_EQ(r.energy, rung_energy(j, sigma, r.edges));
    std::set<DualVertexId> distinct(r.vertices.begin(), r.vertices.end());
    EXPECT_EQ(distinct.size(), r.vertices.size());
  }
  EXPECT_THROW(enumerate_rungs(j, sigma, iface, all, all, 13), SizingError);
  EXPECT_TRUE(enumerate_rungs(j, sigma, {}, all, all, 5).empty());
}

TEST(Rungs, JlWallsMergeAsBoxGrows) {
  auto lat = build_lattice(LatticeSpec::box(6, 6));
  const auto dual = build_dual(*lat);
  // A U-shaped droplet: its wall enters box_j twice but is connected outside it.
  std::vector<VertexId> u;
  for (int x = 1; x <= 4; ++x) u.push_back(*lat->vertex_at({x, 0}));
  for (int y = 1; y <= 3; ++y) {
    u.push_back(*lat->vertex_at({1, y}));
    u.push_back(*lat->vertex_at({4, y}));
  }
  const SpinConfig plus(lat);
  const auto iface = interface(plus, plus.flipped_on(Region(*lat, u)));
  const Region small = Region::rect(*lat, {0, 2, 6, 4});
  const Region all = Region::all(*lat);
  const auto split = jl_walls(*lat, dual, iface, small, small);
  const auto merged = jl_walls(*lat, dual, iface, small, all);
  EXPECT_GT(split.walls.size(), merged.walls.size());
  EXPECT_THROW(jl_walls(*lat, dual, iface, all, small), StructuralError);
}

TEST(Rungs, Infima) {
  EXPECT_FALSE(rung_infima({}, 0, 0).touching);
  EXPECT_FALSE(rung_infima({}, 0, 0).touching_without);
  EXPECT_FALSE(rung_infima({}, 0, 0).containing);

  const std::vector<Rung> one{{{0, 1}, {4}, 0, 1, 0.7}};
  const auto r = rung_infima(one, 0, 4);
  EXPECT_EQ(*r.containing, 0.7);
  EXPECT_EQ(*r.touching, 0.7);
  EXPECT_FALSE(r.touching_without);
}

TEST(Rungs, ContainingInfimumShiftsWithCoupling) {
  auto lat = build_lattice(LatticeSpec::box(5, 4));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 21);
  const SpinConfig sigma(lat);
  const auto iface = interface(sigma, sigma.flipped_on(column(*lat, 2)));
  const Region all = Region::all(*lat);
  const auto rungs = enumerate_rungs(j, sigma, iface, all, all, 1);
  const EdgeId f = rungs.front().edges[0];
  ASSERT_EQ(sigma.bond(f), 1);
  const double delta = 0.375;
  const auto before = rung_infima(rungs, rungs.front().wall_a, f);
  const auto after =
      rung_infima(enumerate_rungs(modify(j, f, j[f] + delta), sigma, iface, all, all, 1), rungs.front().wall_a, f);
  EXPECT_DOUBLE_EQ(*after.containing, *before.containing + delta);
  EXPECT_EQ(*after.touching_without, *before.touching_without);
}
