#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gslab/couplings.hpp"

using namespace gslab;

TEST(Couplings, Deterministic) {
  auto lat = build_lattice(LatticeSpec::box(4, 4));
  const auto a = sample_couplings(lat, DistributionSpec::gaussian(), 42);
  const auto b = sample_couplings(lat, DistributionSpec::gaussian(), 42);
  EXPECT_EQ(a, b);
  const auto c = sample_couplings(lat, DistributionSpec::gaussian(), 43);
  EXPECT_FALSE(a == c);
}

TEST(Couplings, GaussianMean) {
  auto lat = build_lattice(LatticeSpec::box(100, 10), 2000);
  // 100x10 has 1890 edges; draw several seeds to reach 10^4 values.
  std::vector<double> all;
  for (std::uint64_t seed = 0; all.size() < 10000; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    all.insert(all.end(), j.values().begin(), j.values().end());
  }
  all.resize(10000);
  const double mean = std::accumulate(all.begin(), all.end(), 0.0) / 1e4;
  EXPECT_LT(std::abs(mean), 5.0 / std::sqrt(1e4));
}

TEST(Couplings, PairwiseDistinct) {
  auto lat = build_lattice(LatticeSpec::box(30, 30));
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    EXPECT_FALSE(has_tie({j.values().begin(), j.values().end()}, tol::tie));
  }
}

TEST(Couplings, SharedEdgesAgreeAcrossLatticeSizes) {
  auto small = build_lattice(LatticeSpec::box(4, 4));
  auto large = build_lattice(LatticeSpec::box(8, 8));
  const auto js = sample_couplings(small, DistributionSpec::gaussian(), 9);
  const auto jl = sample_couplings(large, DistributionSpec::gaussian(), 9);
  for (EdgeId e = 0; e < small->num_edges(); ++e) {
    const auto [a, b] = small->endpoints(e);
    const auto le = large->edge_between(*large->vertex_at(small->coord(a)), *large->vertex_at(small->coord(b)));
    ASSERT_TRUE(le.has_value());
    EXPECT_EQ(js[e], jl[*le]);
  }
}

namespace {

double ks_statistic(std::vector<double> xs, const DistributionSpec& d) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = d.cdf(xs[i]);
    worst = std::max({worst, std::abs(f - i / n), std::abs((i + 1) / n - f)});
  }
  return worst;
}

std::vector<double> draw_many(const DistributionSpec& d, std::size_t n) {
  auto lat = build_lattice(LatticeSpec::box(32, 32));
  std::vector<double> out;
  for (std::uint64_t seed = 100; out.size() < n; ++seed) {
    const auto j = sample_couplings(lat, d, seed);
    out.insert(out.end(), j.values().begin(), j.values().end());
  }
  out.resize(n);
  return out;
}

}  // namespace

TEST(Couplings, KolmogorovSmirnov) {
  // Critical value of the one-sample KS statistic at significance 0.001 is 1.95 / sqrt(n).
  const std::size_t n = 100000;
  for (const auto& d : {DistributionSpec::gaussian(0, 1), DistributionSpec::gaussian(0.5, 2), DistributionSpec::uniform(1.5)}) {
    EXPECT_LT(ks_statistic(draw_many(d, n), d), 1.95 / std::sqrt(static_cast<double>(n))) << to_string(d);
  }
}

TEST(Couplings, UniformSupport) {
  for (double v : draw_many(DistributionSpec::uniform(2.0), 5000)) {
    EXPECT_GT(v, -2.0);
    EXPECT_LT(v, 2.0);
  }
}

TEST(Couplings, ExactCdf) {
  const auto g = DistributionSpec::gaussian();
  EXPECT_NEAR(g.cdf(0.0), 0.5, 1e-15);
  EXPECT_NEAR(g.cdf(1.959963984540054), 0.975, 1e-12);
  EXPECT_NEAR(g.mass(-1.0, 1.0), 0.6826894921370859, 1e-12);
  const auto u = DistributionSpec::uniform(2.0);
  EXPECT_DOUBLE_EQ(u.cdf(-3.0), 0.0);
  EXPECT_DOUBLE_EQ(u.cdf(1.0), 0.75);
  EXPECT_DOUBLE_EQ(u.mass(-1.0, 1.0), 0.5);
}

TEST(Couplings, ParseDistribution) {
  EXPECT_EQ(parse_distribution("gaussian:0,1"), DistributionSpec::gaussian(0, 1));
  EXPECT_EQ(parse_distribution("uniform:2.5"), DistributionSpec::uniform(2.5));
  EXPECT_EQ(to_string(parse_distribution("gaussian:0.5,2")), "gaussian:0.5,2");
  EXPECT_THROW(parse_distribution("cauchy:1"), ConfigError);
  EXPECT_THROW(parse_distribution("gaussian:0,-1"), ConfigError);
  EXPECT_THROW(parse_distribution("uniform:x"), ConfigError);
}

TEST(Modify, Identity) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 1);
  EXPECT_EQ(modify(j, 4, j[4]), j);
  EXPECT_TRUE(modify(j, 4, j[4]).manual());
  EXPECT_FALSE(j.manual());
}

TEST(Modify, LastWriteWins) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 1);
  EXPECT_EQ(modify(modify(j, 2, 0.3), 2, -1.7), modify(j, 2, -1.7));
}

TEST(Modify, Locality) {
  auto lat = build_lattice(LatticeSpec::box(3, 3));
  const auto j = sample_couplings(lat, DistributionSpec::gaussian(), 1);
  const auto m = modify(j, 5, 9.0);
  int changed = 0;
  for (EdgeId e = 0; e < j.size(); ++e) changed += j[e] != m[e];
  EXPECT_EQ(changed, 1);
  EXPECT_EQ(m[5], 9.0);
  EXPECT_NE(j[5], 9.0);
  EXPECT_THROW(modify(j, 99, 1.0), StructuralError);
}
