#pragma once

// Monte-Carlo harness over disorder: replica-pair records, the event catalog,
// event estimates, translation averages, wall statistics and the verification
// suites. Every trial draws from rng::derive(seed, trial), so reports depend only
// on the configuration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/criticality.hpp"
#include "gslab/error.hpp"
#include "gslab/groundstate.hpp"
#include "gslab/interface.hpp"
#include "gslab/lattice.hpp"
#include "gslab/parallel.hpp"
#include "gslab/rng.hpp"
#include "gslab/serialize.hpp"
#include "gslab/spins.hpp"

namespace gslab {

inline constexpr double kWilsonZ = 1.96;
inline constexpr double kSlackWidths = 3.0;
inline constexpr std::uint32_t kMaxTrialRetries = 16;
inline constexpr std::size_t kMaxCounterexamples = 5;

// ---- statistics ----

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// Wilson score interval for a binomial proportion.
inline Interval wilson_interval(std::uint64_t successes, std::uint64_t trials, double z = kWilsonZ) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
  const double half = z / (1.0 + z2 / n) * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

/// 16 hex digits of a mix64 chain over the text.
inline std::string fingerprint(std::string_view text) {
  std::uint64_t h = rng::mix64(text.size());
  for (unsigned char c : text) h = rng::combine(h, c);
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << h;
  return os.str();
}

// ---- window setups and trials ----

/// Lattice, outer region and window; both default to the whole lattice.
struct WindowSetup {
  LatticeSpec lattice = LatticeSpec::box(4, 4);
  std::optional<Rect> outer;
  std::optional<Rect> window;
  DistributionSpec dist;

  std::string describe() const {
    std::string s = to_string(lattice);
    s += " outer=" + (outer ? to_string(*outer) : std::string("all"));
    s += " window=" + (window ? to_string(*window) : std::string("outer"));
    return s + " dist=" + to_string(dist);
  }
};

struct ResolvedWindow {
  LatticePtr lattice;
  Region outer;
  Region window;
  std::vector<EdgeId> inside;  // edges with both endpoints in the window
};

inline std::vector<EdgeId> edges_inside(const Lattice& lat, const Region& r) {
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < lat.num_edges(); ++e)
    if (edge_inside(lat, e, r)) out.push_back(e);
  return out;
}

inline ResolvedWindow resolve(const WindowSetup& s) {
  ResolvedWindow r;
  r.lattice = build_lattice(s.lattice);
  r.outer = s.outer ? Region::rect(*r.lattice, *s.outer) : Region::all(*r.lattice);
  r.window = s.window ? Region::rect(*r.lattice, *s.window) : r.outer;
  if (!r.window.subset_of(r.outer)) throw ConfigError("window must lie inside the outer region");
  r.inside = edges_inside(*r.lattice, r.window);
  return r;
}

/// Couplings for one trial. A degenerate draw (a solver tie) is replaced by a
/// re-keyed one; the attempt number is kept in the result.
template <class Body>
auto with_retries(std::uint64_t seed, Body&& body) -> decltype(body(std::uint64_t{}, std::uint32_t{})) {
  for (std::uint32_t attempt = 0; attempt <= kMaxTrialRetries; ++attempt) {
    const std::uint64_t key = attempt == 0 ? seed : rng::combine(seed, attempt, 0x7265747279ULL);
    try {
      return body(key, attempt);
    } catch (const DegenerateDisorderError&) {
    }
  }
  throw DegenerateDisorderError("trial stayed degenerate after " + std::to_string(kMaxTrialRetries) + " redraws");
}

inline EnumerateOptions serial_options(std::vector<EdgeId> tracked = {}) {
  EnumerateOptions o;
  o.tracked = std::move(tracked);
  o.threads = 1;
  return o;
}

// ---- replica-pair records ----

/// (J, sigma, sigma', critical values of both replicas on the tracked edges).
/// Critical values are the restriction-level thresholds from the enumeration.
struct OmegaRecord {
  CouplingConfig j;
  Region outer;
  Region window;
  std::vector<EdgeId> edges;
  std::size_t states = 0;
  std::uint64_t key = 0, key2 = 0;
  SpinConfig sigma, sigma2;  // witnesses
  std::vector<double> c, c2;

  std::size_t position(EdgeId e) const {
    const auto it = std::find(edges.begin(), edges.end(), e);
    if (it == edges.end()) throw ConfigError("edge " + std::to_string(e) + " is not tracked by the record");
    return static_cast<std::size_t>(it - edges.begin());
  }
  double flex(std::size_t i) const { return std::abs(j[edges[i]] - c[i]); }
  double flex2(std::size_t i) const { return std::abs(j[edges[i]] - c2[i]); }
  double flex_min(std::size_t i) const { return std::min(flex(i), flex2(i)); }
  double crit_max(std::size_t i) const { return std::max(c[i], c2[i]); }
};

inline OmegaRecord make_record(const CouplingConfig& j, const GroundStateSet& gs, std::size_t a, std::size_t b) {
  const auto& sa = gs.states.at(a);
  const auto& sb = gs.states.at(b);
  return {j, gs.outer, gs.window, gs.tracked, gs.size(), sa.key, sb.key, sa.witness, sb.witness, sa.critical, sb.critical};
}

/// Re-enumerates and checks both replicas and their critical values, exactly.
inline bool verify_record(const OmegaRecord& r) {
  const auto gs = enumerate_window_ground_states(r.j, r.outer, r.window, serial_options(r.edges));
  const auto a = gs.find(r.key), b = gs.find(r.key2);
  return a && b && gs.size() == r.states && gs.states[*a].critical == r.c && gs.states[*b].critical == r.c2 &&
         gs.states[*a].witness == r.sigma && gs.states[*b].witness == r.sigma2;
}

inline json omega_json(const OmegaRecord& r) {
  return {{"lattice", to_string(r.j.lattice().spec())},
          {"couplings", couplings_json(r.j)},
          {"outer", region_json(r.outer)},
          {"window", region_json(r.window)},
          {"edges", r.edges},
          {"states", r.states},
          {"sigma", r.sigma.to_string()},
          {"sigma_prime", r.sigma2.to_string()},
          {"window_keys", {r.key, r.key2}},
          {"C", r.c},
          {"C_prime", r.c2}};
}

inline OmegaRecord omega_from_json(const json& in) {
  const auto lat = build_lattice(parse_lattice_spec(in.at("lattice").get<std::string>()));
  auto region = [&](const char* name) { return Region(*lat, in.at(name).get<std::vector<VertexId>>()); };
  return {couplings_from_json(in.at("couplings"), lat),
          region("outer"),
          region("window"),
          in.at("edges").get<std::vector<EdgeId>>(),
          in.at("states").get<std::size_t>(),
          in.at("window_keys").at(0).get<std::uint64_t>(),
          in.at("window_keys").at(1).get<std::uint64_t>(),
          SpinConfig::parse(lat, in.at("sigma").get<std::string>()),
          SpinConfig::parse(lat, in.at("sigma_prime").get<std::string>()),
          in.at("C").get<std::vector<double>>(),
          in.at("C_prime").get<std::vector<double>>()};
}

// ---- event catalog ----

enum class Monotonicity { none, increasing, decreasing, backmodify_closed };

inline std::string_view monotonicity_name(Monotonicity m) {
  switch (m) {
    case Monotonicity::none: return "none";
    case Monotonicity::increasing: return "increasing";
    case Monotonicity::decreasing: return "decreasing";
    case Monotonicity::backmodify_closed: return "backmodify_closed";
  }
  return "none";
}

struct EventParams {
  EdgeId edge = 0;
  double threshold = 0.0;  // c, for threshold events
};

struct EventDef {
  std::string name;
  Monotonicity monotonicity = Monotonicity::none;
  std::string description;
  std::function<bool(const OmegaRecord&, const EventParams&)> holds;
};

inline const std::vector<EventDef>& event_catalog() {
  static const std::vector<EventDef> catalog = [] {
    std::vector<EventDef> c;
    c.push_back({"true", Monotonicity::none, "always", [](const OmegaRecord&, const EventParams&) { return true; }});
    c.push_back({"false", Monotonicity::none, "never", [](const OmegaRecord&, const EventParams&) { return false; }});
    c.push_back({"interface_empty", Monotonicity::none, "sigma = +-sigma' on the window",
                 [](const OmegaRecord& r, const EventParams&) {
                   const std::uint64_t ones = (std::uint64_t{1} << r.window.size()) - 1;
                   return r.key == r.key2 || r.key == (r.key2 ^ ones);
                 }});
    c.push_back({"replicas_equal", Monotonicity::none, "sigma = sigma' on the window",
                 [](const OmegaRecord& r, const EventParams&) { return r.key == r.key2; }});
    c.push_back({"critical_equals_coupling", Monotonicity::none, "C_e = J_e within the tie tolerance",
                 [](const OmegaRecord& r, const EventParams& p) {
                   return std::abs(r.c[r.position(p.edge)] - r.j[p.edge]) <= tol::tie * r.j.scale();
                 }});
    c.push_back({"sigma_e_plus", Monotonicity::increasing, "sigma_e = +1",
                 [](const OmegaRecord& r, const EventParams& p) { return r.sigma.bond(p.edge) > 0; }});
    c.push_back({"sigma_e_minus", Monotonicity::decreasing, "sigma_e = -1",
                 [](const OmegaRecord& r, const EventParams& p) { return r.sigma.bond(p.edge) < 0; }});
    c.push_back({"sigma_e_plus_critical_below_c", Monotonicity::backmodify_closed, "sigma_e = +1 and C_e < c",
                 [](const OmegaRecord& r, const EventParams& p) {
                   return r.sigma.bond(p.edge) > 0 && r.c[r.position(p.edge)] < p.threshold;
                 }});
    c.push_back({"edge_in_interface", Monotonicity::none, "e lies in the interface",
                 [](const OmegaRecord& r, const EventParams& p) { return r.sigma.bond(p.edge) != r.sigma2.bond(p.edge); }});
    return c;
  }();
  return catalog;
}

inline const EventDef& find_event(std::string_view name) {
  for (const auto& e : event_catalog())
    if (e.name == name) return e;
  throw ConfigError("unregistered event '" + std::string(name) + "'");
}

// ---- event estimates ----

struct EstimateConfig {
  WindowSetup setup;
  std::uint64_t trials = 10000;
  std::uint64_t seed = 0;
  std::optional<EdgeId> edge;  // default: the first edge inside the window
  double threshold = 0.0;
  unsigned threads = 0;
};

struct EventEstimate {
  std::string event;
  std::uint64_t trials = 0;
  std::uint64_t successes = 0;
  double estimate = 0.0;
  Interval ci;
  std::uint64_t seed_first = 0;
  std::uint64_t seed_last = 0;
  std::uint64_t redraws = 0;
  EdgeId edge = 0;
  std::string fingerprint;
};

inline EdgeId default_edge(const ResolvedWindow& w, const std::optional<EdgeId>& edge) {
  if (edge) {
    if (std::find(w.inside.begin(), w.inside.end(), *edge) == w.inside.end()) {
      throw ConfigError("edge " + std::to_string(*edge) + " does not lie inside the window");
    }
    return *edge;
  }
  if (w.inside.empty()) throw ConfigError("window contains no edge");
  return w.inside.front();
}

/// One trial: couplings, enumeration with the window edges tracked, a replica pair.
inline OmegaRecord sample_record(const ResolvedWindow& w, const DistributionSpec& dist, std::uint64_t seed,
                                 std::uint32_t* attempts = nullptr) {
  const bool track = w.outer.size() <= kMaxSubsetRegion;
  return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
    const auto j = sample_couplings(w.lattice, dist, key);
    const auto gs = enumerate_window_ground_states(j, w.outer, w.window, serial_options(track ? w.inside : std::vector<EdgeId>{}));
    const auto [a, b] = sample_replica_pair(gs, rng::derive(key, 0, 0x70616972ULL));
    if (attempts) *attempts = attempt;
    return make_record(j, gs, a, b);
  });
}

inline EventEstimate estimate_event(std::string_view name, const EstimateConfig& cfg) {
  const EventDef& ev = find_event(name);
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  const auto w = resolve(cfg.setup);
  const EventParams params{default_edge(w, cfg.edge), cfg.threshold};
  struct Out {
    bool hit;
    std::uint32_t attempts;
  };
  const auto outs = parallel_map(
      cfg.trials,
      [&](std::size_t t) {
        std::uint32_t attempts = 0;
        const auto rec = sample_record(w, cfg.setup.dist, rng::derive(cfg.seed, t), &attempts);
        return Out{ev.holds(rec, params), attempts};
      },
      cfg.threads);
  EventEstimate est;
  est.event = ev.name;
  est.trials = cfg.trials;
  for (const auto& o : outs) {
    est.successes += o.hit ? 1 : 0;
    est.redraws += o.attempts;
  }
  est.estimate = static_cast<double>(est.successes) / static_cast<double>(est.trials);
  est.ci = wilson_interval(est.successes, est.trials);
  est.seed_first = 0;
  est.seed_last = cfg.trials - 1;
  est.edge = params.edge;
  est.fingerprint = fingerprint("estimate " + ev.name + ' ' + cfg.setup.describe() + " trials=" +
                                std::to_string(cfg.trials) + " seed=" + std::to_string(cfg.seed) +
                                " edge=" + std::to_string(params.edge) + " c=" + std::to_string(cfg.threshold));
  return est;
}

// ---- half-plane strips ----

/// Sides and top are fixed, the bottom row is free. The interface is analysed
/// on the solve region, built as its own strip with the same coordinates.
struct StripSetup {
  LatticePtr lattice;
  Region solve;
  LatticePtr analysis;
};

inline StripSetup strip_setup(const LatticeSpec& spec) {
  if (spec.kind != LatticeKind::halfplane_strip) throw ConfigError("wall experiments need a strip lattice");
  if (spec.width < 3 || spec.height < 2) throw SizingError("strip must be at least 3 wide and 2 high");
  StripSetup s;
  s.lattice = build_lattice(spec);
  s.solve = Region::rect(*s.lattice, {s.lattice->min_x() + 1, s.lattice->min_y(), spec.width - 2, spec.height - 1});
  s.analysis = build_lattice({LatticeKind::halfplane_strip, spec.width - 2, spec.height - 1,
                              Coord{s.lattice->min_x() + 1, s.lattice->min_y()}});
  return s;
}

enum class PairStrategy { uniform, antipodal, flip };

inline std::string_view strategy_name(PairStrategy s) {
  switch (s) {
    case PairStrategy::uniform: return "uniform";
    case PairStrategy::antipodal: return "antipodal";
    case PairStrategy::flip: return "flip";
  }
  return "uniform";
}

inline PairStrategy parse_strategy(std::string_view s) {
  if (s == "uniform") return PairStrategy::uniform;
  if (s == "antipodal") return PairStrategy::antipodal;
  if (s == "flip") return PairStrategy::flip;
  throw ConfigError("unknown pair strategy '" + std::string(s) + "' (uniform, antipodal, flip)");
}

struct ReplicaPair {
  SpinConfig a;
  SpinConfig b;
};

/// Two ground states of the solve region, mapped onto the analysis lattice.
///   antipodal: random boundary values vs the same values flipped where x > 0;
///   flip:      one random boundary, the second replica is its global flip;
///   uniform:   a pair from the uniform measure over all boundary conditions.
inline ReplicaPair strip_pair(const CouplingConfig& j, const StripSetup& s, PairStrategy strategy, std::uint64_t seed) {
  const Lattice& lat = *s.lattice;
  const SolveOptions opts{SolverKind::automatic, true, kMaxFreeSpins};
  if (strategy == PairStrategy::uniform) {
    EnumerateOptions eo = serial_options();
    const auto gs = enumerate_window_ground_states(j, s.solve, s.solve, eo);
    const auto [a, b] = sample_replica_pair(gs, seed);
    return {transfer_spins(gs.states[a].witness, s.analysis), transfer_spins(gs.states[b].witness, s.analysis)};
  }
  const auto boundary = external_boundary(lat, s.solve);
  rng::Stream stream(seed);
  std::vector<Spin> v(boundary.size());
  for (auto& x : v) x = stream.next_below(2) ? 1 : -1;
  const auto first = solve_ground_state(j, s.solve, BoundaryCondition::fixed_bc(boundary, v), opts).state;
  if (strategy == PairStrategy::flip) {
    return {transfer_spins(first, s.analysis), transfer_spins(first.flipped(), s.analysis)};
  }
  for (std::size_t i = 0; i < boundary.size(); ++i)
    if (lat.coord(boundary[i]).x > 0) v[i] = static_cast<Spin>(-v[i]);
  const auto second = solve_ground_state(j, s.solve, BoundaryCondition::fixed_bc(boundary, v), opts).state;
  return {transfer_spins(first, s.analysis), transfer_spins(second, s.analysis)};
}

// ---- wall statistics ----

struct WallConfig {
  LatticeSpec strip = LatticeSpec::strip(16, 8);
  PairStrategy strategy = PairStrategy::antipodal;
  int n_lo = 1, n_hi = 6;
  int k_lo = 0, k_hi = 1;
  std::uint64_t trials = 2000;
  std::uint64_t seed = 0;
  DistributionSpec dist;
  unsigned threads = 0;
};

struct WallRow {
  int n = 0;
  int k = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::uint64_t trials = 0;
};

struct WallTable {
  std::vector<WallRow> rows;  // k-major, then n
  std::vector<std::string> violations;
  bool monotone = true;
  bool subadditive = true;
  std::uint64_t redraws = 0;
  std::string fingerprint;

  const WallRow& at(int n, int k) const {
    for (const auto& r : rows)
      if (r.n == n && r.k == k) return r;
    throw ConfigError("no row for n=" + std::to_string(n) + " k=" + std::to_string(k));
  }
};

/// Mean N_{n,k} over disorder and replica pairs, with the checks
/// E N_{n+m,k} <= E N_{n,k} + E N_{m,k} + 3 sigma and monotonicity in n.
inline WallTable wall_statistics(const WallConfig& cfg) {
  if (cfg.n_lo < 1 || cfg.n_hi < cfg.n_lo || cfg.k_lo < 0 || cfg.k_hi < cfg.k_lo) {
    throw ConfigError("wall statistics need 1 <= n_lo <= n_hi and 0 <= k_lo <= k_hi");
  }
  if (cfg.trials < 2) throw ConfigError("wall statistics need at least 2 trials");
  const StripSetup s = strip_setup(cfg.strip);
  const Lattice& an = *s.analysis;
  if (!an.vertex_at({-cfg.n_hi, cfg.k_hi}) || !an.vertex_at({cfg.n_hi, cfg.k_hi})) {
    throw SizingError("segment [-" + std::to_string(cfg.n_hi) + "," + std::to_string(cfg.n_hi) + "] x {" +
                      std::to_string(cfg.k_hi) + "} leaves the analysed strip " + to_string(an.spec()));
  }
  const int nn = cfg.n_hi - cfg.n_lo + 1, nk = cfg.k_hi - cfg.k_lo + 1;
  const DualGraph dual = build_dual(an);
  struct Out {
    std::vector<std::size_t> counts;
    std::uint32_t attempts;
  };
  const auto outs = parallel_map(
      cfg.trials,
      [&](std::size_t t) {
        return with_retries(rng::derive(cfg.seed, t), [&](std::uint64_t key, std::uint32_t attempt) {
          const auto j = sample_couplings(s.lattice, cfg.dist, key);
          const auto pair = strip_pair(j, s, cfg.strategy, rng::derive(key, 0, 0x70616972ULL));
          const auto d = decompose(an, interface(pair.a, pair.b), dual);
          Out o{std::vector<std::size_t>(static_cast<std::size_t>(nn * nk)), attempt};
          for (int k = 0; k < nk; ++k)
            for (int n = 0; n < nn; ++n)
              o.counts[static_cast<std::size_t>(k * nn + n)] = count_tethered(d, an, cfg.n_lo + n, cfg.k_lo + k);
          return o;
        });
      },
      cfg.threads);

  WallTable table;
  const double trials = static_cast<double>(cfg.trials);
  for (int k = 0; k < nk; ++k) {
    for (int n = 0; n < nn; ++n) {
      double sum = 0.0, sq = 0.0;
      for (const auto& o : outs) {
        const double c = static_cast<double>(o.counts[static_cast<std::size_t>(k * nn + n)]);
        sum += c;
        sq += c * c;
      }
      const double mean = sum / trials;
      const double var = std::max(0.0, (sq - trials * mean * mean) / (trials - 1.0));
      table.rows.push_back({cfg.n_lo + n, cfg.k_lo + k, mean, std::sqrt(var / trials), cfg.trials});
    }
  }
  for (const auto& o : outs) table.redraws += o.attempts;

  for (int k = cfg.k_lo; k <= cfg.k_hi; ++k) {
    for (int n = cfg.n_lo; n < cfg.n_hi; ++n) {
      if (table.at(n + 1, k).mean < table.at(n, k).mean) {
        table.monotone = false;
        table.violations.push_back("mean decreases from n=" + std::to_string(n) + " at k=" + std::to_string(k));
      }
    }
    for (int n = cfg.n_lo; n <= cfg.n_hi; ++n) {
      for (int m = n; n + m <= cfg.n_hi; ++m) {
        const auto &a = table.at(n, k), &b = table.at(m, k), &ab = table.at(n + m, k);
        const double slack =
            kSlackWidths * std::sqrt(ab.stderr_ * ab.stderr_ + a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
        if (ab.mean > a.mean + b.mean + slack) {
          table.subadditive = false;
          table.violations.push_back("N_" + std::to_string(n + m) + "," + std::to_string(k) + " exceeds N_" +
                                     std::to_string(n) + " + N_" + std::to_string(m) + " by more than 3 sigma");
        }
      }
    }
  }
  table.fingerprint =
      fingerprint("walls " + to_string(cfg.strip) + ' ' + std::string(strategy_name(cfg.strategy)) + " n=" +
                  std::to_string(cfg.n_lo) + ".." + std::to_string(cfg.n_hi) + " k=" + std::to_string(cfg.k_lo) +
                  ".." + std::to_string(cfg.k_hi) + " trials=" + std::to_string(cfg.trials) +
                  " seed=" + std::to_string(cfg.seed) + " dist=" + to_string(cfg.dist));
  return table;
}

// ---- translation averages ----

struct TranslationConfig {
  std::string stat = "coupling_mean";  // constant | coupling_mean | interface_edge_fraction
  int n = 0;
  LatticeSpec strip = LatticeSpec::strip(8, 6);
  std::optional<Rect> window;  // default: the bottom two rows of the analysed strip
  std::uint64_t trials = 100;
  std::uint64_t seed = 0;
  DistributionSpec dist;
  unsigned threads = 0;
};

struct TranslationPoint {
  int k = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct TranslationAverage {
  std::vector<TranslationPoint> series;
  double average = 0.0;  // (1/(n+1)) sum over k of the series
  std::string fingerprint;
};

inline const std::vector<std::string>& translation_stats() {
  static const std::vector<std::string> names{"constant", "coupling_mean", "interface_edge_fraction"};
  return names;
}

/// The statistic on the window shifted up by k (away from the free bottom),
/// k = 0..n, averaged over trials.
inline TranslationAverage translation_average(const TranslationConfig& cfg) {
  const auto& names = translation_stats();
  if (std::find(names.begin(), names.end(), cfg.stat) == names.end()) {
    throw ConfigError("unknown statistic '" + cfg.stat + "'");
  }
  if (cfg.n < 0) throw ConfigError("n must be >= 0");
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  const StripSetup s = strip_setup(cfg.strip);
  const Lattice& an = *s.analysis;
  const Rect base = cfg.window.value_or(Rect{an.min_x(), 0, an.spec().width, std::min(2, an.spec().height)});
  std::vector<std::vector<EdgeId>> windows;
  for (int k = 0; k <= cfg.n; ++k) {
    const Rect r{base.x0, base.y0 + k, base.w, base.h};
    // The analysed strip is the one the window must fit in; its edges index both lattices by coordinate.
    const Region w = Region::rect(an, r);
    auto inside = edges_inside(an, w);
    if (inside.empty()) throw SizingError("translation window contains no edge");
    windows.push_back(std::move(inside));
  }
  auto on_lattice = [&](EdgeId e) {
    const auto [a, b] = an.endpoints(e);
    return *s.lattice->edge_between(*s.lattice->vertex_at(an.coord(a)), *s.lattice->vertex_at(an.coord(b)));
  };

  const auto outs = parallel_map(
      cfg.trials,
      [&](std::size_t t) {
        std::vector<double> v(windows.size(), 1.0);
        if (cfg.stat == "constant") return v;
        return with_retries(rng::derive(cfg.seed, t), [&](std::uint64_t key, std::uint32_t) {
          const auto j = sample_couplings(s.lattice, cfg.dist, key);
          std::optional<ReplicaPair> pair;
          if (cfg.stat == "interface_edge_fraction") {
            pair = strip_pair(j, s, PairStrategy::antipodal, rng::derive(key, 0, 0x70616972ULL));
          }
          for (std::size_t k = 0; k < windows.size(); ++k) {
            double acc = 0.0;
            for (EdgeId e : windows[k]) {
              if (pair) acc += pair->a.bond(e) != pair->b.bond(e) ? 1.0 : 0.0;
              else acc += j[on_lattice(e)];
            }
            v[k] = acc / static_cast<double>(windows[k].size());
          }
          return v;
        });
      },
      cfg.threads);

  TranslationAverage out;
  const double trials = static_cast<double>(cfg.trials);
  for (std::size_t k = 0; k < windows.size(); ++k) {
    double sum = 0.0, sq = 0.0;
    for (const auto& o : outs) {
      sum += o[k];
      sq += o[k] * o[k];
    }
    const double mean = sum / trials;
    const double var = cfg.trials > 1 ? std::max(0.0, (sq - trials * mean * mean) / (trials - 1.0)) : 0.0;
    out.series.push_back({static_cast<int>(k), mean, std::sqrt(var / trials)});
    out.average += mean;
  }
  out.average /= static_cast<double>(windows.size());
  out.fingerprint = fingerprint("translate " + cfg.stat + " n=" + std::to_string(cfg.n) + ' ' + to_string(cfg.strip) +
                                " window=" + to_string(base) + " trials=" + std::to_string(cfg.trials) +
                                " seed=" + std::to_string(cfg.seed) + " dist=" + to_string(cfg.dist));
  return out;
}

// ---- verification suites ----

struct StatCheck {
  std::string label;
  double lhs = 0.0;    // estimate that should be the larger side
  double rhs = 0.0;
  double slack = 0.0;  // allowed shortfall
  bool pass = true;
};

struct SuiteOptions {
  std::uint64_t trials = 0;  // 0: the suite default
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct SuiteReport {
  std::string name;
  bool passed = true;
  std::uint64_t instances = 0;
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  std::uint64_t redraws = 0;
  std::vector<StatCheck> stats;
  std::vector<json> counterexamples;
  std::vector<std::string> notes;
  std::string fingerprint;
};

namespace detail {

struct InstanceResult {
  std::uint64_t checks = 0;
  std::uint64_t violations = 0;
  std::uint32_t attempts = 0;
  std::optional<json> counterexample;

  void check(bool ok, const std::function<json()>& dump) {
    ++checks;
    if (ok) return;
    ++violations;
    if (!counterexample) counterexample = dump();
  }
};

inline SuiteReport run_instances(std::string name, std::uint64_t n, const SuiteOptions& o,
                                 const std::function<InstanceResult(std::uint64_t index, std::uint64_t seed)>& body) {
  const auto results = parallel_map(n, [&](std::size_t i) { return body(i, rng::derive(o.seed, i)); }, o.threads);
  SuiteReport r;
  r.name = std::move(name);
  r.instances = n;
  for (const auto& x : results) {
    r.checks += x.checks;
    r.violations += x.violations;
    r.redraws += x.attempts;
    if (x.counterexample && r.counterexamples.size() < kMaxCounterexamples) r.counterexamples.push_back(*x.counterexample);
  }
  r.passed = r.violations == 0;
  return r;
}

inline json instance_json(const CouplingConfig& j, const SpinConfig& sigma, std::uint64_t seed, EdgeId e,
                          std::string what) {
  return {{"what", std::move(what)},
          {"instance_seed", seed},
          {"lattice", to_string(j.lattice().spec())},
          {"couplings", couplings_json(j)},
          {"sigma", sigma.to_string()},
          {"edge", e}};
}

inline SpinConfig free_ground_state(const CouplingConfig& j) {
  return solve_ground_state(j, Region::all(j.lattice()), {}).state;
}

inline EdgeId random_edge(const std::vector<EdgeId>& edges, std::uint64_t seed) {
  rng::Stream s(rng::combine(seed, 0x65646765ULL));
  return edges[s.next_below(edges.size())];
}

inline std::vector<EdgeId> all_edges(const Lattice& lat) {
  std::vector<EdgeId> e(lat.num_edges());
  for (EdgeId i = 0; i < e.size(); ++i) e[i] = i;
  return e;
}

/// Flags d's endpoint v: J_d = +-(S_d^v + u) with u in [0.05, 1.05).
inline CouplingConfig super_satisfy(const CouplingConfig& j, EdgeId d, VertexId v, rng::Stream& s) {
  const double mag = super_satisfied_at(j, d, v) + 0.05 + s.next_unit();
  return modify(j, d, s.next_below(2) ? mag : -mag);
}

inline std::uint64_t pick(std::uint64_t requested, std::uint64_t fallback) { return requested ? requested : fallback; }

inline std::string num(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace detail

inline SuiteReport suite_onedim(const SuiteOptions& o) {
  const std::uint64_t per = detail::pick(o.trials, 200);
  constexpr int kLo = 3, kHi = 12;
  auto r = detail::run_instances("onedim", per * (kHi - kLo + 1), o, [&](std::uint64_t i, std::uint64_t seed) {
    const int len = kLo + static_cast<int>(i / per);
    detail::InstanceResult out;
    const auto lat = build_lattice(LatticeSpec::segment(len));
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const Region all = Region::all(*lat);
    const auto gs = enumerate_window_ground_states(j, all, all, serial_options());
    out.check(gs.size() == 2, [&] { return detail::instance_json(j, gs.states[0].witness, seed, 0, "count != 2"); });
    for (const auto& st : gs.states)
      for (EdgeId e = 0; e < lat->num_edges(); ++e)
        out.check((st.witness.bond(e) > 0) == (j[e] > 0),
                  [&] { return detail::instance_json(j, st.witness, seed, e, "bond disagrees with sgn J"); });
    return out;
  });
  r.notes.push_back("segment(L), L = 3..12, " + std::to_string(per) + " seeds each");
  return r;
}

inline SuiteReport suite_oracle(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(3, 3));
  const Region all = Region::all(*lat);
  const auto edges = detail::all_edges(*lat);
  return detail::run_instances("oracle", detail::pick(o.trials, 1000), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = detail::free_ground_state(j);
    const EdgeId e = detail::random_edge(edges, seed);
    const auto a = detail::checked_analysis(j, sigma, e, all);
    const double bis = critical_value_bisection(j, sigma, e, all);
    out.check(std::abs(a.critical - bis) <= tol::oracle,
              [&] { return detail::instance_json(j, sigma, seed, e, "critical value disagrees with bisection"); });
    out.check(std::abs(a.flexibility - std::abs(j[e] - a.critical)) <= tol::slack,
              [&] { return detail::instance_json(j, sigma, seed, e, "F_e != |J_e - C_e|"); });
    return out;
  });
}

inline SuiteReport suite_bound(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(3, 3));
  const Region all = Region::all(*lat);
  return detail::run_instances("bound", detail::pick(o.trials, 500), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = detail::free_ground_state(j);
    for (EdgeId e = 0; e < lat->num_edges(); ++e) {
      const double c = critical_value(j, sigma, e, all);
      out.check(std::abs(c) <= super_satisfied_values(j, e).s + tol::slack,
                [&] { return detail::instance_json(j, sigma, seed, e, "|C_e| > S_e"); });
    }
    return out;
  });
}

inline SuiteReport suite_supersat3(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(5, 5));
  const Region window = Region::rect(*lat, {1, 1, 3, 3});
  const auto inside = edges_inside(*lat, window);
  return detail::run_instances("supersat3", detail::pick(o.trials, 200), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      const auto j = sample_couplings(lat, DistributionSpec::gaussian(), key);
      const EdgeId e = detail::random_edge(inside, key);
      const double s = super_satisfied_values(j, e).s;
      for (int sign : {1, -1}) {
        const auto near = enumerate_window_ground_states(modify(j, e, sign * (s + 1.0)), window, window, serial_options());
        const auto far = enumerate_window_ground_states(modify(j, e, sign * (s + 10.0)), window, window, serial_options());
        out.check(near.same_states(far), [&] {
          return detail::instance_json(j, near.states[0].witness, key, e, "sets differ between S_e+1 and S_e+10");
        });
        for (const auto* gs : {&near, &far})
          for (const auto& st : gs->states)
            out.check(st.witness.bond(e) == sign,
                      [&] { return detail::instance_json(j, st.witness, key, e, "state with the forced bond reversed"); });
      }
      return out;
    });
  });
}

inline SuiteReport suite_pair(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(3, 3));
  const Region all = Region::all(*lat);
  const auto edges = detail::all_edges(*lat);
  return detail::run_instances("pair", detail::pick(o.trials, 300), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = detail::free_ground_state(j);
    const EdgeId e = detail::random_edge(edges, seed);
    const auto drops = critical_droplets(j, sigma, e, all);
    out.check(!drops.empty(), [&] { return detail::instance_json(j, sigma, seed, e, "no critical droplet"); });
    for (const auto& d : drops) {
      std::string why;
      try {
        const auto flipped = droplet_flip(j, sigma, e, d, all);
        if (!(flip_droplet(flipped, d) == sigma)) why = "droplet flip is not an involution";
      } catch (const VerificationError& err) {
        why = err.what();
      }
      out.check(why.empty(), [&] { return detail::instance_json(j, sigma, seed, e, why); });
    }
    return out;
  });
}

inline SuiteReport suite_supersat2(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(4, 4));
  const Region all = Region::all(*lat);
  const auto edges = detail::all_edges(*lat);
  return detail::run_instances("supersat2", detail::pick(o.trials, 300), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      rng::Stream s(rng::combine(key, 0x64ULL));
      const auto base = sample_couplings(lat, DistributionSpec::gaussian(), key);
      const EdgeId e = detail::random_edge(edges, key);
      const auto [ea, eb] = lat->endpoints(e);
      EdgeId d = e;
      while (d == e) d = static_cast<EdgeId>(s.next_below(lat->num_edges()));
      const auto [da, db] = lat->endpoints(d);
      std::vector<VertexId> options;
      for (VertexId x : {da, db})
        if (x != ea && x != eb) options.push_back(x);
      const VertexId x = options[s.next_below(options.size())];
      const auto j = detail::super_satisfy(base, d, x, s);
      const auto sigma = detail::free_ground_state(j);
      for (const auto& drop : critical_droplets(j, sigma, e, all)) {
        const Region r(*lat, drop);
        out.check(r.contains(da) == r.contains(db),
                  [&] { return detail::instance_json(j, sigma, key, e, "droplet boundary contains d=" + std::to_string(d)); });
      }
      return out;
    });
  });
}

inline SuiteReport suite_parity(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(4, 4));
  const Region outer = Region::rect(*lat, {1, 1, 2, 2});
  return detail::run_instances("parity", detail::pick(o.trials, 500), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      const auto j = sample_couplings(lat, DistributionSpec::gaussian(), key);
      for (const auto& st : enumerate_window_ground_states(j, outer, outer, serial_options()).states)
        for (const Face& f : lat->faces())
          out.check(parity_check(j, st.witness, face_cycle(f)),
                    [&] { return detail::instance_json(j, st.witness, key, f.edges[0], "parity fails on a face"); });
      return out;
    });
  });
}

inline SuiteReport suite_interface(const SuiteOptions& o) {
  const StripSetup s = strip_setup(LatticeSpec::strip(8, 6));
  const DualGraph dual = build_dual(*s.analysis);
  auto r = detail::run_instances("interface", detail::pick(o.trials, 300), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      const auto j = sample_couplings(s.lattice, DistributionSpec::gaussian(), key);
      const auto pair = strip_pair(j, s, PairStrategy::antipodal, rng::derive(key, 0, 0x70616972ULL));
      const auto d = decompose(*s.analysis, interface(pair.a, pair.b), dual);
      auto dump = [&](const std::string& what) {
        json x = detail::instance_json(j, pair.a, key, 0, what);
        x["sigma_prime"] = pair.b.to_string();
        x["decomposition"] = decomposition_json(d);
        return x;
      };
      out.check(d.sanity.loops == 0, [&] { return dump("wall contains a loop"); });
      out.check(d.sanity.dangling == 0, [&] { return dump("dangling wall end"); });
      out.check(d.sanity.multiple_crossings == 0, [&] { return dump("wall crosses the x-axis twice"); });
      return out;
    });
  });
  r.notes.push_back("strip:8,6 antipodal pairs, walls analysed on the 6x5 solve region");
  return r;
}

inline SuiteReport suite_monotone(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(5, 5));
  const Region window = Region::rect(*lat, {1, 1, 3, 3});
  const auto inside = edges_inside(*lat, window);
  return detail::run_instances("monotone", detail::pick(o.trials, 300), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      rng::Stream s(rng::combine(key, 0x6dULL));
      const auto j = sample_couplings(lat, DistributionSpec::gaussian(), key);
      const EdgeId e = detail::random_edge(inside, key);
      const double delta = 0.05 + std::abs(s.next_normal());
      const auto gs = enumerate_window_ground_states(j, window, window, serial_options({e}));
      for (const auto& st : gs.states) {
        const bool ok = st.witness.bond(e) > 0 ? j[e] >= st.critical[0] - tol::slack : j[e] <= st.critical[0] + tol::slack;
        out.check(ok, [&] { return detail::instance_json(j, st.witness, key, e, "state on the wrong side of C_e"); });
      }
      for (int sign : {1, -1}) {
        const auto moved = enumerate_window_ground_states(modify(j, e, j[e] + sign * delta), window, window, serial_options());
        for (const auto& st : gs.states) {
          if (st.witness.bond(e) != sign) continue;
          out.check(moved.find(st.key).has_value(), [&] {
            return detail::instance_json(j, st.witness, key, e, sign > 0 ? "raising J_e removed a + state" : "lowering J_e removed a - state");
          });
        }
      }
      return out;
    });
  });
}

inline SuiteReport suite_cylinder(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(4, 4));
  const Region all = Region::all(*lat);
  auto r = detail::run_instances("cylinder", detail::pick(o.trials, 300), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      rng::Stream s(rng::combine(key, 0x63ULL));
      // f horizontal with interior faces above and below; e1, e2 are the opposite sides.
      const int x = static_cast<int>(s.next_below(3)), y = 1 + static_cast<int>(s.next_below(2));
      auto v = [&](int cx, int cy) { return *lat->vertex_at({cx, cy}); };
      auto edge = [&](VertexId a, VertexId b) { return *lat->edge_between(a, b); };
      const EdgeId f = edge(v(x, y), v(x + 1, y));
      const EdgeId e1 = edge(v(x, y + 1), v(x + 1, y + 1));
      const EdgeId e2 = edge(v(x, y - 1), v(x + 1, y - 1));
      auto j = sample_couplings(lat, DistributionSpec::gaussian(), key);
      // The side edges of both faces are super-satisfied at their corner off f.
      for (int dy : {1, -1}) {
        const int cy = y + dy;
        j = detail::super_satisfy(j, edge(v(x, y), v(x, cy)), v(x, cy), s);
        j = detail::super_satisfy(j, edge(v(x + 1, y), v(x + 1, cy)), v(x + 1, cy), s);
      }
      const auto sigma = detail::free_ground_state(j);
      const double ff = flexibility(j, sigma, f, all);
      const double m = std::min(flexibility(j, sigma, e1, all), flexibility(j, sigma, e2, all));
      out.check(ff >= m - tol::slack, [&] { return detail::instance_json(j, sigma, key, f, "F_f < min(F_e1, F_e2)"); });
      return out;
    });
  });
  r.notes.push_back("box:4,4, f interior and horizontal, side edges of its two faces super-satisfied");
  return r;
}

inline SuiteReport suite_covariance(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(4, 4));
  const Rect outer{1, 1, 2, 2};
  return detail::run_instances("covariance", detail::pick(o.trials, 100), o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
      out.attempts = attempt;
      rng::Stream s(rng::combine(key, 0x74ULL));
      const int dx = static_cast<int>(s.next_below(11)) - 5, dy = static_cast<int>(s.next_below(11)) - 5;
      LatticeSpec shifted = LatticeSpec::box(4, 4);
      shifted.origin = Coord{dx, dy};
      const auto lat2 = build_lattice(shifted);
      const auto j = sample_couplings(lat, DistributionSpec::gaussian(), key);
      const auto j2 = transport(j, lat2);
      const Region r1 = Region::rect(*lat, outer);
      const Region r2 = Region::rect(*lat2, {outer.x0 + dx, outer.y0 + dy, outer.w, outer.h});
      const auto a = enumerate_window_ground_states(j, r1, r1, serial_options());
      const auto b = enumerate_window_ground_states(j2, r2, r2, serial_options());
      bool same = a.same_states(b);
      for (std::size_t i = 0; same && i < a.size(); ++i) same = a.states[i].witness.spins() == b.states[i].witness.spins();
      out.check(same, [&] { return detail::instance_json(j, a.states[0].witness, key, 0, "shifted enumeration differs"); });
      return out;
    });
  });
}

inline SuiteReport suite_droplet(const SuiteOptions& o) {
  const auto lat = build_lattice(LatticeSpec::box(3, 3));
  const Region all = Region::all(*lat);
  const auto edges = detail::all_edges(*lat);
  const std::uint64_t n = detail::pick(o.trials, 1000);
  auto r = detail::run_instances("droplet", n, o, [&](std::uint64_t, std::uint64_t seed) {
    detail::InstanceResult out;
    const auto j = sample_couplings(lat, DistributionSpec::gaussian(), seed);
    const auto sigma = detail::free_ground_state(j);
    const EdgeId e = detail::random_edge(edges, seed);
    const auto a = detail::checked_analysis(j, sigma, e, all);
    out.check(a.droplets.size() == 1 && !a.truncated,
              [&] { return detail::instance_json(j, sigma, seed, e, std::to_string(a.droplets.size()) + " canonical droplets"); });
    return out;
  });
  // At least 999 in 1000 must be unique.
  r.passed = static_cast<double>(r.violations) <= 0.001 * static_cast<double>(n);
  return r;
}

// ---- statistical suite ----

namespace detail {

struct StatSample {
  double je = 0.0;
  int bond = 1;
  double crit = 0.0;
  std::size_t states = 0;
  bool equal = false;
  bool c_eq_j = false;
  double plus_fraction = 0.0;
  double plus_fraction_raised = 0.0;
  std::uint32_t attempts = 0;
};

inline double plus_fraction(const GroundStateSet& gs, EdgeId e) {
  std::size_t plus = 0;
  for (const auto& st : gs.states) plus += st.witness.bond(e) > 0 ? 1 : 0;
  return static_cast<double>(plus) / static_cast<double>(gs.size());
}

struct Proportion {
  std::uint64_t hits = 0;
  std::uint64_t n = 0;
  double p() const { return n ? static_cast<double>(hits) / static_cast<double>(n) : 0.0; }
  double width() const { return wilson_interval(hits, n).width(); }
};

/// lhs >= coef * rhs, allowing 3 x (W_lhs + coef W_rhs).
inline StatCheck proportion_check(std::string label, const Proportion& lhs, double coef, const Proportion& rhs) {
  StatCheck c{std::move(label), lhs.p(), coef * rhs.p(), kSlackWidths * (lhs.width() + coef * rhs.width()), true};
  c.pass = c.lhs + c.slack >= c.rhs;
  return c;
}

}  // namespace detail

struct StatisticalSetup {
  WindowSetup setup{LatticeSpec::box(4, 4), Rect{1, 1, 2, 2}, Rect{1, 1, 2, 2}, DistributionSpec::gaussian()};
  std::vector<double> lambdas{-0.5, 0.0, 0.5, 1.0, 1.5};
  std::vector<std::pair<double, double>> intervals{{-0.5, 0.5}, {0.0, 1.0}, {0.5, 1.5}, {-1.0, 2.0}};
};

/// Measure inequalities on shared trials. part selects a subset:
/// "sstypemod", "backmodify", "decoupling", "monotone_events", "replicas", or "" for all.
inline SuiteReport suite_statistical(const SuiteOptions& o, const std::string& part = "",
                                     const StatisticalSetup& cfg = {}) {
  const std::uint64_t n = detail::pick(o.trials, 10000);
  const auto w = resolve(cfg.setup);
  const EdgeId e = w.inside.front();
  const auto& dist = cfg.setup.dist;
  const auto samples = parallel_map(
      n,
      [&](std::size_t t) {
        const std::uint64_t seed = rng::derive(o.seed, t);
        return with_retries(seed, [&](std::uint64_t key, std::uint32_t attempt) {
          const auto j = sample_couplings(w.lattice, dist, key);
          const auto gs = enumerate_window_ground_states(j, w.outer, w.window, serial_options({e}));
          const auto [a, b] = sample_replica_pair(gs, rng::derive(key, 0, 0x70616972ULL));
          detail::StatSample s;
          s.je = j[e];
          s.bond = gs.states[a].witness.bond(e);
          s.crit = gs.states[a].critical[0];
          s.states = gs.size();
          s.equal = a == b;
          s.c_eq_j = std::abs(s.crit - s.je) <= tol::tie * j.scale();
          s.plus_fraction = detail::plus_fraction(gs, e);
          if (part.empty() || part == "monotone_events") {
            rng::Stream st(rng::combine(key, 0x726169ULL));
            const double delta = 0.05 + std::abs(st.next_normal());
            const auto raised = enumerate_window_ground_states(modify(j, e, j[e] + delta), w.outer, w.window, serial_options());
            s.plus_fraction_raised = detail::plus_fraction(raised, e);
          }
          s.attempts = attempt;
          return s;
        });
      },
      o.threads);

  SuiteReport r;
  r.name = part.empty() ? "statistical" : part;
  r.instances = n;
  for (const auto& s : samples) r.redraws += s.attempts;
  auto want = [&](const char* p) { return part.empty() || part == p; };

  if (want("sstypemod")) {
    for (int sign : {1, -1}) {
      detail::Proportion a;
      a.n = n;
      for (const auto& s : samples) a.hits += s.bond == sign ? 1 : 0;
      for (double lambda : cfg.lambdas) {
        detail::Proportion both;
        both.n = n;
        for (const auto& s : samples) both.hits += (s.bond == sign && sign * s.je >= lambda) ? 1 : 0;
        const double tail = sign > 0 ? 1.0 - dist.cdf(lambda) : dist.cdf(-lambda);
        r.stats.push_back(detail::proportion_check(
            std::string(sign > 0 ? "sstypemod +: M(A, J_e >= " : "sstypemod -: M(A, J_e <= ") +
                detail::num(sign * lambda + 0.0) + ") >= nu/2 M(A)",
            both, 0.5 * tail, a));
      }
    }
  }
  if (want("backmodify")) {
    for (const auto& [c, d] : cfg.intervals) {
      detail::Proportion lhs, rhs;
      lhs.n = rhs.n = n;
      for (const auto& s : samples) {
        const bool in_a = s.bond > 0 && s.crit < c;
        lhs.hits += (in_a && s.je >= c && s.je <= d) ? 1 : 0;
        rhs.hits += (in_a && s.je >= c) ? 1 : 0;
      }
      r.stats.push_back(detail::proportion_check("backmodify: M(A, J_e in [" + detail::num(c) + "," + detail::num(d) +
                                                     "]) >= nu M(A, J_e >= " + detail::num(c) + ")",
                                                 lhs, dist.mass(c, d), rhs));
    }
  }
  if (want("decoupling")) {
    std::uint64_t hits = 0;
    for (const auto& s : samples) hits += s.c_eq_j ? 1 : 0;
    r.stats.push_back({"decoupling: C_e = J_e never happens", 0.0, static_cast<double>(hits), 0.0, hits == 0});
  }
  if (want("monotone_events")) {
    std::uint64_t worse = 0;
    double before = 0.0, after = 0.0, sq = 0.0;
    for (const auto& s : samples) {
      if (s.plus_fraction_raised < s.plus_fraction - tol::slack) ++worse;
      before += s.plus_fraction;
      after += s.plus_fraction_raised;
      const double diff = s.plus_fraction_raised - s.plus_fraction;
      sq += diff * diff;
    }
    const double nn = static_cast<double>(n);
    const double mean_diff = (after - before) / nn;
    const double se = std::sqrt(std::max(0.0, sq / nn - mean_diff * mean_diff) / nn);
    StatCheck c{"monotone_events: mu_J(sigma_e = +1) under raised J_e >= under J", after / nn, before / nn,
                kSlackWidths * se, true};
    c.pass = c.lhs + c.slack >= c.rhs;
    r.stats.push_back(c);
    r.stats.push_back({"monotone_events: per-configuration decreases", 0.0, static_cast<double>(worse), 0.0, worse == 0});
  }
  if (want("replicas")) {
    detail::Proportion eq;
    eq.n = n;
    double expect = 0.0, var = 0.0;
    for (const auto& s : samples) {
      eq.hits += s.equal ? 1 : 0;
      const double p = 1.0 / static_cast<double>(s.states);
      expect += p;
      var += p * (1.0 - p);
    }
    const double nn = static_cast<double>(n);
    StatCheck c{"replicas: P(sigma = sigma') matches mean 1/k", eq.p(), expect / nn, kSlackWidths * std::sqrt(var) / nn,
                true};
    c.pass = std::abs(c.lhs - c.rhs) <= c.slack;
    r.stats.push_back(c);
  }
  if (r.stats.empty()) throw ConfigError("unknown statistical part '" + part + "'");
  for (const auto& c : r.stats) {
    ++r.checks;
    if (!c.pass) ++r.violations;
  }
  r.passed = r.violations == 0;
  r.notes.push_back("edge " + std::to_string(e) + " on " + cfg.setup.describe());
  return r;
}

inline SuiteReport suite_tethered(const SuiteOptions& o) {
  WallConfig cfg;
  cfg.trials = detail::pick(o.trials, 2000);
  cfg.seed = o.seed;
  cfg.threads = o.threads;
  const auto t = wall_statistics(cfg);
  SuiteReport r;
  r.name = "tethered";
  r.instances = cfg.trials;
  r.redraws = t.redraws;
  r.checks = 2;
  r.violations = (t.subadditive ? 0 : 1) + (t.monotone ? 0 : 1);
  r.passed = r.violations == 0;
  r.notes = t.violations;
  for (const auto& row : t.rows) {
    r.stats.push_back({"mean N_" + std::to_string(row.n) + "," + std::to_string(row.k) + " (rhs: standard error)",
                       row.mean, row.stderr_, 0.0, true});
  }
  return r;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{
      "onedim",     "oracle",          "bound",    "supersat3",  "pair",      "supersat2",
      "parity",     "interface",       "monotone", "cylinder",   "covariance", "droplet",
      "statistical", "sstypemod",      "backmodify", "decoupling", "monotone_events", "replicas",
      "tethered"};
  return names;
}

inline SuiteReport verify_suite(std::string_view name, const SuiteOptions& o = {}) {
  const std::string n(name);
  SuiteReport r;
  if (n == "onedim") r = suite_onedim(o);
  else if (n == "oracle") r = suite_oracle(o);
  else if (n == "bound") r = suite_bound(o);
  else if (n == "supersat3") r = suite_supersat3(o);
  else if (n == "pair") r = suite_pair(o);
  else if (n == "supersat2") r = suite_supersat2(o);
  else if (n == "parity") r = suite_parity(o);
  else if (n == "interface") r = suite_interface(o);
  else if (n == "monotone") r = suite_monotone(o);
  else if (n == "cylinder") r = suite_cylinder(o);
  else if (n == "covariance") r = suite_covariance(o);
  else if (n == "droplet") r = suite_droplet(o);
  else if (n == "statistical") r = suite_statistical(o);
  else if (n == "sstypemod" || n == "backmodify" || n == "decoupling" || n == "monotone_events" || n == "replicas")
    r = suite_statistical(o, n);
  else if (n == "tethered") r = suite_tethered(o);
  else throw ConfigError("unknown suite '" + n + "'");
  r.fingerprint = fingerprint("verify " + n + " trials=" + std::to_string(o.trials) + " seed=" + std::to_string(o.seed));
  return r;
}

inline json suite_report_json(const SuiteReport& r) {
  json stats = json::array();
  for (const auto& c : r.stats)
    stats.push_back({{"label", c.label}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"slack", c.slack}, {"pass", c.pass}});
  return {{"suite", r.name},
          {"passed", r.passed},
          {"instances", r.instances},
          {"checks", r.checks},
          {"violations", r.violations},
          {"redraws", r.redraws},
          {"statistics", stats},
          {"counterexamples", r.counterexamples},
          {"notes", r.notes}};
}

}  // namespace gslab
