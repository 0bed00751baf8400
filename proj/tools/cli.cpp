#include "cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include "gslab/gslab.hpp"

namespace labcli {

using gslab::json;

std::string git_blob_hash(const std::string& content) {
  const std::string blob = "blob " + std::to_string(content.size()) + '\0' + content;
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(blob.data(), blob.size(), digest, &len, EVP_sha1(), nullptr);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return os.str();
}

namespace {

/// Everything a command may read. Unset fields stay out of the run config.
struct Options {
  std::string lattice;
  std::string dist = "gaussian:0,1";
  std::optional<std::uint64_t> seed;
  std::string couplings;  // input file
  std::string region, outer, window;
  std::string bc = "auto";
  std::string solver = "auto";
  std::string edge;
  bool all = false;
  std::vector<gslab::EdgeId> track;
  std::vector<std::string> ladder;
  std::string strategy = "antipodal";
  std::string box_j, box_l;
  int max_len = 6;
  int wall = 0;
  std::string n_range = "1..6", k_range = "0..1";
  std::uint64_t trials = 0;
  std::string event;
  double threshold = 0.0;
  std::string suite;
  std::string preset;
  std::size_t free_spin_cap = gslab::kMaxFreeSpins;
  std::size_t boundary_cap = gslab::kMaxBoundary;
  std::string out;
  std::string format = "json";
};

struct Context {
  std::string command;
  Options o;
  json config = json::object();
  std::string inputs;  // raw input file contents, hashed with the config
};

std::uint64_t need_seed(const Context& c) {
  if (!c.o.seed) throw gslab::ConfigError("--seed is required for " + c.command);
  return *c.o.seed;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gslab::ConfigError("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::pair<int, int> parse_range(const std::string& text, const char* what) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw gslab::ConfigError(std::string(what) + " expects A..B, got '" + text + "'");
  }
}

gslab::LatticePtr lattice_of(Context& c, const std::string& fallback = "") {
  const std::string spec = c.o.lattice.empty() ? fallback : c.o.lattice;
  if (spec.empty()) throw gslab::ConfigError("--lattice is required for " + c.command);
  c.config["lattice"] = spec;
  return gslab::build_lattice(gslab::parse_lattice_spec(spec));
}

/// Couplings from --couplings FILE, or sampled from --dist and --seed.
gslab::CouplingConfig couplings_of(Context& c, const std::string& fallback = "") {
  if (!c.o.couplings.empty()) {
    const std::string text = read_file(c.o.couplings);
    c.inputs += text;
    const json parsed = json::parse(text);
    // Accept a `lab sample` report or a bare couplings object.
    const json in = parsed.contains("result") ? parsed.at("result") : parsed;
    if (c.o.lattice.empty()) c.o.lattice = in.at("lattice_ref").get<std::string>();
    c.config["couplings_file"] = c.o.couplings;
    return gslab::couplings_from_json(in, lattice_of(c));
  }
  const auto lat = lattice_of(c, fallback);
  c.config["dist"] = c.o.dist;
  c.config["seed"] = need_seed(c);
  return gslab::sample_couplings(lat, gslab::parse_distribution(c.o.dist), *c.o.seed);
}

gslab::Region region_of(Context& c, const gslab::Lattice& lat, const std::string& text, const char* key) {
  if (text.empty()) return gslab::Region::all(lat);
  c.config[key] = text;
  return gslab::Region::rect(lat, gslab::parse_rect(text));
}

gslab::EdgeId edge_of(const gslab::Lattice& lat, const std::string& text) {
  try {
    const auto comma = text.find(',');
    if (comma == std::string::npos) {
      const auto e = static_cast<gslab::EdgeId>(std::stoul(text));
      lat.endpoints(e);
      return e;
    }
    const auto u = static_cast<gslab::VertexId>(std::stoul(text.substr(0, comma)));
    const auto v = static_cast<gslab::VertexId>(std::stoul(text.substr(comma + 1)));
    if (const auto e = lat.edge_between(u, v)) return *e;
  } catch (const std::logic_error&) {
  } catch (const gslab::Error&) {
  }
  throw gslab::ConfigError("--edge expects an edge id or 'u,v' naming two adjacent vertices, got '" + text + "'");
}

gslab::BoundaryCondition bc_of(Context& c, const gslab::Lattice& lat, const gslab::Region& region) {
  const auto boundary = gslab::external_boundary(lat, region);
  std::string mode = c.o.bc;
  if (mode == "auto") mode = boundary.empty() ? "free" : "plus";
  c.config["bc"] = mode;
  if (mode == "free") return gslab::BoundaryCondition::free_bc();
  std::vector<gslab::Spin> values(boundary.size(), 1);
  if (mode == "minus") {
    std::fill(values.begin(), values.end(), gslab::Spin{-1});
  } else if (mode == "random") {
    gslab::rng::Stream s(gslab::rng::derive(need_seed(c), 0, 0x6263ULL));
    for (auto& v : values) v = s.next_below(2) ? 1 : -1;
  } else if (mode != "plus") {
    throw gslab::ConfigError("--bc expects auto, free, plus, minus or random");
  }
  return gslab::BoundaryCondition::fixed_bc(boundary, values);
}

gslab::SolverKind solver_of(const std::string& s) {
  if (s == "auto") return gslab::SolverKind::automatic;
  if (s == "gray") return gslab::SolverKind::gray_code;
  if (s == "transfer") return gslab::SolverKind::transfer;
  throw gslab::ConfigError("--solver expects auto, gray or transfer");
}

gslab::EnumerateOptions enumerate_options(Context& c, std::vector<gslab::EdgeId> tracked = {}) {
  gslab::EnumerateOptions eo;
  eo.tracked = std::move(tracked);
  eo.boundary_cap = c.o.boundary_cap;
  eo.solve.free_spin_cap = c.o.free_spin_cap;
  c.config["caps"] = {{"free_spins", c.o.free_spin_cap}, {"boundary", c.o.boundary_cap}};
  return eo;
}

/// A ground-state pair and the lattice it is analysed on. Strips use a
/// boundary-condition pair strategy; other lattices sample from the uniform
/// measure over enumerated window ground states.
struct Pair {
  gslab::CouplingConfig j;
  gslab::LatticePtr lattice;
  gslab::SpinConfig a, b;
};

Pair pair_of(Context& c, const gslab::CouplingConfig& j) {
  const gslab::Lattice& lat = j.lattice();
  const std::uint64_t key = gslab::rng::derive(need_seed(c), 0, 0x70616972ULL);
  if (lat.kind() == gslab::LatticeKind::halfplane_strip) {
    c.config["strategy"] = c.o.strategy;
    const auto s = gslab::strip_setup(lat.spec());
    auto p = gslab::strip_pair(j, s, gslab::parse_strategy(c.o.strategy), key);
    const auto jj = gslab::restrict_to(j, s.analysis);
    return {jj, s.analysis, p.a, p.b};
  }
  const auto outer = region_of(c, lat, c.o.outer, "outer");
  const auto window = c.o.window.empty() ? outer : region_of(c, lat, c.o.window, "window");
  const auto gs = gslab::enumerate_window_ground_states(j, outer, window, enumerate_options(c));
  const auto [ia, ib] = gslab::sample_replica_pair(gs, key);
  return {j, j.lattice_ptr(), gs.states[ia].witness, gs.states[ib].witness};
}

json rect_json(const gslab::Rect& r) { return {r.x0, r.y0, r.w, r.h}; }

// ---- commands ----

struct Result {
  Result(json b = json::object(), int c = kExitPass, std::string table = {})
      : body(std::move(b)), code(c), csv(std::move(table)) {}
  json body;
  int code;
  std::string csv;  // when --format csv is supported and requested
};

Result cmd_build(Context& c) {
  const auto lat = lattice_of(c);
  json body = gslab::lattice_json(*lat);
  json faces = json::array();
  for (const auto& f : lat->faces()) faces.push_back(gslab::face_cycle(f));
  body["faces"] = faces;
  if (lat->planar()) {
    const auto dual = gslab::build_dual(*lat);
    json verts = json::array(), edges = json::array();
    for (const auto& v : dual.vertices()) verts.push_back({{"cell", {v.cell.x, v.cell.y}}, {"interior", v.interior}});
    for (gslab::EdgeId e = 0; e < dual.num_edges(); ++e) {
      const auto [a, b] = dual.endpoints(e);
      edges.push_back({a, b});
    }
    body["dual"] = {{"vertices", verts}, {"edges", edges}};
  }
  return {body};
}

Result cmd_sample(Context& c) { return {gslab::couplings_json(couplings_of(c))}; }

Result cmd_solve(Context& c) {
  const auto j = couplings_of(c);
  const auto region = region_of(c, j.lattice(), c.o.region, "region");
  c.config["solver"] = c.o.solver;
  const gslab::SolveOptions opts{solver_of(c.o.solver), true, c.o.free_spin_cap};
  const auto gs = gslab::solve_ground_state(j, region, bc_of(c, j.lattice(), region), opts);
  json body{{"region", gslab::region_json(region)},
            {"energy", gs.energy},
            {"spins", gs.state.to_string()}};
  body["partner"] = gs.partner ? json(gs.partner->to_string()) : json(nullptr);
  return {body};
}

Result cmd_enumerate(Context& c) {
  const auto j = couplings_of(c);
  const auto outer = region_of(c, j.lattice(), c.o.outer, "outer");
  const auto window = c.o.window.empty() ? outer : region_of(c, j.lattice(), c.o.window, "window");
  if (!c.o.track.empty()) c.config["track"] = c.o.track;
  auto body = gslab::ground_state_set_json(
      gslab::enumerate_window_ground_states(j, outer, window, enumerate_options(c, c.o.track)));
  if (!c.o.ladder.empty()) {
    // Window-state counts for a sequence of outer regions around the same window.
    c.config["outer_ladder"] = c.o.ladder;
    body["ladder"] = json::array();
    for (const auto& text : c.o.ladder) {
      const auto r = gslab::Region::rect(j.lattice(), gslab::parse_rect(text));
      const auto gs = gslab::enumerate_window_ground_states(j, r, window, enumerate_options(c));
      body["ladder"].push_back({{"outer", text}, {"boundary", gs.boundary.size()}, {"count", gs.size()}});
    }
  }
  return {body};
}

Result cmd_critical(Context& c) {
  const auto j = couplings_of(c);
  const gslab::Lattice& lat = j.lattice();
  const auto region = region_of(c, lat, c.o.region, "region");
  const gslab::SolveOptions opts{gslab::SolverKind::automatic, true, c.o.free_spin_cap};
  const auto sigma = gslab::solve_ground_state(j, region, bc_of(c, lat, region), opts).state;
  std::vector<gslab::EdgeId> edges;
  if (c.o.all == !c.o.edge.empty()) throw gslab::ConfigError("critical needs exactly one of --edge and --all");
  if (c.o.all) {
    for (gslab::EdgeId e = 0; e < lat.num_edges(); ++e) {
      const auto [a, b] = lat.endpoints(e);
      if (region.contains(a) || region.contains(b)) edges.push_back(e);
    }
    c.config["all"] = true;
  } else {
    edges.push_back(edge_of(lat, c.o.edge));
    c.config["edge"] = c.o.edge;
  }
  json reports = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17) << "edge,u,v,J_e,C_e,F_e,S_e,bond\n";
  for (gslab::EdgeId e : edges) {
    const auto r = gslab::critical_report(j, sigma, e, region);
    reports.push_back(gslab::critical_report_json(lat, r));
    const auto [u, v] = lat.endpoints(e);
    csv << e << ',' << u << ',' << v << ',' << r.coupling << ',' << r.critical << ',' << r.flexibility << ','
        << r.supersat.s << ',' << r.bond << '\n';
  }
  return {{{"spins", sigma.to_string()}, {"edges", reports}}, kExitPass, csv.str()};
}

Result cmd_interface(Context& c) {
  const auto j = couplings_of(c);
  const Pair p = pair_of(c, j);
  json body{{"analysed_lattice", gslab::to_string(p.lattice->spec())},
            {"sigma", p.a.to_string()},
            {"sigma_prime", p.b.to_string()}};
  const json d = gslab::decomposition_json(gslab::decompose(p.a, p.b));
  for (const auto& [k, v] : d.items()) body[k] = v;
  return {body};
}

Result cmd_rungs(Context& c) {
  const auto j0 = couplings_of(c);
  const Pair p = pair_of(c, j0);
  const gslab::Lattice& lat = *p.lattice;
  const auto box_j = region_of(c, lat, c.o.box_j, "box_j");
  const auto box_l = c.o.box_l.empty() ? gslab::Region::all(lat) : region_of(c, lat, c.o.box_l, "box_l");
  c.config["max_len"] = c.o.max_len;
  c.config["wall"] = c.o.wall;
  const auto iface = gslab::interface(p.a, p.b);
  const auto rungs = gslab::enumerate_rungs(p.j, p.a, iface, box_j, box_l, c.o.max_len);
  const auto walls = gslab::jl_walls(lat, gslab::build_dual(lat), iface, box_j, box_l);
  json body{{"analysed_lattice", gslab::to_string(lat.spec())},
            {"sigma", p.a.to_string()},
            {"sigma_prime", p.b.to_string()},
            {"K", c.o.max_len},
            {"interface_edges", iface},
            {"walls", walls.walls}};
  json list = json::array();
  for (const auto& r : rungs) list.push_back(gslab::rung_json(r));
  body["rungs"] = list;
  if (!c.o.edge.empty()) {
    const auto f = edge_of(lat, c.o.edge);
    c.config["edge"] = c.o.edge;
    body["edge"] = f;
    body["D0"] = c.o.wall;
    body["infima"] = gslab::infima_json(gslab::rung_infima(rungs, c.o.wall, f));
  }
  return {body};
}

Result cmd_walls(Context& c) {
  gslab::WallConfig w;
  w.strip = gslab::parse_lattice_spec(c.o.lattice.empty() ? "strip:16,8" : c.o.lattice);
  c.config["lattice"] = gslab::to_string(w.strip);
  w.strategy = gslab::parse_strategy(c.o.strategy);
  std::tie(w.n_lo, w.n_hi) = parse_range(c.o.n_range, "--n");
  std::tie(w.k_lo, w.k_hi) = parse_range(c.o.k_range, "--k");
  w.trials = c.o.trials ? c.o.trials : 2000;
  w.seed = need_seed(c);
  w.dist = gslab::parse_distribution(c.o.dist);
  c.config.update({{"strategy", c.o.strategy}, {"n", c.o.n_range}, {"k", c.o.k_range}, {"trials", w.trials},
                   {"seed", w.seed}, {"dist", c.o.dist}});
  const auto t = gslab::wall_statistics(w);
  json rows = json::array();
  std::ostringstream csv;
  csv << std::setprecision(17) << "n,k,mean,stderr,trials\n";
  for (const auto& r : t.rows) {
    rows.push_back({{"n", r.n}, {"k", r.k}, {"mean", r.mean}, {"stderr", r.stderr_}, {"trials", r.trials}});
    csv << r.n << ',' << r.k << ',' << r.mean << ',' << r.stderr_ << ',' << r.trials << '\n';
  }
  json body{{"strategy", c.o.strategy},      {"rows", rows},
            {"monotone", t.monotone},        {"subadditive", t.subadditive},
            {"violations", t.violations},    {"redraws", t.redraws}};
  return {body, t.monotone && t.subadditive ? kExitPass : kExitAssertion, csv.str()};
}

Result cmd_estimate(Context& c) {
  gslab::EstimateConfig e;
  e.setup.lattice = gslab::parse_lattice_spec(c.o.lattice.empty() ? "box:4,4" : c.o.lattice);
  if (!c.o.outer.empty()) e.setup.outer = gslab::parse_rect(c.o.outer);
  if (!c.o.window.empty()) e.setup.window = gslab::parse_rect(c.o.window);
  e.setup.dist = gslab::parse_distribution(c.o.dist);
  e.trials = c.o.trials ? c.o.trials : 10000;
  e.seed = need_seed(c);
  e.threshold = c.o.threshold;
  c.config.update({{"event", c.o.event}, {"lattice", gslab::to_string(e.setup.lattice)}, {"dist", c.o.dist},
                   {"trials", e.trials}, {"seed", e.seed}, {"threshold", e.threshold}});
  if (!c.o.outer.empty()) c.config["outer"] = c.o.outer;
  if (!c.o.window.empty()) c.config["window"] = c.o.window;
  if (!c.o.edge.empty()) {
    e.edge = edge_of(*gslab::build_lattice(e.setup.lattice), c.o.edge);
    c.config["edge"] = c.o.edge;
  }
  const auto r = gslab::estimate_event(c.o.event, e);
  return {{{"event", r.event},
           {"monotonicity", gslab::monotonicity_name(gslab::find_event(r.event).monotonicity)},
           {"edge", r.edge},
           {"trials", r.trials},
           {"successes", r.successes},
           {"estimate", r.estimate},
           {"ci", {r.ci.lo, r.ci.hi}},
           {"seed_range", {r.seed_first, r.seed_last}},
           {"redraws", r.redraws},
           {"fingerprint", r.fingerprint}}};
}

Result cmd_verify(Context& c) {
  gslab::SuiteOptions s;
  s.trials = c.o.trials;
  s.seed = need_seed(c);
  c.config.update({{"suite", c.o.suite}, {"trials", c.o.trials}, {"seed", s.seed}});
  const auto r = gslab::verify_suite(c.o.suite, s);
  return {gslab::suite_report_json(r), r.passed ? kExitPass : kExitAssertion};
}

// ---- render-data ----

json point(double x, double y) { return {x, y}; }

json dual_segment(const gslab::DualGraph& dual, gslab::EdgeId e) {
  const auto [a, b] = dual.endpoints(e);
  const auto ca = dual.vertex(a).cell, cb = dual.vertex(b).cell;
  return {point(ca.x + 0.5, ca.y + 0.5), point(cb.x + 0.5, cb.y + 0.5)};
}

json primal_segment(const gslab::Lattice& lat, gslab::EdgeId e) {
  const auto [a, b] = lat.endpoints(e);
  return {point(lat.coord(a).x, lat.coord(a).y), point(lat.coord(b).x, lat.coord(b).y)};
}

json scene_of(const gslab::Lattice& lat, const std::vector<gslab::EdgeId>& iface,
              const gslab::InterfaceDecomposition& d) {
  const auto dual = gslab::build_dual(lat);
  json edges = json::array(), walls = json::array();
  for (gslab::EdgeId e : iface) edges.push_back(primal_segment(lat, e));
  for (const auto& w : d.walls) {
    json segs = json::array();
    for (gslab::EdgeId e : w.dual_edges) segs.push_back(dual_segment(dual, e));
    walls.push_back({{"tethered", w.tethered}, {"segments", segs}});
  }
  json s{{"lattice", gslab::lattice_json(lat)}, {"interface_edges", edges}, {"walls", walls}};
  s["rungs"] = json::array();
  s["labels"] = json::object();
  s["boxes"] = json::array();
  return s;
}

Result cmd_render(Context& c) {
  const std::uint64_t seed = need_seed(c);
  c.config.update({{"preset", c.o.preset}, {"seed", seed}, {"dist", c.o.dist}});
  const auto dist = gslab::parse_distribution(c.o.dist);
  constexpr std::uint64_t kSearch = 500;
  if (c.o.preset == "empty") {
    const auto lat = lattice_of(c, "box:6,4");
    const auto j = gslab::sample_couplings(lat, dist, seed);
    const auto sigma = gslab::solve_ground_state(j, gslab::Region::all(*lat), {}).state;
    const auto d = gslab::decompose(sigma, sigma.flipped());
    json s = scene_of(*lat, d.edges, d);
    s["preset"] = "empty";
    return {s};
  }
  // Antipodal pairs mostly give one top-to-bottom wall; two tethered walls need the uniform measure.
  const bool tethered_scene = c.o.preset == "tethered";
  const auto lat = lattice_of(c, tethered_scene ? "strip:10,4" : "strip:10,6");
  const auto strategy = tethered_scene ? gslab::PairStrategy::uniform : gslab::PairStrategy::antipodal;
  c.config["strategy"] = std::string(gslab::strategy_name(strategy));
  const auto s = gslab::strip_setup(lat->spec());
  const auto dual = gslab::build_dual(*s.analysis);
  // First trial, in seed order, showing the requested structure.
  for (std::uint64_t t = 0; t < kSearch; ++t) {
    const std::uint64_t key = gslab::rng::derive(seed, t);
    try {
      const auto j = gslab::sample_couplings(lat, dist, key);
      const auto p = gslab::strip_pair(j, s, strategy, gslab::rng::derive(key, 0, 0x70616972ULL));
      const auto iface = gslab::interface(p.a, p.b);
      const auto d = gslab::decompose(*s.analysis, iface, dual);
      if (c.o.preset == "tethered") {
        std::size_t tethered = 0;
        for (const auto& w : d.walls) tethered += w.tethered ? 1 : 0;
        if (d.walls.size() != 2 || tethered != 2) continue;
        json out = scene_of(*s.analysis, iface, d);
        out["preset"] = "tethered";
        out["trial"] = t;
        return {out};
      }
      if (c.o.preset == "rung") {
        const auto jj = gslab::restrict_to(j, s.analysis);
        const auto all = gslab::Region::all(*s.analysis);
        const auto rungs = gslab::enumerate_rungs(jj, p.a, iface, all, all, c.o.max_len);
        if (rungs.empty()) continue;
        // Lowest-energy rung; f is its first crossed edge.
        const auto best = std::min_element(rungs.begin(), rungs.end(),
                                           [](const auto& a, const auto& b) { return a.energy < b.energy; });
        const auto inf = gslab::rung_infima(rungs, best->wall_a, best->edges.front());
        json out = scene_of(*s.analysis, iface, d);
        json segs = json::array();
        for (gslab::EdgeId e : best->edges) segs.push_back(dual_segment(dual, e));
        out["rungs"].push_back({{"walls", {best->wall_a, best->wall_b}}, {"energy", best->energy}, {"segments", segs}});
        out["labels"] = {{"K", c.o.max_len},
                         {"f", primal_segment(*s.analysis, best->edges.front())},
                         {"I", gslab::optional_json(inf.touching)},
                         {"I_prime", gslab::optional_json(inf.touching_without)},
                         {"I_tilde", gslab::optional_json(inf.containing)}};
        const auto& sp = s.analysis->spec();
        out["boxes"].push_back({{"name", "j"}, {"rect", rect_json({s.analysis->min_x(), 0, sp.width, sp.height})}});
        out["boxes"].push_back({{"name", "l"}, {"rect", rect_json({s.analysis->min_x(), 0, sp.width, sp.height})}});
        out["preset"] = "rung";
        out["trial"] = t;
        return {out};
      }
      throw gslab::ConfigError("--preset expects empty, tethered or rung");
    } catch (const gslab::DegenerateDisorderError&) {
    }
  }
  throw gslab::ConfigError("no trial among the first " + std::to_string(kSearch) + " shows a " + c.o.preset + " scene");
}

// ---- wiring ----

void add_lattice(CLI::App* s, Options& o, bool required = false) {
  auto* opt = s->add_option("--lattice", o.lattice, "segment:L | box:W,H | strip:W,H, optional @X,Y origin");
  if (required) opt->required();
}
void add_disorder(CLI::App* s, Options& o) {
  s->add_option("--dist", o.dist, "gaussian:MEAN,SD | uniform:HALFWIDTH")->capture_default_str();
  s->add_option("--seed", o.seed, "master seed");
  s->add_option("--couplings", o.couplings, "read couplings from a JSON file instead of sampling");
}
void add_caps(CLI::App* s, Options& o) {
  s->add_option("--free-spin-cap", o.free_spin_cap, "largest exhaustive solve")->capture_default_str();
  s->add_option("--boundary-cap", o.boundary_cap, "largest enumerated boundary")->capture_default_str();
}
void add_pair(CLI::App* s, Options& o) {
  s->add_option("--strategy", o.strategy, "strip pair strategy: antipodal | flip | uniform")->capture_default_str();
  s->add_option("--outer", o.outer, "outer region W,H@X,Y (non-strip lattices)");
  s->add_option("--window", o.window, "window W,H@X,Y (non-strip lattices)");
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exact ground-state lab for Edwards-Anderson spin glasses on small lattices.", "lab"};
  app.require_subcommand(1);
  app.footer("Exit codes: 0 pass, 1 assertion failure, 2 configuration error. LAB_THREADS caps the worker pool.");
  Context ctx;
  Options& o = ctx.o;
  std::map<CLI::App*, Result (*)(Context&)> handlers;
  auto add = [&](const char* name, const char* help, Result (*fn)(Context&)) {
    CLI::App* s = app.add_subcommand(name, help);
    handlers[s] = fn;
    s->add_option("--out", o.out, "write the report here instead of stdout");
    return s;
  };

  auto* build = add("build", "lattice, faces and dual graph", cmd_build);
  add_lattice(build, o, true);

  auto* sample = add("sample", "sample couplings", cmd_sample);
  add_lattice(sample, o);
  add_disorder(sample, o);

  auto* solve = add("solve", "exact ground state of a region", cmd_solve);
  add_lattice(solve, o);
  add_disorder(solve, o);
  solve->add_option("--region", o.region, "solve region W,H@X,Y (default: whole lattice)");
  solve->add_option("--bc", o.bc, "auto | free | plus | minus | random")->capture_default_str();
  solve->add_option("--solver", o.solver, "auto | gray | transfer")->capture_default_str();
  solve->add_option("--free-spin-cap", o.free_spin_cap, "largest exhaustive solve")->capture_default_str();

  auto* enumerate = add("enumerate", "window ground states over all boundary conditions", cmd_enumerate);
  add_lattice(enumerate, o);
  add_disorder(enumerate, o);
  add_caps(enumerate, o);
  enumerate->add_option("--outer", o.outer, "outer region W,H@X,Y (default: whole lattice)");
  enumerate->add_option("--window", o.window, "window W,H@X,Y (default: outer)");
  enumerate->add_option("--track", o.track, "edge ids whose critical values are reported")->delimiter(',');
  enumerate->add_option("--outer-ladder", o.ladder, "outer regions, ';'-separated, each reporting its window-state count")
      ->delimiter(';');

  auto* critical = add("critical", "critical value, flexibility and droplets", cmd_critical);
  add_lattice(critical, o);
  add_disorder(critical, o);
  critical->add_option("--region", o.region, "region W,H@X,Y (default: whole lattice)");
  critical->add_option("--bc", o.bc, "boundary for the region's ground state")->capture_default_str();
  critical->add_option("--edge", o.edge, "edge id or 'u,v'");
  critical->add_flag("--all", o.all, "every edge touching the region");
  critical->add_option("--format", o.format, "json | csv")->capture_default_str();
  critical->add_option("--free-spin-cap", o.free_spin_cap, "largest exhaustive solve")->capture_default_str();

  auto* iface = add("interface", "interface and domain walls of a ground-state pair", cmd_interface);
  add_lattice(iface, o);
  add_disorder(iface, o);
  add_caps(iface, o);
  add_pair(iface, o);

  auto* rungs = add("rungs", "rungs between (j,l)-walls and their infima", cmd_rungs);
  add_lattice(rungs, o);
  add_disorder(rungs, o);
  add_caps(rungs, o);
  add_pair(rungs, o);
  rungs->add_option("--box-j", o.box_j, "inner box W,H@X,Y (default: whole analysed lattice)");
  rungs->add_option("--box-l", o.box_l, "connectivity box W,H@X,Y (default: whole analysed lattice)");
  rungs->add_option("--maxlen", o.max_len, "rung length bound K, 1..12")->capture_default_str();
  rungs->add_option("--edge", o.edge, "edge f for the infima, id or 'u,v'");
  rungs->add_option("--wall", o.wall, "wall D0 for the infima")->capture_default_str();

  auto* walls = add("walls", "tethered-wall counts N_{n,k} on a strip", cmd_walls);
  add_lattice(walls, o);
  walls->add_option("--dist", o.dist, "coupling distribution")->capture_default_str();
  walls->add_option("--seed", o.seed, "master seed");
  walls->add_option("--strategy", o.strategy, "antipodal | flip | uniform")->capture_default_str();
  walls->add_option("--n", o.n_range, "n range A..B")->capture_default_str();
  walls->add_option("--k", o.k_range, "k range A..B")->capture_default_str();
  walls->add_option("--trials", o.trials, "trials (default 2000)");
  walls->add_option("--format", o.format, "json | csv")->capture_default_str();

  auto* estimate = add("estimate", "probability of a catalog event under the two-replica measure", cmd_estimate);
  std::string events;
  for (const auto& e : gslab::event_catalog()) events += (events.empty() ? "" : ", ") + e.name;
  estimate->add_option("--event", o.event, "one of: " + events)->required();
  add_lattice(estimate, o);
  estimate->add_option("--dist", o.dist, "coupling distribution")->capture_default_str();
  estimate->add_option("--seed", o.seed, "master seed");
  estimate->add_option("--outer", o.outer, "outer region W,H@X,Y");
  estimate->add_option("--window", o.window, "window W,H@X,Y");
  estimate->add_option("--trials", o.trials, "trials (default 10000)");
  estimate->add_option("--edge", o.edge, "edge e, id or 'u,v' (default: first edge inside the window)");
  estimate->add_option("--threshold", o.threshold, "c for threshold events")->capture_default_str();

  auto* verify = add("verify", "run a verification suite", cmd_verify);
  std::string suites;
  for (const auto& s : gslab::suite_names()) suites += (suites.empty() ? "" : ", ") + s;
  verify->add_option("--suite", o.suite, "one of: " + suites)->required();
  verify->add_option("--trials", o.trials, "instances (default: per suite)");
  verify->add_option("--seed", o.seed, "master seed");

  auto* render = add("render-data", "plot-ready scene JSON", cmd_render);
  render->add_option("--preset", o.preset, "empty | tethered | rung")->required();
  add_lattice(render, o);
  render->add_option("--dist", o.dist, "coupling distribution")->capture_default_str();
  render->add_option("--seed", o.seed, "master seed");
  render->add_option("--maxlen", o.max_len, "rung length bound K for the rung preset")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  CLI::App* chosen = app.get_subcommands().front();
  ctx.command = chosen->get_name();
  ctx.config["command"] = ctx.command;
  Result r;
  try {
    if (o.format != "json" && o.format != "csv") throw gslab::ConfigError("--format expects json or csv");
    if (o.format == "csv" && ctx.command != "walls" && ctx.command != "critical") {
      throw gslab::ConfigError("--format csv is available for walls and critical");
    }
    if (o.format == "csv") ctx.config["format"] = "csv";
    r = handlers.at(chosen)(ctx);
  } catch (const gslab::ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gslab::SizingError& e) {
    err << "sizing error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gslab::StructuralError& e) {
    err << "structural error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gslab::UnsupportedKindError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitConfig;
  } catch (const json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const gslab::Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitAssertion;
  }

  std::string text;
  if (o.format == "csv") {
    text = r.csv;
  } else {
    const std::string config = ctx.config.dump();
    json report{{"schema", "lab." + ctx.command},
                {"schema_version", kSchemaVersion},
                {"run_config", ctx.config},
                {"fingerprint", gslab::fingerprint(config)},
                {"input_hash", git_blob_hash(config + ctx.inputs)},
                {"result", r.body}};
    text = report.dump(2) + "\n";
  }
  if (o.out.empty()) {
    out << text;
  } else {
    std::ofstream f(o.out, std::ios::binary);
    if (!(f << text)) {
      err << "cannot write " << o.out << '\n';
      return kExitConfig;
    }
  }
  return r.code;
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace labcli
