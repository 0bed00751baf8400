#pragma once

// JSON forms of the library types. Field order follows the external formats;
// doubles use nlohmann's shortest round-trip printing.

#include <json.hpp>

#include <string>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/criticality.hpp"
#include "gslab/groundstate.hpp"
#include "gslab/interface.hpp"
#include "gslab/lattice.hpp"
#include "gslab/spins.hpp"

namespace gslab {

using json = nlohmann::ordered_json;

inline json lattice_json(const Lattice& lat) {
  json v = json::array(), e = json::array();
  for (Coord c : lat.coords()) v.push_back({c.x, c.y});
  for (const auto& [a, b] : lat.edges()) e.push_back({a, b});
  json dims = lat.kind() == LatticeKind::segment ? json{lat.spec().width} : json{lat.spec().width, lat.spec().height};
  return {{"kind", std::string(kind_name(lat.kind()))},
          {"dims", dims},
          {"origin", {lat.min_x(), lat.min_y()}},
          {"vertices", v},
          {"edges", e}};
}

inline json distribution_json(const DistributionSpec& d) {
  if (d.family == Family::gaussian) return {{"family", "gaussian"}, {"params", {d.a, d.b}}};
  return {{"family", "uniform_symmetric"}, {"params", {d.a}}};
}

inline DistributionSpec distribution_from_json(const json& j) {
  const auto family = j.at("family").get<std::string>();
  const auto& p = j.at("params");
  if (family == "gaussian") return DistributionSpec::gaussian(p.at(0).get<double>(), p.at(1).get<double>());
  if (family == "uniform_symmetric") return DistributionSpec::uniform(p.at(0).get<double>());
  throw ConfigError("unknown distribution family '" + family + "'");
}

inline json couplings_json(const CouplingConfig& j) {
  json out{{"lattice_ref", to_string(j.lattice().spec())}};
  if (const auto& p = j.provenance()) {
    out["dist"] = distribution_json(p->dist);
    out["seed"] = p->seed;
    out["attempt"] = p->attempt;
  } else {
    out["dist"] = nullptr;
    out["seed"] = "manual";
  }
  out["values"] = std::vector<double>(j.values().begin(), j.values().end());
  return out;
}

/// Rebuilds couplings on the given lattice (which must match lattice_ref).
inline CouplingConfig couplings_from_json(const json& in, LatticePtr lattice) {
  if (in.at("lattice_ref").get<std::string>() != to_string(lattice->spec())) {
    throw StructuralError("coupling JSON belongs to lattice " + in.at("lattice_ref").get<std::string>());
  }
  std::optional<Provenance> prov;
  if (in.at("seed").is_number_unsigned()) {
    prov = Provenance{in.at("seed").get<std::uint64_t>(), distribution_from_json(in.at("dist")),
                      in.value("attempt", std::uint32_t{0})};
  }
  return CouplingConfig(std::move(lattice), in.at("values").get<std::vector<double>>(), prov);
}

inline json region_json(const Region& r) { return std::vector<VertexId>(r.members().begin(), r.members().end()); }

inline json ground_state_set_json(const GroundStateSet& gs) {
  json states = json::array();
  for (const auto& s : gs.states) {
    json st{{"spins", s.spins}, {"multiplicity", s.multiplicity}, {"witness_bc", s.witness_bc}, {"partner", s.partner}};
    if (!gs.tracked.empty()) st["critical"] = s.critical;
    states.push_back(std::move(st));
  }
  json out{{"window", region_json(gs.window)},
           {"outer", region_json(gs.outer)},
           {"boundary", gs.boundary},
           {"boundary_conditions", gs.boundary_conditions}};
  if (!gs.tracked.empty()) out["tracked"] = gs.tracked;
  out["states"] = std::move(states);
  out["count"] = gs.size();
  return out;
}

inline json critical_report_json(const Lattice& lat, const CriticalReport& r) {
  const auto [a, b] = lat.endpoints(r.edge);
  json droplets = json::array();
  for (const auto& d : r.droplets) droplets.push_back(d);
  return {{"edge", r.edge},
          {"endpoints", {a, b}},
          {"J_e", r.coupling},
          {"C_e", r.critical},
          {"F_e", r.flexibility},
          {"S_e", r.supersat.s},
          {"S_e_x", r.supersat.s_x},
          {"S_e_y", r.supersat.s_y},
          {"supersat", r.supersat.flag},
          {"bond", r.bond},
          {"droplets", droplets},
          {"droplets_truncated", r.truncated},
          {"region", region_json(r.region)}};
}

inline json decomposition_json(const InterfaceDecomposition& d) {
  json walls = json::array();
  for (const auto& w : d.walls) {
    walls.push_back({{"dual_edges", w.dual_edges},
                     {"tethered", w.tethered},
                     {"axis_crossings", w.axis_crossings},
                     {"cycles", w.cycles}});
  }
  json hist = json::object();
  for (const auto& [deg, n] : d.sanity.branch_hist) hist[std::to_string(deg)] = n;
  return {{"interface_edges", d.edges},
          {"walls", walls},
          {"sanity",
           {{"loops", d.sanity.loops},
            {"dangling", d.sanity.dangling},
            {"multiple_crossings", d.sanity.multiple_crossings},
            {"branch_hist", hist}}}};
}

inline json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

inline json rung_json(const Rung& r) {
  return {{"vertices", r.vertices}, {"edges", r.edges}, {"walls", {r.wall_a, r.wall_b}}, {"energy", r.energy}};
}

inline json infima_json(const RungInfima& r) {
  return {{"I", optional_json(r.touching)}, {"I_prime", optional_json(r.touching_without)},
          {"I_tilde", optional_json(r.containing)}};
}

}  // namespace gslab
