#pragma once

// Finite lattice substrate: segments of Z, boxes in Z^2 and half-plane strips,
// with boundary operators, unit faces and the planar dual.

#include <algorithm>
#include <array>
#include <charconv>
#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "gslab/error.hpp"

namespace gslab {

using VertexId = std::uint32_t;
using EdgeId = std::uint32_t;
using DualVertexId = std::uint32_t;

struct Coord {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Coord&, const Coord&) = default;
};

enum class LatticeKind { segment, box, halfplane_strip };

inline std::string_view kind_name(LatticeKind k) {
  switch (k) {
    case LatticeKind::segment: return "segment";
    case LatticeKind::box: return "box";
    case LatticeKind::halfplane_strip: return "halfplane_strip";
  }
  return "?";
}

/// Strips are centered horizontally so that [-n, n] x {k} segments are
/// symmetric about the origin; the bottom row sits on the x-axis.
inline Coord default_origin(LatticeKind kind, int width) {
  if (kind == LatticeKind::halfplane_strip) return {-((width - 1) / 2), 0};
  return {0, 0};
}

struct LatticeSpec {
  LatticeKind kind = LatticeKind::box;
  int width = 1;
  int height = 1;
  std::optional<Coord> origin;  // lower-left vertex; default_origin() when empty

  Coord lower_left() const { return origin.value_or(default_origin(kind, width)); }

  friend bool operator==(const LatticeSpec& a, const LatticeSpec& b) {
    return a.kind == b.kind && a.width == b.width && a.height == b.height &&
           a.lower_left() == b.lower_left();
  }

  static LatticeSpec segment(int length) { return {LatticeKind::segment, length, 1, {}}; }
  static LatticeSpec box(int w, int h) { return {LatticeKind::box, w, h, {}}; }
  static LatticeSpec strip(int w, int h) { return {LatticeKind::halfplane_strip, w, h, {}}; }
};

namespace detail {

inline std::vector<int> parse_int_list(std::string_view text, std::string_view what) {
  std::vector<int> out;
  while (!text.empty()) {
    const auto comma = text.find(',');
    const auto tok = text.substr(0, comma);
    int v = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || ptr != tok.data() + tok.size() || tok.empty()) {
      throw ConfigError("malformed " + std::string(what) + ": '" + std::string(text) + "'");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

/// Parses "segment:L", "box:W,H", "strip:W,H" (alias "halfplane_strip:W,H"),
/// each optionally followed by "@X,Y" for an explicit lower-left origin.
inline LatticeSpec parse_lattice_spec(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ConfigError("lattice spec needs kind:dims, got '" + std::string(text) + "'");
  const auto kind = text.substr(0, colon);
  auto rest = text.substr(colon + 1);
  std::optional<Coord> origin;
  if (const auto at = rest.find('@'); at != std::string_view::npos) {
    const auto o = detail::parse_int_list(rest.substr(at + 1), "lattice origin");
    if (o.size() != 2) throw ConfigError("lattice origin needs X,Y");
    origin = Coord{o[0], o[1]};
    rest = rest.substr(0, at);
  }
  const auto dims = detail::parse_int_list(rest, "lattice dims");
  LatticeSpec spec;
  if (kind == "segment") {
    if (dims.size() != 1) throw ConfigError("segment takes one dimension");
    spec = LatticeSpec::segment(dims[0]);
  } else if (kind == "box") {
    if (dims.size() != 2) throw ConfigError("box takes W,H");
    spec = LatticeSpec::box(dims[0], dims[1]);
  } else if (kind == "strip" || kind == "halfplane_strip") {
    if (dims.size() != 2) throw ConfigError("strip takes W,H");
    spec = LatticeSpec::strip(dims[0], dims[1]);
  } else {
    throw ConfigError("unknown lattice kind '" + std::string(kind) + "'");
  }
  spec.origin = origin;
  return spec;
}

inline std::string to_string(const LatticeSpec& spec) {
  std::string s = spec.kind == LatticeKind::halfplane_strip ? "strip" : std::string(kind_name(spec.kind));
  s += ':' + std::to_string(spec.width);
  if (spec.kind != LatticeKind::segment) s += ',' + std::to_string(spec.height);
  const Coord o = spec.lower_left();
  if (o != default_origin(spec.kind, spec.width)) s += '@' + std::to_string(o.x) + ',' + std::to_string(o.y);
  return s;
}

/// Unit square; edges listed bottom, right, top, left (a closed cycle).
struct Face {
  Coord corner;
  std::array<EdgeId, 4> edges{};
};

class Lattice {
 public:
  static constexpr std::size_t kDefaultVertexCap = 1024;

  explicit Lattice(LatticeSpec spec, std::size_t vertex_cap = kDefaultVertexCap) : spec_(spec) {
    if (spec.width < 1 || spec.height < 1) throw SizingError("lattice dimensions must be >= 1");
    if (spec.kind == LatticeKind::segment && spec.height != 1) throw SizingError("segment height must be 1");
    const auto n = static_cast<std::size_t>(spec.width) * static_cast<std::size_t>(spec.height);
    if (n > vertex_cap) {
      throw SizingError("lattice has " + std::to_string(n) + " vertices, cap is " + std::to_string(vertex_cap));
    }
    origin_ = spec.lower_left();
    vertices_.reserve(n);
    for (int y = 0; y < spec.height; ++y)
      for (int x = 0; x < spec.width; ++x) vertices_.push_back({origin_.x + x, origin_.y + y});

    for (VertexId v = 0; v < n; ++v) {
      const Coord c = vertices_[v];
      if (auto r = vertex_at({c.x + 1, c.y})) edges_.emplace_back(v, *r);
      if (auto u = vertex_at({c.x, c.y + 1})) edges_.emplace_back(v, *u);
    }
    std::sort(edges_.begin(), edges_.end());

    incident_.assign(n, {});
    for (EdgeId e = 0; e < edges_.size(); ++e) {
      incident_[edges_[e].first].push_back(e);
      incident_[edges_[e].second].push_back(e);
    }

    if (planar()) {
      for (int y = 0; y + 1 < spec.height; ++y) {
        for (int x = 0; x + 1 < spec.width; ++x) {
          const Coord c{origin_.x + x, origin_.y + y};
          const VertexId a = *vertex_at(c);
          const VertexId b = *vertex_at({c.x + 1, c.y});
          const VertexId d = *vertex_at({c.x, c.y + 1});
          const VertexId t = *vertex_at({c.x + 1, c.y + 1});
          faces_.push_back({c, {*edge_between(a, b), *edge_between(b, t), *edge_between(d, t), *edge_between(a, d)}});
        }
      }
    }
  }

  const LatticeSpec& spec() const { return spec_; }
  LatticeKind kind() const { return spec_.kind; }
  bool planar() const { return spec_.kind != LatticeKind::segment; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return edges_.size(); }

  Coord coord(VertexId v) const { return vertices_.at(v); }
  std::span<const Coord> coords() const { return vertices_; }

  int min_x() const { return origin_.x; }
  int min_y() const { return origin_.y; }
  int max_x() const { return origin_.x + spec_.width - 1; }
  int max_y() const { return origin_.y + spec_.height - 1; }

  std::optional<VertexId> vertex_at(Coord c) const {
    const int dx = c.x - origin_.x;
    const int dy = c.y - origin_.y;
    if (dx < 0 || dy < 0 || dx >= spec_.width || dy >= spec_.height) return std::nullopt;
    return static_cast<VertexId>(dy * spec_.width + dx);
  }

  std::pair<VertexId, VertexId> endpoints(EdgeId e) const {
    check_edge(e);
    return edges_[e];
  }
  std::span<const std::pair<VertexId, VertexId>> edges() const { return edges_; }

  std::span<const EdgeId> incident(VertexId v) const {
    check_vertex(v);
    return incident_[v];
  }
  std::size_t degree(VertexId v) const { return incident(v).size(); }

  VertexId other(EdgeId e, VertexId v) const {
    const auto [a, b] = endpoints(e);
    return a == v ? b : a;
  }

  std::optional<EdgeId> edge_between(VertexId u, VertexId v) const {
    if (u >= vertices_.size() || v >= vertices_.size()) return std::nullopt;
    for (EdgeId e : incident_[u])
      if (other(e, u) == v) return e;
    return std::nullopt;
  }

  /// Both endpoints share a y coordinate.
  bool horizontal(EdgeId e) const {
    const auto [a, b] = endpoints(e);
    return vertices_[a].y == vertices_[b].y;
  }

  /// Unit squares in row-major order of their lower-left corner.
  std::span<const Face> faces() const {
    if (!planar()) throw UnsupportedKindError("faces are defined for planar lattices only");
    return faces_;
  }

  void check_vertex(VertexId v) const {
    if (v >= vertices_.size()) throw StructuralError("vertex " + std::to_string(v) + " out of range");
  }
  void check_edge(EdgeId e) const {
    if (e >= edges_.size()) throw StructuralError("edge " + std::to_string(e) + " out of range");
  }

  friend bool operator==(const Lattice& a, const Lattice& b) { return a.spec_ == b.spec_; }

 private:
  LatticeSpec spec_;
  Coord origin_;
  std::vector<Coord> vertices_;
  std::vector<std::pair<VertexId, VertexId>> edges_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<Face> faces_;
};

/// Axis-aligned block of vertices: w x h starting at lower-left (x0, y0).
struct Rect {
  int x0 = 0;
  int y0 = 0;
  int w = 1;
  int h = 1;

  bool contains(Coord c) const { return c.x >= x0 && c.x < x0 + w && c.y >= y0 && c.y < y0 + h; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

/// "W,H@X,Y"; for segments "W@X" is also accepted.
inline Rect parse_rect(std::string_view text) {
  const auto at = text.find('@');
  const auto dims = detail::parse_int_list(text.substr(0, at), "window dims");
  std::vector<int> pos{0, 0};
  if (at != std::string_view::npos) pos = detail::parse_int_list(text.substr(at + 1), "window position");
  if (dims.empty() || dims.size() > 2 || pos.empty() || pos.size() > 2) throw ConfigError("window spec is W,H@X,Y");
  Rect r{pos[0], pos.size() > 1 ? pos[1] : 0, dims[0], dims.size() > 1 ? dims[1] : 1};
  if (r.w < 1 || r.h < 1) throw SizingError("window dimensions must be >= 1");
  return r;
}

inline std::string to_string(const Rect& r) {
  return std::to_string(r.w) + ',' + std::to_string(r.h) + '@' + std::to_string(r.x0) + ',' + std::to_string(r.y0);
}

/// A set of vertices of one lattice, kept sorted.
class Region {
 public:
  Region() = default;

  Region(const Lattice& lattice, std::vector<VertexId> members) : members_(std::move(members)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
    if (!members_.empty()) lattice.check_vertex(members_.back());
  }

  static Region all(const Lattice& lattice) {
    std::vector<VertexId> m(lattice.num_vertices());
    for (VertexId v = 0; v < m.size(); ++v) m[v] = v;
    return Region(lattice, std::move(m));
  }

  /// Every vertex of the block must lie in the lattice.
  static Region rect(const Lattice& lattice, const Rect& r) {
    std::vector<VertexId> m;
    for (int y = r.y0; y < r.y0 + r.h; ++y) {
      for (int x = r.x0; x < r.x0 + r.w; ++x) {
        const auto v = lattice.vertex_at({x, y});
        if (!v) throw SizingError("window " + to_string(r) + " leaves lattice " + to_string(lattice.spec()));
        m.push_back(*v);
      }
    }
    return Region(lattice, std::move(m));
  }

  std::span<const VertexId> members() const { return members_; }
  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(VertexId v) const { return std::binary_search(members_.begin(), members_.end(), v); }

  /// Position of v within members(), if present.
  std::optional<std::size_t> index_of(VertexId v) const {
    auto it = std::lower_bound(members_.begin(), members_.end(), v);
    if (it == members_.end() || *it != v) return std::nullopt;
    return static_cast<std::size_t>(it - members_.begin());
  }

  bool subset_of(const Region& other) const {
    return std::includes(other.members_.begin(), other.members_.end(), members_.begin(), members_.end());
  }

  /// Dense membership mask over all lattice vertices.
  std::vector<char> mask(const Lattice& lattice) const {
    std::vector<char> m(lattice.num_vertices(), 0);
    for (VertexId v : members_) m[v] = 1;
    return m;
  }

  friend bool operator==(const Region&, const Region&) = default;

 private:
  std::vector<VertexId> members_;
};

inline Region complement(const Lattice& lattice, const Region& r) {
  std::vector<VertexId> m;
  for (VertexId v = 0; v < lattice.num_vertices(); ++v)
    if (!r.contains(v)) m.push_back(v);
  return Region(lattice, std::move(m));
}

/// Edges with exactly one endpoint in the region, in canonical order.
inline std::vector<EdgeId> boundary_edges(const Lattice& lattice, const Region& region) {
  if (!region.empty()) lattice.check_vertex(region.members().back());
  const auto in = region.mask(lattice);
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < lattice.num_edges(); ++e) {
    const auto [a, b] = lattice.endpoints(e);
    if (in[a] != in[b]) out.push_back(e);
  }
  return out;
}

/// Vertices outside the region adjacent to it, sorted.
inline std::vector<VertexId> external_boundary(const Lattice& lattice, const Region& region) {
  const auto in = region.mask(lattice);
  std::vector<VertexId> out;
  for (VertexId v = 0; v < lattice.num_vertices(); ++v) {
    if (in[v]) continue;
    for (EdgeId e : lattice.incident(v)) {
      if (in[lattice.other(e, v)]) {
        out.push_back(v);
        break;
      }
    }
  }
  return out;
}

/// Edges with both endpoints in the region, in canonical order.
inline std::vector<EdgeId> internal_edges(const Lattice& lattice, const Region& region) {
  const auto in = region.mask(lattice);
  std::vector<EdgeId> out;
  for (EdgeId e = 0; e < lattice.num_edges(); ++e) {
    const auto [a, b] = lattice.endpoints(e);
    if (in[a] && in[b]) out.push_back(e);
  }
  return out;
}

inline std::span<const Face> enumerate_faces(const Lattice& lattice) { return lattice.faces(); }

/// Planar dual. Dual vertex `cell` stands for the point (cell.x + 1/2, cell.y + 1/2);
/// interior ones are unit faces, the rest form an outer ring (no corners) whose
/// members are distinct terminals. Dual edge ids coincide with primal edge ids.
class DualGraph {
 public:
  struct Vertex {
    Coord cell;
    bool interior = false;
  };

  static DualGraph build(const Lattice& lattice) {
    if (!lattice.planar()) throw UnsupportedKindError("dual graph needs a planar lattice (box or strip)");
    DualGraph g;
    g.strip_ = lattice.kind() == LatticeKind::halfplane_strip;
    std::vector<std::pair<Coord, Coord>> cells(lattice.num_edges());
    std::vector<Coord> all;
    for (EdgeId e = 0; e < lattice.num_edges(); ++e) {
      const auto [a, b] = lattice.endpoints(e);
      const Coord p = lattice.coord(a);
      // a < b in canonical order, so b is to the right of or above a.
      if (lattice.horizontal(e)) {
        cells[e] = {{p.x, p.y - 1}, {p.x, p.y}};
      } else {
        cells[e] = {{p.x - 1, p.y}, {p.x, p.y}};
      }
      all.push_back(cells[e].first);
      all.push_back(cells[e].second);
    }
    auto row_major = [](Coord a, Coord b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); };
    std::sort(all.begin(), all.end(), row_major);
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (Coord c : all) {
      const bool interior = c.x >= lattice.min_x() && c.x < lattice.max_x() && c.y >= lattice.min_y() &&
                            c.y < lattice.max_y();
      g.vertices_.push_back({c, interior});
    }
    auto id_of = [&](Coord c) {
      return static_cast<DualVertexId>(std::lower_bound(all.begin(), all.end(), c, row_major) - all.begin());
    };
    g.endpoints_.resize(lattice.num_edges());
    g.incident_.assign(g.vertices_.size(), {});
    g.crosses_axis_.assign(lattice.num_edges(), 0);
    for (EdgeId e = 0; e < lattice.num_edges(); ++e) {
      g.endpoints_[e] = {id_of(cells[e].first), id_of(cells[e].second)};
      g.incident_[g.endpoints_[e].first].push_back(e);
      g.incident_[g.endpoints_[e].second].push_back(e);
      if (g.strip_ && lattice.horizontal(e) && lattice.coord(lattice.endpoints(e).first).y == 0) g.crosses_axis_[e] = 1;
    }
    return g;
  }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_edges() const { return endpoints_.size(); }
  const Vertex& vertex(DualVertexId v) const { return vertices_.at(v); }
  std::span<const Vertex> vertices() const { return vertices_; }
  std::pair<DualVertexId, DualVertexId> endpoints(EdgeId e) const { return endpoints_.at(e); }
  std::span<const EdgeId> incident(DualVertexId v) const { return incident_.at(v); }
  DualVertexId other(EdgeId e, DualVertexId v) const {
    const auto [a, b] = endpoints(e);
    return a == v ? b : a;
  }

  std::optional<DualVertexId> find(Coord cell) const {
    for (DualVertexId v = 0; v < vertices_.size(); ++v)
      if (vertices_[v].cell == cell) return v;
    return std::nullopt;
  }

  /// Dual edge crosses the x-axis: it is the dual of a horizontal primal edge on y = 0
  /// of a half-plane strip, so one endpoint lies at y = -1/2.
  bool crosses_x_axis(EdgeId e) const { return crosses_axis_.at(e) != 0; }
  bool is_strip() const { return strip_; }

 private:
  std::vector<Vertex> vertices_;
  std::vector<std::pair<DualVertexId, DualVertexId>> endpoints_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<char> crosses_axis_;
  bool strip_ = false;
};

inline DualGraph build_dual(const Lattice& lattice) { return DualGraph::build(lattice); }

}  // namespace gslab
