#pragma once

// Exact minimization on rectangular regions by a profile (transfer-matrix)
// dynamic program. Each profile state keeps its two best partial energies so the
// global runner-up is available for the tie audit.

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "gslab/couplings.hpp"
#include "gslab/error.hpp"
#include "gslab/lattice.hpp"
#include "gslab/spins.hpp"

namespace gslab {

inline constexpr int kMaxProfile = 16;

/// The block spanned by the region, when the region is exactly that block.
inline std::optional<Rect> as_rect(const Lattice& lat, const Region& region) {
  if (region.empty()) return std::nullopt;
  int x0 = std::numeric_limits<int>::max(), y0 = x0, x1 = std::numeric_limits<int>::min(), y1 = x1;
  for (VertexId v : region.members()) {
    const Coord c = lat.coord(v);
    x0 = std::min(x0, c.x);
    y0 = std::min(y0, c.y);
    x1 = std::max(x1, c.x);
    y1 = std::max(y1, c.y);
  }
  const Rect r{x0, y0, x1 - x0 + 1, y1 - y0 + 1};
  if (static_cast<std::size_t>(r.w) * static_cast<std::size_t>(r.h) != region.size()) return std::nullopt;
  return r;
}

namespace detail {

struct RawSolve {
  std::vector<Spin> region_spins;  // by region position
  double best = 0.0;
  double second = std::numeric_limits<double>::infinity();
};

inline RawSolve transfer_minimize(const CouplingConfig& j, const Region& region, const SpinConfig& base, bool fixed) {
  const Lattice& lat = j.lattice();
  const auto rect = as_rect(lat, region);
  if (!rect) throw UnsupportedKindError("transfer solver needs a rectangular region");
  // The profile runs along the shorter side.
  const bool along_x = rect->w <= rect->h;
  const int p = along_x ? rect->w : rect->h;
  const int lines = along_x ? rect->h : rect->w;
  if (p > kMaxProfile) {
    throw SizingError("transfer solver profile " + std::to_string(p) + " exceeds " + std::to_string(kMaxProfile));
  }
  const auto fields = boundary_fields(j, region, base, fixed);
  auto site_coord = [&](int line, int pos) {
    return along_x ? Coord{rect->x0 + pos, rect->y0 + line} : Coord{rect->x0 + line, rect->y0 + pos};
  };
  auto coupling = [&](Coord a, Coord b) { return j[*lat.edge_between(*lat.vertex_at(a), *lat.vertex_at(b))]; };

  const std::size_t states = std::size_t{1} << p;
  const std::size_t sites = static_cast<std::size_t>(p) * static_cast<std::size_t>(lines);
  if (sites * states > (std::size_t{1} << 28)) throw SizingError("transfer solver table too large");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // bit = 1 encodes spin -1.
  std::vector<std::array<double, 2>> cur(states, {kInf, kInf}), nxt(states);
  cur[0] = {0.0, kInf};
  std::vector<std::uint8_t> choice(sites * states, 0);

  std::size_t site = 0;
  for (int line = 0; line < lines; ++line) {
    for (int pos = 0; pos < p; ++pos, ++site) {
      const Coord c = site_coord(line, pos);
      const double b = fields[*region.index_of(*lat.vertex_at(c))];
      const double j_prev = pos > 0 ? coupling(site_coord(line, pos - 1), c) : 0.0;
      const double j_back = line > 0 ? coupling(site_coord(line - 1, pos), c) : 0.0;
      const std::size_t bit = std::size_t{1} << pos;
      const bool pinned = !fixed && site == 0;
      for (std::size_t ns = 0; ns < states; ++ns) {
        const int s = (ns & bit) ? -1 : 1;
        std::array<double, 2> out{kInf, kInf};
        std::uint8_t pick = 0;
        if (!(pinned && s < 0)) {
          const int s_prev = pos > 0 ? ((ns >> (pos - 1) & 1U) ? -1 : 1) : 0;
          for (std::uint8_t old = 0; old < 2; ++old) {
            const std::size_t ps = old ? (ns | bit) : (ns & ~bit);
            const int s_back = old ? -1 : 1;
            const double inc = -s * (j_prev * s_prev + j_back * s_back + b);
            for (double v : cur[ps]) {
              if (v == kInf) continue;
              const double t = v + inc;
              if (t < out[0]) {
                out[1] = out[0];
                out[0] = t;
                pick = old;
              } else if (t < out[1]) {
                out[1] = t;
              }
            }
          }
        }
        nxt[ns] = out;
        choice[site * states + ns] = pick;
      }
      std::swap(cur, nxt);
    }
  }

  RawSolve r;
  r.best = kInf;
  std::size_t arg = 0;
  for (std::size_t s = 0; s < states; ++s) {
    for (double v : cur[s]) {
      if (v < r.best) {
        r.second = r.best;
        r.best = v;
        arg = s;
      } else if (v < r.second) {
        r.second = v;
      }
    }
  }

  r.region_spins.assign(region.size(), 1);
  std::size_t state = arg;
  for (std::size_t k = sites; k-- > 0;) {
    const int line = static_cast<int>(k / static_cast<std::size_t>(p));
    const int pos = static_cast<int>(k % static_cast<std::size_t>(p));
    const std::size_t bit = std::size_t{1} << pos;
    const VertexId v = *lat.vertex_at(site_coord(line, pos));
    r.region_spins[*region.index_of(v)] = (state & bit) ? -1 : 1;
    const std::uint8_t old = choice[k * states + state];
    state = old ? (state | bit) : (state & ~bit);
  }
  return r;
}

}  // namespace detail

}  // namespace gslab
