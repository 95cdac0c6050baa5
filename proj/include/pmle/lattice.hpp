#ifndef PMLE_LATTICE_HPP
#define PMLE_LATTICE_HPP

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace pmle {

/// A node of the infinite triangular grid in axial coordinates.
struct Cell {
  int q = 0;
  int r = 0;

  friend constexpr auto operator<=>(const Cell&, const Cell&) = default;

  constexpr Cell operator+(const Cell& o) const { return {q + o.q, r + o.r}; }
  constexpr Cell operator-(const Cell& o) const { return {q - o.q, r - o.r}; }
};

inline std::ostream& operator<<(std::ostream& os, const Cell& c) {
  return os << '(' << c.q << ',' << c.r << ')';
}

struct CellHash {
  std::size_t operator()(const Cell& c) const noexcept {
    auto k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.q)) << 32) |
             static_cast<std::uint32_t>(c.r);
    return std::hash<std::uint64_t>{}(k * 0x9e3779b97f4a7c15ULL);
  }
};

/// Global direction index 0..5, counter-clockwise. Only the simulator sees it.
using Dir = int;

constexpr int kDegree = 6;

/// Unit offsets of Dir 0..5; opposite(d) == d + 3.
inline constexpr std::array<Cell, kDegree> kOffsets = {
    Cell{1, 0}, Cell{0, 1}, Cell{-1, 1}, Cell{-1, 0}, Cell{0, -1}, Cell{1, -1}};

constexpr int mod6(int x) { return ((x % kDegree) + kDegree) % kDegree; }

constexpr Dir opposite(Dir d) { return mod6(d + 3); }

constexpr Cell neighbor(const Cell& c, Dir d) { return c + kOffsets[mod6(d)]; }

constexpr std::array<Cell, kDegree> neighbors(const Cell& c) {
  std::array<Cell, kDegree> out{};
  for (int d = 0; d < kDegree; ++d) out[d] = neighbor(c, d);
  return out;
}

/// Direction from a to b when they are adjacent, -1 otherwise.
constexpr Dir direction_between(const Cell& a, const Cell& b) {
  const Cell diff = b - a;
  for (int d = 0; d < kDegree; ++d)
    if (kOffsets[d] == diff) return d;
  return -1;
}

constexpr bool adjacent(const Cell& a, const Cell& b) { return direction_between(a, b) >= 0; }

/// Hex distance between two cells.
constexpr int distance(const Cell& a, const Cell& b) {
  const int dq = a.q - b.q;
  const int dr = a.r - b.r;
  const int ds = -dq - dr;
  auto abs = [](int x) { return x < 0 ? -x : x; };
  return (abs(dq) + abs(dr) + abs(ds)) / 2;
}

/// The two cells adjacent to both a and b.
inline std::array<Cell, 2> common_neighbors(const Cell& a, const Cell& b) {
  const Dir d = direction_between(a, b);
  if (d < 0) throw std::invalid_argument("common_neighbors: cells are not adjacent");
  return {neighbor(a, d + 1), neighbor(a, d - 1)};
}

/// A particle's private labelling of its six ports.
///
/// Port p leads in global direction offset + chirality * p (mod 6), so
/// consecutive ports always lead to neighbouring nodes.
struct PortMap {
  int offset = 0;
  int chirality = 1;  // +1 or -1

  friend constexpr bool operator==(const PortMap&, const PortMap&) = default;

  constexpr Dir port_to_dir(int port) const { return mod6(offset + chirality * port); }
  constexpr int dir_to_port(Dir d) const { return mod6(chirality * (d - offset)); }
};

constexpr PortMap kIdentityPortMap{0, 1};

constexpr Dir port_to_dir(const PortMap& m, int port) { return m.port_to_dir(port); }

/// All twelve port labellings.
inline std::vector<PortMap> all_portmaps() {
  std::vector<PortMap> out;
  out.reserve(12);
  for (int chir : {1, -1})
    for (int off = 0; off < kDegree; ++off) out.push_back({off, chir});
  return out;
}

/// One of the 12 lattice symmetries fixing the origin: `rotation` sixths of
/// a turn, preceded by the reflection (q, r) -> (r, q) when `mirror` is set.
inline Cell transform(const Cell& c, int rotation, bool mirror) {
  Cell x = mirror ? Cell{c.r, c.q} : c;
  for (int i = 0; i < mod6(rotation); ++i) x = Cell{-x.r, x.q + x.r};
  return x;
}

}  // namespace pmle

template <>
struct std::hash<pmle::Cell> : pmle::CellHash {};

#endif  // PMLE_LATTICE_HPP
