#ifndef PMLE_SUPPORT_HPP
#define PMLE_SUPPORT_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "pmle/lattice.hpp"

namespace pmle {

/// Malformed text input, with the 1-based line it was found on.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// The set of occupied cells of a connected particle system.
///
/// Immutable. Cells are kept sorted; a particle is addressed either by its
/// Cell or by its index into cells(). Edges are listed once, as index pairs
/// (lo, hi) with lo < hi, in lexicographic order.
class Support {
 public:
  static constexpr int kEmpty = -1;

  explicit Support(std::vector<Cell> cells) : cells_(std::move(cells)) {
    std::sort(cells_.begin(), cells_.end());
    cells_.erase(std::unique(cells_.begin(), cells_.end()), cells_.end());
    if (cells_.empty()) throw std::invalid_argument("support must be nonempty");
    index_.reserve(cells_.size() * 2);
    for (std::size_t i = 0; i < cells_.size(); ++i) index_.emplace(cells_[i], static_cast<int>(i));
    nbr_.resize(cells_.size());
    for (std::size_t i = 0; i < cells_.size(); ++i) {
      for (int d = 0; d < kDegree; ++d) {
        auto it = index_.find(neighbor(cells_[i], d));
        nbr_[i][d] = it == index_.end() ? kEmpty : it->second;
        if (nbr_[i][d] > static_cast<int>(i)) edges_.emplace_back(static_cast<int>(i), nbr_[i][d]);
      }
    }
    std::sort(edges_.begin(), edges_.end());
    lo_ = hi_ = cells_.front();
    for (const Cell& c : cells_) {
      lo_.q = std::min(lo_.q, c.q);
      lo_.r = std::min(lo_.r, c.r);
      hi_.q = std::max(hi_.q, c.q);
      hi_.r = std::max(hi_.r, c.r);
    }
    if (!connected_without(kEmpty)) throw std::invalid_argument("support is not connected");
  }

  std::size_t size() const noexcept { return cells_.size(); }
  const std::vector<Cell>& cells() const noexcept { return cells_; }
  const Cell& cell(int i) const { return cells_.at(static_cast<std::size_t>(i)); }
  const std::vector<std::pair<int, int>>& edges() const noexcept { return edges_; }

  bool contains(const Cell& c) const { return index_.count(c) != 0; }
  std::optional<int> index_of(const Cell& c) const {
    auto it = index_.find(c);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int require_index(const Cell& c) const {
    auto i = index_of(c);
    if (!i) {
      std::ostringstream os;
      os << "cell " << c << " is not occupied";
      throw std::invalid_argument(os.str());
    }
    return *i;
  }

  /// Index of the particle in global direction d from particle i, or kEmpty.
  int neighbor_index(int i, Dir d) const { return nbr_[static_cast<std::size_t>(i)][mod6(d)]; }
  const std::array<int, kDegree>& neighbor_indices(int i) const {
    return nbr_[static_cast<std::size_t>(i)];
  }
  int degree(int i) const {
    int n = 0;
    for (int j : nbr_[static_cast<std::size_t>(i)]) n += j != kEmpty;
    return n;
  }

  /// Bounding box corners (inclusive).
  Cell min_corner() const noexcept { return lo_; }
  Cell max_corner() const noexcept { return hi_; }

  /// Whether the particle graph stays connected once `removed` is deleted.
  bool connected_without(int removed) const {
    const std::size_t n = cells_.size();
    if (n <= 1 || (n == 2 && removed != kEmpty)) return true;
    std::vector<char> seen(n, 0);
    int start = removed == 0 ? 1 : 0;
    std::vector<int> stack{start};
    seen[static_cast<std::size_t>(start)] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : nbr_[static_cast<std::size_t>(u)]) {
        if (v == kEmpty || v == removed || seen[static_cast<std::size_t>(v)]) continue;
        seen[static_cast<std::size_t>(v)] = 1;
        ++count;
        stack.push_back(v);
      }
    }
    return count == n - (removed == kEmpty ? 0 : 1);
  }

  friend bool operator==(const Support& a, const Support& b) { return a.cells_ == b.cells_; }

 private:
  std::vector<Cell> cells_;
  std::unordered_map<Cell, int, CellHash> index_;
  std::vector<std::array<int, kDegree>> nbr_;
  std::vector<std::pair<int, int>> edges_;
  Cell lo_{}, hi_{};
};

/// Connected components of empty cells that are cut off from infinity.
inline std::vector<std::vector<Cell>> holes(const Support& s) {
  const Cell lo = s.min_corner() - Cell{1, 1};
  const Cell hi = s.max_corner() + Cell{1, 1};
  const int w = hi.q - lo.q + 1;
  const int h = hi.r - lo.r + 1;
  auto inside = [&](const Cell& c) { return c.q >= lo.q && c.q <= hi.q && c.r >= lo.r && c.r <= hi.r; };
  auto slot = [&](const Cell& c) {
    return static_cast<std::size_t>(c.q - lo.q) * static_cast<std::size_t>(h) +
           static_cast<std::size_t>(c.r - lo.r);
  };
  // 0 = unvisited empty, 1 = occupied, 2 = visited
  std::vector<char> mark(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), 0);
  for (const Cell& c : s.cells()) mark[slot(c)] = 1;

  auto flood = [&](const Cell& seed, std::vector<Cell>* out) {
    std::vector<Cell> stack{seed};
    mark[slot(seed)] = 2;
    while (!stack.empty()) {
      Cell c = stack.back();
      stack.pop_back();
      if (out) out->push_back(c);
      for (const Cell& n : neighbors(c)) {
        if (!inside(n) || mark[slot(n)] != 0) continue;
        mark[slot(n)] = 2;
        stack.push_back(n);
      }
    }
  };
  // The frame of the margin-1 box is always empty and connected.
  for (int q = lo.q; q <= hi.q; ++q)
    for (int r : {lo.r, hi.r})
      if (mark[slot({q, r})] == 0) flood({q, r}, nullptr);
  for (int r = lo.r; r <= hi.r; ++r)
    for (int q : {lo.q, hi.q})
      if (mark[slot({q, r})] == 0) flood({q, r}, nullptr);

  std::vector<std::vector<Cell>> out;
  for (int q = lo.q; q <= hi.q; ++q) {
    for (int r = lo.r; r <= hi.r; ++r) {
      if (mark[slot({q, r})] != 0) continue;
      out.emplace_back();
      flood({q, r}, &out.back());
      std::sort(out.back().begin(), out.back().end());
    }
  }
  return out;
}

inline bool is_simply_connected(const Support& s) { return holes(s).empty(); }

/// Occupied cells with at least one empty neighbour, in cell order.
inline std::vector<Cell> boundary(const Support& s) {
  std::vector<Cell> out;
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.degree(static_cast<int>(i)) < kDegree) out.push_back(s.cells()[i]);
  return out;
}

/// Articulation points by lowpoint DFS, in cell order.
inline std::vector<Cell> articulation_points(const Support& s) {
  const std::size_t n = s.size();
  std::vector<int> disc(n, -1), low(n, 0), parent(n, -1);
  std::vector<char> is_cut(n, 0);
  int timer = 0;
  struct Frame {
    int u;
    int next_dir;
    int children;
  };
  std::vector<Frame> stack;
  stack.push_back({0, 0, 0});
  disc[0] = low[0] = timer++;
  while (!stack.empty()) {
    Frame& f = stack.back();
    const std::size_t u = static_cast<std::size_t>(f.u);
    if (f.next_dir < kDegree) {
      const int v = s.neighbor_index(f.u, f.next_dir++);
      if (v == Support::kEmpty) continue;
      const std::size_t vi = static_cast<std::size_t>(v);
      if (disc[vi] < 0) {
        parent[vi] = f.u;
        disc[vi] = low[vi] = timer++;
        ++f.children;
        stack.push_back({v, 0, 0});
      } else if (v != parent[u]) {
        low[u] = std::min(low[u], disc[vi]);
      }
      continue;
    }
    const Frame done = f;
    stack.pop_back();
    if (stack.empty()) {
      if (done.children > 1) is_cut[u] = 1;
      break;
    }
    const std::size_t p = static_cast<std::size_t>(stack.back().u);
    low[p] = std::min(low[p], low[u]);
    if (parent[p] != -1 && low[u] >= disc[p]) is_cut[p] = 1;
  }
  std::vector<Cell> out;
  for (std::size_t i = 0; i < n; ++i)
    if (is_cut[i]) out.push_back(s.cells()[i]);
  return out;
}

inline bool is_two_connected(const Support& s) { return articulation_points(s).empty(); }

struct BoundaryClass {
  enum class Kind { Pending, Articulation, Angle };
  Kind kind = Kind::Angle;
  int degrees = 0;  // meaningful for Angle only

  static BoundaryClass pending() { return {Kind::Pending, 0}; }
  static BoundaryClass articulation() { return {Kind::Articulation, 0}; }
  static BoundaryClass angle(int deg) { return {Kind::Angle, deg}; }

  bool is_angle(int deg) const { return kind == Kind::Angle && degrees == deg; }
  friend bool operator==(const BoundaryClass&, const BoundaryClass&) = default;
};

inline std::ostream& operator<<(std::ostream& os, const BoundaryClass& b) {
  switch (b.kind) {
    case BoundaryClass::Kind::Pending: return os << "pending";
    case BoundaryClass::Kind::Articulation: return os << "articulation";
    case BoundaryClass::Kind::Angle: return os << b.degrees << "deg";
  }
  return os;
}

namespace detail {

// Lengths of the maximal runs of occupied directions around particle i.
inline std::vector<int> occupied_arcs(const Support& s, int i) {
  std::vector<int> arcs;
  int start = -1;
  for (int d = 0; d < kDegree; ++d) {
    if (s.neighbor_index(i, d) == Support::kEmpty) {
      start = d;
      break;
    }
  }
  if (start < 0) return {kDegree};
  int run = 0;
  for (int k = 1; k <= kDegree; ++k) {
    if (s.neighbor_index(i, start + k) != Support::kEmpty) {
      ++run;
    } else if (run > 0) {
      arcs.push_back(run);
      run = 0;
    }
  }
  return arcs;
}

inline BoundaryClass classify_index(const Support& s, int i, const std::vector<char>& cut) {
  const int deg = s.degree(i);
  if (deg == kDegree) throw std::invalid_argument("classify: particle is not on the boundary");
  if (deg == 1) return BoundaryClass::pending();
  if (cut[static_cast<std::size_t>(i)]) return BoundaryClass::articulation();
  const auto arcs = occupied_arcs(s, i);
  // Two or more arcs around a non-cut particle enclose a hole.
  if (arcs.size() != 1) throw std::domain_error("classify: particle borders more than one empty region");
  return BoundaryClass::angle(60 * (arcs.front() - 1));
}

inline std::vector<char> cut_mask(const Support& s) {
  std::vector<char> cut(s.size(), 0);
  for (const Cell& c : articulation_points(s)) cut[static_cast<std::size_t>(s.require_index(c))] = 1;
  return cut;
}

}  // namespace detail

/// Pending, articulation point, or the angle swept through occupied
/// neighbours between the two boundary edges.
inline BoundaryClass classify(const Support& s, const Cell& p) {
  const int i = s.require_index(p);
  return detail::classify_index(s, i, detail::cut_mask(s));
}

/// The closed walk along the outer face, starting at the smallest cell.
/// Articulation points may appear several times.
inline std::vector<Cell> boundary_walk(const Support& s) {
  const int start = 0;  // smallest cell; its Dir 3 neighbour has smaller q
  std::vector<Cell> walk{s.cell(start)};
  if (s.size() == 1) return walk;
  const Dir empty_dir = 3;
  Dir back = empty_dir;
  while (s.neighbor_index(start, back) == Support::kEmpty) back = mod6(back - 1);
  auto next_from = [&](int u, Dir b) {
    for (int k = 1; k <= kDegree; ++k)
      if (s.neighbor_index(u, b + k) != Support::kEmpty) return mod6(b + k);
    return -1;
  };
  const Dir first = next_from(start, back);
  int u = start;
  Dir out = first;
  while (true) {
    const int v = s.neighbor_index(u, out);
    const Dir b = opposite(out);
    const Dir nxt = next_from(v, b);
    if (v == start && nxt == first) break;
    walk.push_back(s.cell(v));
    u = v;
    out = nxt;
  }
  return walk;
}

struct AngleCensus {
  int n60 = 0, n120 = 0, n180 = 0, n240 = 0;
  int formula() const { return 2 * n60 + n120 - n240; }
};

inline AngleCensus angle_census(const Support& s) {
  const auto cut = detail::cut_mask(s);
  AngleCensus census;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.degree(static_cast<int>(i)) == kDegree) continue;
    const auto b = detail::classify_index(s, static_cast<int>(i), cut);
    if (b.kind != BoundaryClass::Kind::Angle) continue;
    switch (b.degrees) {
      case 60: ++census.n60; break;
      case 120: ++census.n120; break;
      case 180: ++census.n180; break;
      case 240: ++census.n240; break;
      default: throw std::logic_error("angle_census: impossible boundary angle");
    }
  }
  return census;
}

/// 2*n60 + n120 - n240 == 6 on a 2-connected support of at least 3 cells.
inline bool check_obs1(const Support& s) {
  if (s.size() < 3 || !is_two_connected(s))
    throw std::invalid_argument("check_obs1: support must be 2-connected with at least 3 cells");
  return angle_census(s).formula() == 6;
}

/// Which of the three boundary structures was found.
struct Lemma1Witness {
  int which = 0;              // 1: pending, 2: 60 degree, 3: 120..180*..120
  Cell p{};
  Cell p_star{};              // case 3 only
  std::vector<Cell> path{};   // case 3: the 180 degree particles between p and p_star
};

inline Lemma1Witness lemma1_witness(const Support& s) {
  if (s.size() < 2) throw std::invalid_argument("lemma1_witness: need at least two particles");
  if (!is_simply_connected(s)) throw std::invalid_argument("lemma1_witness: support is not simply connected");
  const auto cut = detail::cut_mask(s);
  std::vector<BoundaryClass> cls(s.size());
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.degree(static_cast<int>(i)) < kDegree) cls[i] = detail::classify_index(s, static_cast<int>(i), cut);

  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.degree(static_cast<int>(i)) < kDegree && cls[i].kind == BoundaryClass::Kind::Pending)
      return {1, s.cells()[i], {}, {}};
  for (std::size_t i = 0; i < s.size(); ++i)
    if (s.degree(static_cast<int>(i)) < kDegree && cls[i].is_angle(60)) return {2, s.cells()[i], {}, {}};

  const auto walk = boundary_walk(s);
  const std::size_t m = walk.size();
  auto class_at = [&](std::size_t k) { return cls[static_cast<std::size_t>(s.require_index(walk[k % m]))]; };
  for (std::size_t i = 0; i < m; ++i) {
    if (!class_at(i).is_angle(120)) continue;
    std::vector<Cell> path;
    for (std::size_t j = i + 1; j < i + m; ++j) {
      const auto c = class_at(j);
      if (c.is_angle(180)) {
        path.push_back(walk[j % m]);
        continue;
      }
      if (c.is_angle(120)) return {3, walk[i], walk[j % m], path};
      break;
    }
  }
  throw std::logic_error("lemma1_witness: no pending, 60 degree, or 120-180*-120 boundary structure");
}

/// Shape files: one `q r` per line, `#` comments, blank lines ignored.
inline std::vector<Cell> parse_shape(std::istream& in) {
  std::vector<Cell> cells;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long q = 0, r = 0;
    if (!(ls >> q)) {
      std::string rest;
      ls.clear();
      if (ls >> rest) throw ParseError(lineno, "expected two integers 'q r'");
      continue;
    }
    if (!(ls >> r)) throw ParseError(lineno, "expected two integers 'q r'");
    std::string extra;
    if (ls >> extra) throw ParseError(lineno, "trailing text '" + extra + "'");
    cells.push_back({static_cast<int>(q), static_cast<int>(r)});
  }
  if (cells.empty()) throw ParseError(lineno, "shape has no cells");
  return cells;
}

inline std::vector<Cell> parse_shape(const std::string& text) {
  std::istringstream in(text);
  return parse_shape(in);
}

inline std::string format_shape(const Support& s) {
  std::ostringstream os;
  for (const Cell& c : s.cells()) os << c.q << ' ' << c.r << '\n';
  return os.str();
}

}  // namespace pmle

#endif  // PMLE_SUPPORT_HPP
