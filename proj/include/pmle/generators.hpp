#ifndef PMLE_GENERATORS_HPP
#define PMLE_GENERATORS_HPP

#include <algorithm>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <regex>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmle/config.hpp"
#include "pmle/lattice.hpp"
#include "pmle/rules.hpp"
#include "pmle/support.hpp"

namespace pmle {

// ---------------------------------------------------------------------------
// Canonical forms and enumeration

/// Sorted cells translated so the smallest one sits at the origin.
inline std::vector<Cell> canonical_translation(std::vector<Cell> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  const Cell base = cells.front();
  for (Cell& c : cells) c = c - base;
  return cells;
}

/// Smallest translation-canonical form over the 12 lattice symmetries.
inline std::vector<Cell> canonical_symmetry(const std::vector<Cell>& cells) {
  std::vector<Cell> best;
  for (bool mirror : {false, true}) {
    for (int rot = 0; rot < kDegree; ++rot) {
      std::vector<Cell> t;
      t.reserve(cells.size());
      for (const Cell& c : cells) t.push_back(transform(c, rot, mirror));
      t = canonical_translation(std::move(t));
      if (best.empty() || t < best) best = std::move(t);
    }
  }
  return best;
}

/// Every simply connected support of n cells, once each up to translation
/// (or up to the full symmetry group), in canonical order.
inline std::vector<Support> enumerate_supports(int n, bool up_to_symmetry = false) {
  if (n < 1) throw std::invalid_argument("enumerate_supports: n must be at least 1");
  // Grow all connected shapes level by level; holes are filtered at the end
  // because a simply connected shape may have only holed sub-shapes.
  std::set<std::vector<Cell>> level{{Cell{0, 0}}};
  for (int k = 2; k <= n; ++k) {
    std::set<std::vector<Cell>> next;
    for (const auto& shape : level) {
      std::set<Cell> occupied(shape.begin(), shape.end());
      for (const Cell& c : shape) {
        for (const Cell& nb : neighbors(c)) {
          if (occupied.count(nb)) continue;
          std::vector<Cell> grown = shape;
          grown.push_back(nb);
          next.insert(canonical_translation(std::move(grown)));
        }
      }
    }
    level = std::move(next);
  }
  std::set<std::vector<Cell>> kept;
  for (const auto& shape : level) {
    if (!is_simply_connected(Support(shape))) continue;
    kept.insert(up_to_symmetry ? canonical_symmetry(shape) : shape);
  }
  std::vector<Support> out;
  out.reserve(kept.size());
  for (const auto& shape : kept) out.emplace_back(shape);
  return out;
}

/// Grows a simply connected support one random frontier cell at a time.
inline Support random_support(int n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("random_support: n must be at least 1");
  std::mt19937_64 rng(seed);
  std::vector<Cell> cells{Cell{0, 0}};
  std::set<Cell> occupied{Cell{0, 0}};
  while (static_cast<int>(cells.size()) < n) {
    std::set<Cell> frontier_set;
    for (const Cell& c : cells)
      for (const Cell& nb : neighbors(c))
        if (!occupied.count(nb)) frontier_set.insert(nb);
    std::vector<Cell> frontier(frontier_set.begin(), frontier_set.end());
    std::shuffle(frontier.begin(), frontier.end(), rng);
    bool grown = false;
    for (const Cell& cand : frontier) {
      std::vector<Cell> trial = cells;
      trial.push_back(cand);
      if (!is_simply_connected(Support(trial))) continue;
      cells = std::move(trial);
      occupied.insert(cand);
      grown = true;
      break;
    }
    if (!grown) throw std::logic_error("random_support: no frontier cell keeps the shape simply connected");
  }
  return Support(cells);
}

// ---------------------------------------------------------------------------
// Port maps and registers

inline std::vector<PortMap> identity_portmaps(std::size_t n) { return std::vector<PortMap>(n, kIdentityPortMap); }

inline std::vector<PortMap> random_portmaps(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 11);
  std::vector<PortMap> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int k = pick(rng);
    out.push_back({k % kDegree, k < kDegree ? 1 : -1});
  }
  return out;
}

inline std::vector<PortMap> random_portmaps(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return random_portmaps(n, rng);
}

/// Conflict probability at which every particle-facing port is Out with
/// probability one half, independently per port.
inline constexpr double kUnbiasedConflictProbability = 0.25;

/// Arbitrary register contents. Each edge is out/out with probability
/// `conflict_prob`, otherwise uniformly one of in/in, out/in, in/out. Port
/// maps are drawn from the same generator unless supplied.
inline Configuration random_registers(const Support& s, std::uint64_t seed, double conflict_prob,
                                      std::optional<std::vector<PortMap>> portmaps = std::nullopt) {
  if (conflict_prob < 0.0 || conflict_prob > 1.0)
    throw std::invalid_argument("random_registers: conflict probability outside [0, 1]");
  std::mt19937_64 rng(seed);
  std::vector<PortMap> pm = portmaps ? *portmaps : random_portmaps(s.size(), rng);
  Configuration c = Configuration::all_in(std::make_shared<const Support>(s), std::move(pm));
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> three(0, 2);
  for (const auto& [u, v] : s.edges()) {
    const Dir d = direction_between(s.cell(u), s.cell(v));
    LinkState lu = LinkState::In, lv = LinkState::In;
    if (coin(rng) < conflict_prob) {
      lu = lv = LinkState::Out;
    } else {
      switch (three(rng)) {
        case 0: break;
        case 1: lu = LinkState::Out; break;
        default: lv = LinkState::Out; break;
      }
    }
    c.set_link(u, c.port_toward_dir(u, d), lu);
    c.set_link(v, c.port_toward_dir(v, opposite(d)), lv);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Erosion

namespace detail {

inline bool arc_is_consecutive(unsigned mask) {
  if (mask == 0 || mask == 0x3f) return mask != 0;
  int starts = 0;
  for (int d = 0; d < kDegree; ++d) starts += (mask & (1u << d)) && !(mask & (1u << mod6(d - 1)));
  return starts == 1;
}

inline bool remaining_connected(const Support& s, const std::vector<char>& alive, int removed) {
  int start = -1;
  std::size_t total = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!alive[i] || static_cast<int>(i) == removed) continue;
    ++total;
    if (start < 0) start = static_cast<int>(i);
  }
  if (total <= 1) return true;
  std::vector<char> seen(s.size(), 0);
  std::vector<int> stack{start};
  seen[static_cast<std::size_t>(start)] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v : s.neighbor_indices(u)) {
      if (v == Support::kEmpty || v == removed) continue;
      const auto vi = static_cast<std::size_t>(v);
      if (!alive[vi] || seen[vi]) continue;
      seen[vi] = 1;
      ++count;
      stack.push_back(v);
    }
  }
  return count == total;
}

}  // namespace detail

/// Order in which particles erode: repeatedly remove the smallest particle
/// with 1 to 3 remaining neighbours on consecutive sides whose removal keeps
/// the rest connected.
inline std::vector<Cell> erosion_order(const Support& s) {
  const std::size_t n = s.size();
  std::vector<char> alive(n, 1);
  std::vector<Cell> order;
  order.reserve(n);
  for (std::size_t left = n; left > 0; --left) {
    int pick = -1;
    for (std::size_t i = 0; i < n && pick < 0; ++i) {
      if (!alive[i]) continue;
      if (left == 1) {
        pick = static_cast<int>(i);
        break;
      }
      unsigned mask = 0;
      int count = 0;
      for (int d = 0; d < kDegree; ++d) {
        const int j = s.neighbor_index(static_cast<int>(i), d);
        if (j != Support::kEmpty && alive[static_cast<std::size_t>(j)]) {
          mask |= 1u << d;
          ++count;
        }
      }
      if (count < 1 || count > 3 || !detail::arc_is_consecutive(mask)) continue;
      if (!detail::remaining_connected(s, alive, static_cast<int>(i))) continue;
      pick = static_cast<int>(i);
    }
    if (pick < 0) throw std::logic_error("erosion_order: no erodible particle left");
    alive[static_cast<std::size_t>(pick)] = 0;
    order.push_back(s.cell(pick));
  }
  return order;
}

/// Every edge directed from the earlier-eroded particle to the later one.
inline Configuration erosion_orientation(const Support& s, std::vector<PortMap> portmaps = {}) {
  if (!is_simply_connected(s)) throw std::invalid_argument("erosion_orientation: support is not simply connected");
  const auto order = erosion_order(s);
  std::vector<int> rank(s.size());
  for (std::size_t k = 0; k < order.size(); ++k) rank[static_cast<std::size_t>(s.require_index(order[k]))] = static_cast<int>(k);
  Configuration c = Configuration::all_in(std::make_shared<const Support>(s), std::move(portmaps));
  for (const auto& [u, v] : s.edges()) {
    const int from = rank[static_cast<std::size_t>(u)] < rank[static_cast<std::size_t>(v)] ? u : v;
    const int to = from == u ? v : u;
    c.set_link(from, c.port_toward(from, to), LinkState::Out);
  }
  return c;
}

// ---------------------------------------------------------------------------
// Fixtures

inline Support hexagon(int k) {
  std::vector<Cell> cells;
  for (int q = -k; q <= k; ++q)
    for (int r = -k; r <= k; ++r)
      if (distance({q, r}, {0, 0}) <= k) cells.push_back({q, r});
  return Support(cells);
}

inline Support line(int n) {
  std::vector<Cell> cells;
  for (int i = 0; i < n; ++i) cells.push_back({i, 0});
  return Support(cells);
}

inline Support parallelogram(int w, int h) {
  std::vector<Cell> cells;
  for (int q = 0; q < w; ++q)
    for (int r = 0; r < h; ++r) cells.push_back({q, r});
  return Support(cells);
}

inline Support triangle3() { return Support({{0, 0}, {1, 0}, {0, 1}}); }

/// Four cells: two triangles sharing the edge (0,0)-(1,0).
inline Support rhombus() { return Support({{0, 0}, {1, 0}, {0, 1}, {1, -1}}); }

/// An 18-particle closed ring turning by 60 degrees at every particle.
/// Each particle reaches its predecessor through port 2 and its successor
/// through port 4, which forces mixed chiralities.
inline Configuration ring18() {
  std::vector<Cell> walk;
  std::vector<Dir> heading;
  Cell c{0, 0};
  Dir d = 0;
  const int turns[3] = {1, 1, -1};
  for (int k = 0; k < 18; ++k) {
    walk.push_back(c);
    heading.push_back(d);
    c = neighbor(c, d);
    d = mod6(d + turns[k % 3]);
  }
  auto support = std::make_shared<const Support>(walk);
  std::vector<PortMap> pm(walk.size());
  for (int k = 0; k < 18; ++k) {
    const Dir to_next = heading[static_cast<std::size_t>(k)];
    const Dir to_prev = opposite(heading[static_cast<std::size_t>((k + 17) % 18)]);
    const int chir = mod6(to_next - to_prev) == 2 ? 1 : -1;
    pm[static_cast<std::size_t>(support->require_index(walk[static_cast<std::size_t>(k)]))] =
        PortMap{mod6(to_prev - 2 * chir), chir};
  }
  return Configuration::all_in(support, std::move(pm));
}

/// hexagonK, lineN, parallelogramWxH, triangle3, rhombus, ring18.
inline Support named_support(const std::string& name) {
  std::smatch m;
  if (std::regex_match(name, m, std::regex(R"(hexagon(\d+))"))) return hexagon(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(line(\d+))")) && std::stoi(m[1]) >= 1) return line(std::stoi(m[1]));
  if (std::regex_match(name, m, std::regex(R"(parallelogram(\d+)x(\d+))")) && std::stoi(m[1]) >= 1 &&
      std::stoi(m[2]) >= 1)
    return parallelogram(std::stoi(m[1]), std::stoi(m[2]));
  if (name == "triangle3") return triangle3();
  if (name == "rhombus") return rhombus();
  if (name == "ring18") return ring18().support();
  throw std::invalid_argument("unknown shape '" + name + "'");
}

}  // namespace pmle

#endif  // PMLE_GENERATORS_HPP
