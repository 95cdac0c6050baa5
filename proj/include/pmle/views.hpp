#ifndef PMLE_VIEWS_HPP
#define PMLE_VIEWS_HPP

#include <optional>
#include <set>
#include <string>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pmle/config.hpp"
#include "pmle/rules.hpp"

namespace pmle {

/// Port labels along a walk: (exit port at step i, entry port at step i+1).
using PathLabel = std::vector<std::pair<int, int>>;

/// The labels of all nonempty walks of length at most k from `owner`.
struct View {
  Cell owner{};
  int k = 0;
  std::set<PathLabel> labels;

  bool contains(const PathLabel& l) const { return labels.count(l) != 0; }
};

inline View build_view(const Configuration& c, int p, int k) {
  if (k < 1) throw std::invalid_argument("build_view: depth must be at least 1");
  View v{c.support().cell(p), k, {}};
  PathLabel label;
  auto walk = [&](auto&& self, int u) -> void {
    if (static_cast<int>(label.size()) == k) return;
    for (int port = 0; port < kDegree; ++port) {
      const int w = c.neighbor_at_port(u, port);
      if (w == Support::kEmpty) continue;
      label.emplace_back(port, c.port_toward(w, u));
      v.labels.insert(label);
      self(self, w);
      label.pop_back();
    }
  };
  walk(walk, p);
  return v;
}

namespace detail {

// Entry port of the unique one-step label starting with `port`.
inline std::optional<int> entry_port(const View& v, int port) {
  auto it = v.labels.lower_bound(PathLabel{{port, 0}});
  if (it == v.labels.end() || it->size() != 1 || it->front().first != port) return std::nullopt;
  return it->front().second;
}

}  // namespace detail

/// Labels of the edge q-r of triangle p q r: (q's port toward r, r's port
/// toward q), inferred by p from view_3(p) and the ports it uses for q and r.
///
/// Each of the four candidates allowed by consecutiveness at q and r is
/// tested with the membership formula below; exactly one must pass.
inline std::pair<int, int> infer_triangle_labels(const View& view, int port_to_q, int port_to_r) {
  const int p1 = mod6(port_to_q);
  const int p0 = mod6(port_to_r);
  const int step_p = mod6(p1 - p0);
  if (step_p != 1 && step_p != kDegree - 1)
    throw std::invalid_argument("infer_triangle_labels: ports toward q and r are not consecutive");
  const int p2 = mod6(p1 + (p1 - p0));
  const auto q1_opt = detail::entry_port(view, p1);
  const auto r1_opt = detail::entry_port(view, p0);
  if (!q1_opt || !r1_opt) throw std::invalid_argument("infer_triangle_labels: q or r missing from the view");
  const int q1 = *q1_opt;
  const int r1 = *r1_opt;

  std::vector<std::pair<int, int>> hits;
  for (int dq : {1, -1}) {
    for (int dr : {1, -1}) {
      // Name the candidate (q2, r0) and derive the other labels from it.
      const int q2 = mod6(q1 + dq);
      const int q0 = mod6(q1 - dq);
      const int r0 = mod6(r1 + dr);
      const int r2 = mod6(r1 - dr);
      const int step_r = mod6(r1 - r0);
      const int r5 = mod6(r0 - step_r);
      const bool around = view.contains({{p1, q1}, {q2, r0}, {r1, p0}});
      const bool around_back = view.contains({{p0, r1}, {r0, q2}, {q1, p1}});
      const bool other_side = view.contains({{p1, q1}, {q0, r2}}) && view.contains({{p2, r5}});
      if (around && around_back && !other_side) hits.emplace_back(q2, r0);
    }
  }
  if (hits.size() != 1)
    throw std::logic_error("infer_triangle_labels: " + std::to_string(hits.size()) + " candidate labellings fit the view");
  return hits.front();
}

inline std::pair<int, int> infer_triangle_labels(const Configuration& c, int p, int q, int r) {
  const Support& s = c.support();
  if (!adjacent(s.cell(p), s.cell(q)) || !adjacent(s.cell(p), s.cell(r)) || !adjacent(s.cell(q), s.cell(r)))
    throw std::invalid_argument("infer_triangle_labels: p, q, r are not a triangle");
  return infer_triangle_labels(build_view(c, p, 3), c.port_toward(p, q), c.port_toward(p, r));
}

inline std::pair<int, int> infer_triangle_labels(const Configuration& c, const Cell& p, const Cell& q, const Cell& r) {
  const Support& s = c.support();
  return infer_triangle_labels(c, s.require_index(p), s.require_index(q), s.require_index(r));
}

/// Whether q numbers its ports in the same rotational sense as p, as
/// inferred by p through the triangle p q r.
inline bool infer_same_chirality(const Configuration& c, int p, int q, int r) {
  const View v = build_view(c, p, 3);
  const int p1 = c.port_toward(p, q);
  const int p0 = c.port_toward(p, r);
  const int q1 = *detail::entry_port(v, p1);
  const int q_to_r = infer_triangle_labels(v, p1, p0).first;
  // Around p the turn q -> r is the mirror of the turn p -> r around q.
  return mod6(p0 - p1) == mod6(q1 - q_to_r);
}

/// The Neighbourhood of p assembled from view_3(p) and neighbours'
/// registers only, with no access to the global frame.
inline Neighbourhood local_neighbourhood(const Configuration& c, int p) {
  const View v = build_view(c, p, 3);
  Neighbourhood nb{};
  std::array<int, kDegree> who{};
  std::array<int, kDegree> their_port{};
  for (int port = 0; port < kDegree; ++port) {
    who[port] = c.neighbor_at_port(p, port);
    nb.occupied[port] = who[port] != Support::kEmpty;
    if (!nb.occupied[port]) {
      nb.toward_me[port] = LinkState::In;
      continue;
    }
    their_port[port] = *detail::entry_port(v, port);
    nb.toward_me[port] = c.link(who[port], their_port[port]);
  }
  for (int port = 0; port < kDegree; ++port) {
    const int nxt = mod6(port + 1);
    if (!nb.occupied[port] || !nb.occupied[nxt]) continue;
    const auto [q_to_r, r_to_q] = infer_triangle_labels(v, port, nxt);
    nb.fwd[port] = c.link(who[port], q_to_r);
    nb.back[port] = c.link(who[nxt], r_to_q);
  }
  return nb;
}

inline bool local_check_r4(const Configuration& c, int p) { return rule::r4(c.registers(p), local_neighbourhood(c, p)); }

inline bool local_check_r4(const Configuration& c, const Cell& p) {
  return local_check_r4(c, c.support().require_index(p));
}

}  // namespace pmle

#endif  // PMLE_VIEWS_HPP
