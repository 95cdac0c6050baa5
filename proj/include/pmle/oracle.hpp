#ifndef PMLE_ORACLE_HPP
#define PMLE_ORACLE_HPP

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>
#include <memory>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "pmle/algorithm.hpp"
#include "pmle/config.hpp"
#include "pmle/generators.hpp"
#include "pmle/rules.hpp"
#include "pmle/scheduler.hpp"

namespace pmle {

// ---------------------------------------------------------------------------
// Packed register states
//
// A register state of a support is the pair of link values on every edge,
// packed two bits per edge in canonical edge order: bit 2e is the smaller
// endpoint's link toward the larger (1 = Out), bit 2e+1 the other side.
// Port maps do not enter the packed form.

using PackedState = std::uint64_t;

/// Algorithm 1 evaluated directly on packed states in the global frame.
/// Independent of the port-based implementation; the two are compared in
/// tests.
class PackedSystem {
 public:
  explicit PackedSystem(std::shared_ptr<const Support> s) : s_(std::move(s)) {
    if (s_->edges().size() > 32) throw std::invalid_argument("PackedSystem: more than 32 edges");
    slot_.assign(s_->size(), {});
    for (std::size_t e = 0; e < s_->edges().size(); ++e) {
      const auto [u, v] = s_->edges()[e];
      const Dir d = direction_between(s_->cell(u), s_->cell(v));
      slot_[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)] = {static_cast<int>(2 * e), static_cast<int>(2 * e + 1)};
      slot_[static_cast<std::size_t>(v)][static_cast<std::size_t>(opposite(d))] = {static_cast<int>(2 * e + 1),
                                                                                  static_cast<int>(2 * e)};
    }
  }

  const Support& support() const noexcept { return *s_; }
  const std::shared_ptr<const Support>& support_ptr() const noexcept { return s_; }
  std::size_t edge_count() const noexcept { return s_->edges().size(); }

  bool out(PackedState x, int i, Dir d) const { return (x >> slot_[ui(i)][ui(d)].mine) & 1u; }
  bool in_from(PackedState x, int i, Dir d) const { return (x >> slot_[ui(i)][ui(d)].theirs) & 1u; }
  bool has(int i, Dir d) const { return s_->neighbor_index(i, d) != Support::kEmpty; }

  // +1: i -> j, -1: j -> i, 0: not directed (undirected or out/out)
  int sense(PackedState x, int i, Dir d) const {
    const bool a = out(x, i, d), b = in_from(x, i, d);
    return a == b ? 0 : (a ? 1 : -1);
  }

  bool r1(PackedState x, int i) const {
    for (Dir d = 0; d < kDegree; ++d)
      if (has(i, d) && sense(x, i, d) == 0) return false;
    return true;
  }

  bool r234(PackedState x, int i) const {
    unsigned mask = 0;
    int count = 0;
    for (Dir d = 0; d < kDegree; ++d) {
      if (has(i, d) && out(x, i, d)) {
        mask |= 1u << d;
        ++count;
      }
    }
    if (count > 3) return false;
    if (count > 0 && count < kDegree) {
      // one run: exactly one set bit whose clockwise neighbour is clear
      int runs = 0;
      for (Dir d = 0; d < kDegree; ++d) runs += ((mask >> d) & 1u) && !((mask >> mod6(d - 1)) & 1u);
      if (runs != 1) return false;
    }
    for (Dir d = 0; d < kDegree; ++d) {
      const Dir e = mod6(d + 1);
      if (!has(i, d) || !has(i, e)) continue;
      const int q = s_->neighbor_index(i, d);
      const Dir qr = mod6(d + 2);  // from the neighbour at d to the one at d+1
      const int a = sense(x, i, d), b = sense(x, q, qr), c = -sense(x, i, e);
      if (a != 0 && a == b && b == c) return false;
    }
    return true;
  }

  bool valid(PackedState x) const {
    for (int i = 0; i < static_cast<int>(s_->size()); ++i)
      if (!r1(x, i) || !r234(x, i)) return false;
    return true;
  }

  PackedState step(PackedState x, int i) const {
    PackedState y = x;
    auto put = [&](Dir d, bool v) {
      const int bit = slot_[ui(i)][ui(d)].mine;
      y = v ? (y | (PackedState{1} << bit)) : (y & ~(PackedState{1} << bit));
    };
    for (Dir d = 0; d < kDegree; ++d)
      if (has(i, d) && out(y, i, d) && in_from(y, i, d)) put(d, false);
    if (!r1(y, i))
      for (Dir d = 0; d < kDegree; ++d)
        if (has(i, d) && !out(y, i, d) && !in_from(y, i, d)) put(d, true);
    if (!r234(y, i))
      for (Dir d = 0; d < kDegree; ++d)
        if (has(i, d)) put(d, false);
    return y;
  }

  bool activable(PackedState x, int i) const { return step(x, i) != x; }

  bool final(PackedState x) const {
    for (int i = 0; i < static_cast<int>(s_->size()); ++i)
      if (activable(x, i)) return false;
    return true;
  }

  bool has_conflict(PackedState x) const {
    for (std::size_t e = 0; e < edge_count(); ++e)
      if (((x >> (2 * e)) & 3u) == 3u) return true;
    return false;
  }

  PackedState encode(const Configuration& c) const {
    PackedState x = 0;
    for (std::size_t e = 0; e < edge_count(); ++e) {
      const auto [u, v] = s_->edges()[e];
      const Dir d = direction_between(s_->cell(u), s_->cell(v));
      if (c.link_toward_dir(u, d) == LinkState::Out) x |= PackedState{1} << (2 * e);
      if (c.link_toward_dir(v, opposite(d)) == LinkState::Out) x |= PackedState{1} << (2 * e + 1);
    }
    return x;
  }

  Configuration decode(PackedState x, const std::vector<PortMap>& portmaps) const {
    Configuration c = Configuration::all_in(s_, portmaps.empty() ? identity_portmaps(s_->size()) : portmaps);
    for (std::size_t e = 0; e < edge_count(); ++e) {
      const auto [u, v] = s_->edges()[e];
      const Dir d = direction_between(s_->cell(u), s_->cell(v));
      if ((x >> (2 * e)) & 1u) c.set_link(u, c.port_toward_dir(u, d), LinkState::Out);
      if ((x >> (2 * e + 1)) & 1u) c.set_link(v, c.port_toward_dir(v, opposite(d)), LinkState::Out);
    }
    return c;
  }

 private:
  static std::size_t ui(int v) { return static_cast<std::size_t>(v); }
  struct Slot {
    int mine = 0;
    int theirs = 0;
  };
  std::shared_ptr<const Support> s_;
  std::vector<std::array<Slot, kDegree>> slot_;
};

/// Which register states a configuration graph ranges over.
enum class StateSpace {
  Full,          // 4 states per edge, out/out included
  ConflictFree,  // 3 states per edge
};

/// Dense numbering of the states of a StateSpace.
class StateIndex {
 public:
  StateIndex(std::size_t edges, StateSpace space) : edges_(edges), space_(space) {
    const std::uint64_t base = space == StateSpace::Full ? 4 : 3;
    count_ = 1;
    for (std::size_t e = 0; e < edges; ++e) {
      if (count_ > std::numeric_limits<std::uint64_t>::max() / base) throw std::overflow_error("state space too large");
      count_ *= base;
    }
  }
  std::uint64_t count() const noexcept { return count_; }

  PackedState state(std::uint64_t id) const {
    if (space_ == StateSpace::Full) return id;
    PackedState x = 0;
    for (std::size_t e = 0; e < edges_; ++e, id /= 3) x |= PackedState{id % 3} << (2 * e);  // 0, 1, 2 = in/in, out/in, in/out
    return x;
  }
  std::uint64_t id(PackedState x) const {
    if (space_ == StateSpace::Full) return x;
    std::uint64_t id = 0;
    for (std::size_t e = edges_; e-- > 0;) {
      const std::uint64_t code = (x >> (2 * e)) & 3u;
      if (code == 3) throw std::invalid_argument("StateIndex: out/out edge in conflict-free space");
      id = id * 3 + code;
    }
    return id;
  }

 private:
  std::size_t edges_;
  StateSpace space_;
  std::uint64_t count_ = 1;
};

/// Successor relation source for configuration graphs.
enum class Engine {
  Packed,     // PackedSystem::step
  Reference,  // compute_activation on decoded configurations
};

/// Sequential successors of one packed state: one per activable particle.
class Successors {
 public:
  Successors(const PackedSystem& sys, Engine engine, std::vector<PortMap> portmaps)
      : sys_(sys), engine_(engine), portmaps_(std::move(portmaps)) {
    if (portmaps_.empty()) portmaps_ = identity_portmaps(sys.support().size());
  }

  /// (particle, next state) for every activable particle, in particle order.
  std::vector<std::pair<int, PackedState>> of(PackedState x) const {
    std::vector<std::pair<int, PackedState>> out;
    const int n = static_cast<int>(sys_.support().size());
    if (engine_ == Engine::Packed) {
      for (int i = 0; i < n; ++i) {
        const PackedState y = sys_.step(x, i);
        if (y != x) out.emplace_back(i, y);
      }
      return out;
    }
    const Configuration c = sys_.decode(x, portmaps_);
    for (int i = 0; i < n; ++i) {
      const ActivationResult res = compute_activation(c, i);
      if (!res.effect.changed) continue;
      Configuration next = c;
      next.set_registers(i, res.next);
      out.emplace_back(i, sys_.encode(next));
    }
    return out;
  }

  const std::vector<PortMap>& portmaps() const noexcept { return portmaps_; }

 private:
  const PackedSystem& sys_;
  Engine engine_;
  std::vector<PortMap> portmaps_;
};

/// Line-delimited dump of the sequential configuration graph:
///
///   node <id> <valid 0|1> <final 0|1>
///   edge <from> <to> <q> <r>
///
/// with ids from StateIndex and (q, r) the activated particle.
inline void dump_graph(const Support& support, std::ostream& out, StateSpace space = StateSpace::Full) {
  auto s = std::make_shared<const Support>(support);
  PackedSystem sys(s);
  const StateIndex index(sys.edge_count(), space);
  const Successors succ(sys, Engine::Packed, {});
  for (std::uint64_t id = 0; id < index.count(); ++id) {
    const PackedState x = index.state(id);
    const auto next = succ.of(x);
    out << "node " << id << ' ' << int(sys.valid(x)) << ' ' << int(next.empty()) << '\n';
    for (const auto& [p, y] : next)
      out << "edge " << id << ' ' << index.id(y) << ' ' << s->cell(p).q << ' ' << s->cell(p).r << '\n';
  }
}

// ---------------------------------------------------------------------------
// Unique sink on every valid all-directed orientation

struct Theorem1Report {
  std::uint64_t orientations = 0;
  std::uint64_t valid = 0;
  int min_sinks = std::numeric_limits<int>::max();
  int max_sinks = 0;
  std::vector<Configuration> counterexamples;
  bool ok() const { return counterexamples.empty(); }
};

inline Theorem1Report check_theorem1(const Support& support, std::vector<PortMap> portmaps = {}) {
  auto s = std::make_shared<const Support>(support);
  PackedSystem sys(s);
  if (sys.edge_count() > 24) throw std::invalid_argument("check_theorem1: too many edges to enumerate");
  if (portmaps.empty()) portmaps = identity_portmaps(s->size());
  Theorem1Report rep;
  const std::uint64_t total = std::uint64_t{1} << sys.edge_count();
  for (std::uint64_t bits = 0; bits < total; ++bits) {
    PackedState x = 0;
    for (std::size_t e = 0; e < sys.edge_count(); ++e) x |= PackedState{1} << (2 * e + ((bits >> e) & 1u));
    const Configuration c = sys.decode(x, portmaps);
    ++rep.orientations;
    if (!is_valid(c)) continue;
    ++rep.valid;
    const int k = static_cast<int>(sinks(c).size());
    rep.min_sinks = std::min(rep.min_sinks, k);
    rep.max_sinks = std::max(rep.max_sinks, k);
    if (k != 1) rep.counterexamples.push_back(c);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Silence: final <=> valid over every register state

struct SilenceReport {
  std::uint64_t states = 0;
  std::uint64_t valid = 0;
  std::uint64_t final = 0;
  std::vector<Configuration> counterexamples;
  bool ok() const { return counterexamples.empty(); }
};

inline SilenceReport check_silence(const Support& support, std::vector<PortMap> portmaps = {}) {
  auto s = std::make_shared<const Support>(support);
  PackedSystem sys(s);
  if (sys.edge_count() > 12) throw std::invalid_argument("check_silence: too many edges to enumerate");
  if (portmaps.empty()) portmaps = identity_portmaps(s->size());
  SilenceReport rep;
  const StateIndex index(sys.edge_count(), StateSpace::Full);
  for (std::uint64_t id = 0; id < index.count(); ++id) {
    const Configuration c = sys.decode(index.state(id), portmaps);
    ++rep.states;
    const bool v = is_valid(c);
    const bool f = detect_final(c);
    rep.valid += v;
    rep.final += f;
    if (v != f) rep.counterexamples.push_back(c);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Reachability of a valid final state in the sequential configuration graph

struct ReachabilityReport {
  std::uint64_t states = 0;
  std::uint64_t transitions = 0;
  std::uint64_t valid_final = 0;
  std::uint64_t can_reach = 0;
  std::vector<Configuration> unreachable;  // witnesses, at most a few
  bool ok() const { return can_reach == states; }
};

inline ReachabilityReport check_reachability(const Support& support, Engine engine = Engine::Reference,
                                             std::vector<PortMap> portmaps = {},
                                             StateSpace space = StateSpace::Full) {
  auto s = std::make_shared<const Support>(support);
  PackedSystem sys(s);
  const StateIndex index(sys.edge_count(), space);
  if (index.count() > (std::uint64_t{1} << 26)) throw std::invalid_argument("check_reachability: graph too large");
  const Successors succ(sys, engine, std::move(portmaps));
  const std::size_t count = static_cast<std::size_t>(index.count());

  // Reverse adjacency in CSR form.
  std::vector<std::uint32_t> src, dst;
  std::vector<char> good(count, 0);
  ReachabilityReport rep;
  rep.states = index.count();
  for (std::uint64_t id = 0; id < index.count(); ++id) {
    const PackedState x = index.state(id);
    const auto next = succ.of(x);
    if (next.empty()) {
      if (sys.valid(x)) {
        good[id] = 1;
        ++rep.valid_final;
      }
      continue;
    }
    for (const auto& [p, y] : next) {
      src.push_back(static_cast<std::uint32_t>(id));
      dst.push_back(static_cast<std::uint32_t>(index.id(y)));
    }
  }
  rep.transitions = src.size();
  std::vector<std::uint32_t> start(count + 1, 0), pred(src.size());
  for (std::uint32_t d : dst) ++start[d + 1];
  for (std::size_t i = 0; i < count; ++i) start[i + 1] += start[i];
  {
    std::vector<std::uint32_t> fill(start.begin(), start.end() - 1);
    for (std::size_t k = 0; k < src.size(); ++k) pred[fill[dst[k]]++] = src[k];
  }
  std::deque<std::uint32_t> queue;
  for (std::size_t i = 0; i < count; ++i)
    if (good[i]) queue.push_back(static_cast<std::uint32_t>(i));
  while (!queue.empty()) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    for (std::uint32_t k = start[v]; k < start[v + 1]; ++k) {
      if (good[pred[k]]) continue;
      good[pred[k]] = 1;
      queue.push_back(pred[k]);
    }
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (good[i]) {
      ++rep.can_reach;
    } else if (rep.unreachable.size() < 4) {
      rep.unreachable.push_back(sys.decode(index.state(i), succ.portmaps()));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Unfair periodic executions

struct UnfairCycle {
  Configuration initial;
  std::vector<Cell> script;  // one period; every entry activable when applied
};

/// A cycle of the sequential configuration graph that avoids valid states,
/// found by Tarjan's algorithm, with the shortest loop through one of its
/// states. Empty when the graph on `space` is acyclic.
inline std::optional<UnfairCycle> find_unfair_cycle(const Support& support,
                                                    StateSpace space = StateSpace::ConflictFree,
                                                    std::vector<PortMap> portmaps = {}) {
  auto s = std::make_shared<const Support>(support);
  PackedSystem sys(s);
  const StateIndex index(sys.edge_count(), space);
  if (index.count() > (std::uint64_t{1} << 28)) throw std::invalid_argument("find_unfair_cycle: graph too large");
  if (portmaps.empty()) portmaps = identity_portmaps(s->size());
  const std::size_t count = static_cast<std::size_t>(index.count());
  const int n = static_cast<int>(s->size());

  constexpr std::uint32_t kUnseen = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> order(count, kUnseen), low(count, 0);
  std::vector<char> on_stack(count, 0);
  std::vector<std::uint32_t> stack;
  struct Frame {
    std::uint32_t v;
    int next_particle;
  };
  std::vector<Frame> frames;
  std::uint32_t timer = 0;
  std::optional<std::uint32_t> found;  // a state inside a nontrivial SCC
  std::vector<char> in_found_scc;

  for (std::size_t root = 0; root < count && !found; ++root) {
    if (order[root] != kUnseen) continue;
    frames.push_back({static_cast<std::uint32_t>(root), 0});
    order[root] = low[root] = timer++;
    stack.push_back(static_cast<std::uint32_t>(root));
    on_stack[root] = 1;
    while (!frames.empty() && !found) {
      Frame& f = frames.back();
      const PackedState x = index.state(f.v);
      if (f.next_particle < n) {
        const int i = f.next_particle++;
        const PackedState y = sys.step(x, i);
        if (y == x) continue;
        const auto w = static_cast<std::uint32_t>(index.id(y));
        if (order[w] == kUnseen) {
          order[w] = low[w] = timer++;
          stack.push_back(w);
          on_stack[w] = 1;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          low[f.v] = std::min(low[f.v], order[w]);
        }
        continue;
      }
      const std::uint32_t v = f.v;
      frames.pop_back();
      if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
      if (low[v] != order[v]) continue;
      std::vector<std::uint32_t> scc;
      std::uint32_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        scc.push_back(w);
      } while (w != v);
      if (scc.size() > 1) {
        in_found_scc.assign(count, 0);
        for (std::uint32_t u : scc) in_found_scc[u] = 1;
        found = *std::min_element(scc.begin(), scc.end());
      }
    }
  }
  if (!found) return std::nullopt;

  // Shortest loop through `found`, staying inside its SCC.
  const std::uint32_t origin = *found;
  std::vector<std::uint32_t> parent(count, kUnseen);
  std::vector<int> via(count, -1);
  std::deque<std::uint32_t> queue{origin};
  std::optional<std::pair<std::uint32_t, int>> closing;
  while (!queue.empty() && !closing) {
    const std::uint32_t v = queue.front();
    queue.pop_front();
    const PackedState x = index.state(v);
    for (int i = 0; i < n; ++i) {
      const PackedState y = sys.step(x, i);
      if (y == x) continue;
      const auto w = static_cast<std::uint32_t>(index.id(y));
      if (!in_found_scc[w]) continue;
      if (w == origin) {
        closing = std::make_pair(v, i);
        break;
      }
      if (parent[w] != kUnseen) continue;
      parent[w] = v;
      via[w] = i;
      queue.push_back(w);
    }
  }
  if (!closing) throw std::logic_error("find_unfair_cycle: SCC without a loop through its root");
  std::vector<Cell> script{s->cell(closing->second)};
  for (std::uint32_t v = closing->first; v != origin; v = parent[v]) script.push_back(s->cell(via[v]));
  std::reverse(script.begin(), script.end());
  return UnfairCycle{sys.decode(index.state(origin), portmaps), std::move(script)};
}

struct UnfairSearchResult {
  int n = 0;
  std::size_t supports_tried = 0;
  std::optional<UnfairCycle> cycle;
};

/// Smallest support (by size, then canonical order up to symmetry) with an
/// unfair cycle, trying sizes 2..max_n.
inline UnfairSearchResult search_unfair(int max_n, StateSpace space = StateSpace::ConflictFree,
                                        std::uint64_t max_states = std::uint64_t{1} << 24) {
  UnfairSearchResult res;
  for (int n = 2; n <= max_n; ++n) {
    for (const Support& s : enumerate_supports(n, true)) {
      const StateIndex index(s.edges().size(), space);
      if (index.count() > max_states) continue;
      ++res.supports_tried;
      if (auto cyc = find_unfair_cycle(s, space)) {
        res.n = n;
        res.cycle = std::move(cyc);
        return res;
      }
    }
  }
  return res;
}

}  // namespace pmle

#endif  // PMLE_ORACLE_HPP
