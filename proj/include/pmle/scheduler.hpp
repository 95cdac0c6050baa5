#ifndef PMLE_SCHEDULER_HPP
#define PMLE_SCHEDULER_HPP

#include <cstdint>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pmle/algorithm.hpp"
#include "pmle/config.hpp"
#include "pmle/rules.hpp"

namespace pmle {

// ---------------------------------------------------------------------------
// Scheduling policies

/// Uniform choice among activable particles; sequential Gouda fair.
struct RandomSequential {
  std::uint64_t seed = 0;
};
/// Cell order, cyclically, skipping particles that are not activable.
struct RoundRobin {};
/// The listed cells, cyclically. A listed particle that is not activable
/// still consumes an event, as a no-op.
struct Scripted {
  std::vector<Cell> script;
};
/// Each activable particle joins the step with probability `inclusion`;
/// all members act on the same pre-state.
struct ConcurrentRandomSet {
  std::uint64_t seed = 0;
  double inclusion = 0.5;
};

using SchedulerKind = std::variant<RandomSequential, RoundRobin, Scripted, ConcurrentRandomSet>;

inline std::string scheduler_name(const SchedulerKind& k) {
  switch (k.index()) {
    case 0: return "random";
    case 1: return "roundrobin";
    case 2: return "script";
    default: return "concurrent";
  }
}

inline std::uint64_t scheduler_seed(const SchedulerKind& k) {
  if (auto* r = std::get_if<RandomSequential>(&k)) return r->seed;
  if (auto* c = std::get_if<ConcurrentRandomSet>(&k)) return c->seed;
  return 0;
}

inline constexpr std::int64_t kDefaultStepCap = 1'000'000;

// ---------------------------------------------------------------------------
// Traces

struct TraceEvent {
  std::int64_t step = 0;
  Cell activated{};
  ActivationEffect effect{};
  int post_violation_count = 0;  // particles violating R2, R3 or R4 afterwards
  bool activated_satisfies_r234 = true;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on_start(const Configuration& /*c0*/, const SchedulerKind& /*kind*/, std::int64_t /*cap*/) {}
  virtual void on_event(const TraceEvent& e) = 0;
};

/// Keeps every event in memory.
class MemoryTrace : public TraceSink {
 public:
  void on_event(const TraceEvent& e) override { events.push_back(e); }
  std::vector<TraceEvent> events;
};

/// FNV-1a over the shape file text of the support.
inline std::uint64_t shape_hash(const Support& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : format_shape(s)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

/// Line-delimited trace log:
///
///   # shape=<hash> scheduler=<kind> seed=<S> cap=<N>
///   step q r line1 line2 changed violations
///
/// Concurrent steps emit one line per member, all with the same step.
class TextTraceWriter : public TraceSink {
 public:
  explicit TextTraceWriter(std::ostream& os) : os_(os) {}
  void on_start(const Configuration& c0, const SchedulerKind& kind, std::int64_t cap) override {
    os_ << "# shape=" << hex64(shape_hash(c0.support())) << " scheduler=" << scheduler_name(kind)
        << " seed=" << scheduler_seed(kind) << " cap=" << cap << '\n';
  }
  void on_event(const TraceEvent& e) override {
    os_ << e.step << ' ' << e.activated.q << ' ' << e.activated.r << ' ' << int(e.effect.line1_fired) << ' '
        << int(e.effect.line2_fired) << ' ' << int(e.effect.changed) << ' ' << e.post_violation_count << '\n';
  }

 private:
  std::ostream& os_;
};

struct TraceHeader {
  std::string shape;
  std::string scheduler;
  std::uint64_t seed = 0;
  std::int64_t cap = 0;
};

struct TraceRecord {
  std::int64_t step = 0;
  Cell activated{};
  bool line1 = false, line2 = false, changed = false;
  int violations = 0;
};

struct TraceLog {
  TraceHeader header;
  std::vector<TraceRecord> records;
};

inline TraceLog read_trace(std::istream& in) {
  TraceLog log;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (have_header) continue;
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw ParseError(lineno, "malformed trace header field '" + tok + "'");
        const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
        if (key == "shape") log.header.shape = val;
        else if (key == "scheduler") log.header.scheduler = val;
        else if (key == "seed") log.header.seed = std::stoull(val);
        else if (key == "cap") log.header.cap = std::stoll(val);
      }
      have_header = true;
      continue;
    }
    std::istringstream ls(line);
    TraceRecord r;
    int l1 = 0, l2 = 0, ch = 0;
    if (!(ls >> r.step >> r.activated.q >> r.activated.r >> l1 >> l2 >> ch >> r.violations))
      throw ParseError(lineno, "expected 'step q r line1 line2 changed violations'");
    r.line1 = l1 != 0;
    r.line2 = l2 != 0;
    r.changed = ch != 0;
    log.records.push_back(r);
  }
  if (!have_header) throw ParseError(lineno, "trace has no header line");
  return log;
}

// ---------------------------------------------------------------------------
// Driver

struct ExecutionResult {
  enum class Outcome { Final, CapExceeded };
  Outcome outcome = Outcome::Final;
  Configuration configuration;
  std::int64_t steps = 0;

  bool final() const { return outcome == Outcome::Final; }
};

inline bool detect_final(const Configuration& c, R4Route route = R4Route::Omniscient) {
  for (int i = 0; i < static_cast<int>(c.size()); ++i)
    if (is_activable(c, i, route)) return false;
  return true;
}

namespace detail {

// Activable particles as a swap-remove list with positions.
class ActivableSet {
 public:
  explicit ActivableSet(std::size_t n) : pos_(n, -1) {}
  void set(int i, bool on) {
    const auto ui = static_cast<std::size_t>(i);
    if (on && pos_[ui] < 0) {
      pos_[ui] = static_cast<int>(items_.size());
      items_.push_back(i);
    } else if (!on && pos_[ui] >= 0) {
      const int last = items_.back();
      items_[static_cast<std::size_t>(pos_[ui])] = last;
      pos_[static_cast<std::size_t>(last)] = pos_[ui];
      items_.pop_back();
      pos_[ui] = -1;
    }
  }
  bool contains(int i) const { return pos_[static_cast<std::size_t>(i)] >= 0; }
  bool empty() const { return items_.empty(); }
  std::size_t size() const { return items_.size(); }
  int at(std::size_t k) const { return items_[k]; }

 private:
  std::vector<int> items_;
  std::vector<int> pos_;
};

}  // namespace detail

/// Runs c0 under `kind` until no particle is activable or `max_steps`
/// events have happened.
inline ExecutionResult run(const Configuration& c0, const SchedulerKind& kind, std::int64_t max_steps,
                           TraceSink* sink = nullptr, R4Route route = R4Route::Omniscient) {
  if (max_steps < 0) throw std::invalid_argument("run: negative step cap");
  Configuration c = c0;
  const Support& s = c.support();
  const int n = static_cast<int>(c.size());
  detail::ActivableSet activable(c.size());
  std::vector<char> violating(c.size(), 0);
  int violations = 0;
  for (int i = 0; i < n; ++i) {
    activable.set(i, is_activable(c, i, route));
    violating[static_cast<std::size_t>(i)] = violates_r234(c, i);
    violations += violating[static_cast<std::size_t>(i)];
  }
  auto refresh = [&](int p) {
    auto touch = [&](int i) {
      activable.set(i, is_activable(c, i, route));
      const char v = violates_r234(c, i);
      violations += v - violating[static_cast<std::size_t>(i)];
      violating[static_cast<std::size_t>(i)] = v;
    };
    touch(p);
    for (int j : s.neighbor_indices(p))
      if (j != Support::kEmpty) touch(j);
  };

  std::vector<int> script;
  if (auto* sc = std::get_if<Scripted>(&kind)) {
    if (sc->script.empty()) throw std::invalid_argument("run: empty script");
    for (const Cell& cell : sc->script) script.push_back(s.require_index(cell));
  }
  std::mt19937_64 rng(scheduler_seed(kind));
  std::size_t rr_next = 0;

  if (sink) sink->on_start(c0, kind, max_steps);
  std::int64_t steps = 0;
  while (true) {
    if (activable.empty()) return {ExecutionResult::Outcome::Final, std::move(c), steps};
    if (steps >= max_steps) return {ExecutionResult::Outcome::CapExceeded, std::move(c), steps};

    std::vector<int> chosen;
    switch (kind.index()) {
      case 0: {
        std::uniform_int_distribution<std::size_t> pick(0, activable.size() - 1);
        chosen.push_back(activable.at(pick(rng)));
        break;
      }
      case 1: {
        for (int k = 0; k < n; ++k) {
          const int i = static_cast<int>((rr_next + static_cast<std::size_t>(k)) % static_cast<std::size_t>(n));
          if (activable.contains(i)) {
            chosen.push_back(i);
            rr_next = static_cast<std::size_t>(i + 1);
            break;
          }
        }
        break;
      }
      case 2:
        chosen.push_back(script[static_cast<std::size_t>(steps % static_cast<std::int64_t>(script.size()))]);
        break;
      default: {
        const double inclusion = std::get<ConcurrentRandomSet>(kind).inclusion;
        std::bernoulli_distribution join(inclusion);
        for (int i = 0; i < n; ++i)
          if (activable.contains(i) && join(rng)) chosen.push_back(i);
        if (chosen.empty()) {
          std::uniform_int_distribution<std::size_t> pick(0, activable.size() - 1);
          chosen.push_back(activable.at(pick(rng)));
        }
        break;
      }
    }

    std::vector<ActivationEffect> effects;
    if (chosen.size() == 1) {
      effects.push_back(activate(c, chosen.front(), route));
    } else {
      effects = activate_concurrently(c, chosen, route);
    }
    for (int p : chosen) refresh(p);
    if (sink) {
      for (std::size_t k = 0; k < chosen.size(); ++k) {
        TraceEvent e;
        e.step = steps;
        e.activated = s.cell(chosen[k]);
        e.effect = effects[k];
        e.post_violation_count = violations;
        e.activated_satisfies_r234 = !violating[static_cast<std::size_t>(chosen[k])];
        sink->on_event(e);
      }
    }
    ++steps;
  }
}

/// The configuration after the first `frames` steps of a recorded trace.
inline Configuration replay(const Configuration& c0, const std::vector<TraceRecord>& records, std::int64_t frames,
                            R4Route route = R4Route::Omniscient) {
  Configuration c = c0;
  std::size_t k = 0;
  while (k < records.size() && records[k].step < frames) {
    std::vector<int> group;
    const std::int64_t step = records[k].step;
    while (k < records.size() && records[k].step == step) group.push_back(c.support().require_index(records[k++].activated));
    if (group.size() == 1) {
      activate(c, group.front(), route);
    } else {
      activate_concurrently(c, group, route);
    }
  }
  return c;
}

// ---------------------------------------------------------------------------
// Periodic windows

/// C_0 .. C_L with C_L == C_0, and the particle activated before each C_{i+1}.
struct CycleWindow {
  std::vector<Configuration> configs;
  std::vector<Cell> activated;
};

/// Applies one period of `script` to c0, collecting every configuration.
inline CycleWindow window_from_script(const Configuration& c0, const std::vector<Cell>& script) {
  CycleWindow w;
  w.configs.push_back(c0);
  Configuration c = c0;
  for (const Cell& cell : script) {
    activate(c, c.support().require_index(cell));
    w.configs.push_back(c);
    w.activated.push_back(cell);
  }
  return w;
}

struct EdgeStability {
  Cell a{}, b{};
  bool stable = false;
  EdgeOrientation orientation = EdgeOrientation::Undirected;  // constant value when stable
};

struct ParticleStability {
  Cell cell{};
  std::vector<Dir> unstable_dirs;  // global directions of incident unstable edges
  bool has_stable_outgoing = false;
  bool ever_activable = false;
  bool ever_activated = false;
  bool lemma5_ok = true;  // stable outgoing edge => never activated, all incident edges stable
  bool lemma6_ok = true;  // unstable edges: >= 4, or >= 2 not on consecutive sides
};

struct CycleReport {
  std::size_t period = 0;
  std::vector<EdgeStability> edges;
  std::vector<ParticleStability> particles;
  bool lemma5_holds = true;
  bool lemma6_holds = true;
  bool reaches_valid = false;
};

inline CycleReport analyze_cycle(const CycleWindow& w) {
  if (w.configs.size() < 2) throw std::invalid_argument("analyze_cycle: window needs at least one step");
  if (!(w.configs.front() == w.configs.back()))
    throw std::invalid_argument("analyze_cycle: window is not periodic (last configuration differs from first)");
  if (!w.activated.empty()) {
    if (w.activated.size() + 1 != w.configs.size())
      throw std::invalid_argument("analyze_cycle: activation list does not match window length");
    for (std::size_t i = 0; i < w.activated.size(); ++i) {
      const auto [next, effect] = activation_step(w.configs[i], w.activated[i]);
      if (!(next == w.configs[i + 1])) throw std::invalid_argument("analyze_cycle: window is not an execution");
    }
  }
  const std::vector<Configuration> period(w.configs.begin(), w.configs.end() - 1);
  const Support& s = period.front().support();
  CycleReport rep;
  rep.period = period.size();

  std::vector<std::vector<char>> stable_dir(s.size(), std::vector<char>(kDegree, 1));
  for (const auto& [u, v] : s.edges()) {
    EdgeStability e{s.cell(u), s.cell(v), true, orientation(period.front(), u, v)};
    for (const Configuration& c : period)
      if (orientation(c, u, v) == EdgeOrientation::Undirected) e.stable = false;
    // Sequentially an edge can only flip by passing through undirected.
    if (e.stable)
      for (const Configuration& c : period)
        if (orientation(c, u, v) != e.orientation) e.stable = false;
    const Dir d = direction_between(s.cell(u), s.cell(v));
    stable_dir[static_cast<std::size_t>(u)][static_cast<std::size_t>(d)] = e.stable;
    stable_dir[static_cast<std::size_t>(v)][static_cast<std::size_t>(opposite(d))] = e.stable;
    rep.edges.push_back(e);
  }
  for (const Configuration& c : period) rep.reaches_valid = rep.reaches_valid || is_valid(c);

  for (int i = 0; i < static_cast<int>(s.size()); ++i) {
    ParticleStability ps;
    ps.cell = s.cell(i);
    unsigned unstable_mask = 0;
    for (int d = 0; d < kDegree; ++d) {
      const int j = s.neighbor_index(i, d);
      if (j == Support::kEmpty) continue;
      if (!stable_dir[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)]) {
        ps.unstable_dirs.push_back(d);
        unstable_mask |= 1u << d;
      } else if (orientation(period.front(), i, j) == EdgeOrientation::AtoB) {
        ps.has_stable_outgoing = true;
      }
    }
    for (const Configuration& c : period) ps.ever_activable = ps.ever_activable || is_activable(c, i);
    for (const Cell& a : w.activated) ps.ever_activated = ps.ever_activated || a == ps.cell;
    if (ps.has_stable_outgoing) ps.lemma5_ok = !ps.ever_activated && unstable_mask == 0;
    const std::size_t k = ps.unstable_dirs.size();
    if (k >= 1 && k <= 3 && rule::r3_mask(unstable_mask)) ps.lemma6_ok = false;
    rep.lemma5_holds = rep.lemma5_holds && ps.lemma5_ok;
    rep.lemma6_holds = rep.lemma6_holds && ps.lemma6_ok;
    rep.particles.push_back(std::move(ps));
  }
  return rep;
}

}  // namespace pmle

#endif  // PMLE_SCHEDULER_HPP
