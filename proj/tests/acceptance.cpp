// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "pmle/pmle.hpp"

using namespace pmle;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << what << " (" << detail << ")" << std::endl;
  failures += !ok;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

// Per-event step invariants, shared by criteria 4, 8 and 10.
class InvariantSink : public TraceSink {
 public:
  void on_start(const Configuration& c0, const SchedulerKind&, std::int64_t) override {
    last_ = r234_violation_count(c0);
  }
  void on_event(const TraceEvent& e) override {
    ++events;
    if (!e.activated_satisfies_r234) ++r234_failures;
    if (e.post_violation_count > last_) ++increases;
    if (!e.effect.changed) ++idle;
    last_ = e.post_violation_count;
  }
  std::uint64_t events = 0, r234_failures = 0, increases = 0, idle = 0;

 private:
  int last_ = 0;
};

InvariantSink step_invariants;

// Pinned parameters.
constexpr int kTheorem1MaxN = 6;
constexpr double kTheorem1BudgetSeconds = 600.0;
constexpr int kSilenceMaxN = 4;
constexpr int kReachMaxN = 4;
constexpr int kRuns = 1000;
constexpr int kRunsRequired = 999;
constexpr int kRunMinN = 5, kRunMaxN = 25;
constexpr double kRunConflictProbability = 0.1;
constexpr std::int64_t kRunCap = 1'000'000;
constexpr int kObs1MinN = 3, kObs1MaxN = 7;
constexpr int kLemma1MinN = 2, kLemma1MaxN = 7;
constexpr int kLocalR4Configurations = 10'000;
constexpr int kUnfairMaxN = 8;
constexpr int kUnfairReplayPeriods = 3;
constexpr int kErosionMaxN = 7;

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::uint64_t supports = 0, orientations = 0, valid = 0, bad = 0;
  for (int n = 1; n <= kTheorem1MaxN; ++n) {
    for (const Support& s : enumerate_supports(n)) {
      const Theorem1Report r = check_theorem1(s);
      ++supports;
      orientations += r.orientations;
      valid += r.valid;
      bad += r.counterexamples.size();
      if (!r.ok() && bad == r.counterexamples.size()) std::cerr << serialize(r.counterexamples.front());
    }
  }
  const double secs = seconds_since(t0);
  std::ostringstream d;
  d << supports << " supports n<=" << kTheorem1MaxN << ", " << orientations << " orientations, " << valid
    << " valid, " << bad << " counterexamples, " << fmt_seconds(secs);
  report(1, bad == 0 && secs <= kTheorem1BudgetSeconds, "unique sink in every valid orientation", d.str());
}

void criterion2() {
  std::uint64_t supports = 0, states = 0, bad = 0;
  for (int n = 1; n <= kSilenceMaxN; ++n) {
    for (const Support& s : enumerate_supports(n)) {
      const SilenceReport r = check_silence(s);
      ++supports;
      states += r.states;
      bad += r.counterexamples.size();
      if (!r.ok()) std::cerr << serialize(r.counterexamples.front());
    }
  }
  std::ostringstream d;
  d << supports << " supports n<=" << kSilenceMaxN << ", " << states << " states, " << bad << " counterexamples";
  report(2, bad == 0, "final iff valid", d.str());
}

void criterion3() {
  std::uint64_t supports = 0, states = 0, stuck = 0;
  for (int n = 1; n <= kReachMaxN; ++n) {
    for (const Support& s : enumerate_supports(n)) {
      const ReachabilityReport r = check_reachability(s, Engine::Reference);
      ++supports;
      states += r.states;
      stuck += r.states - r.can_reach;
      if (!r.ok()) std::cerr << serialize(r.unreachable.front());
    }
  }
  std::ostringstream d;
  d << supports << " supports n<=" << kReachMaxN << ", " << states << " states, " << stuck << " without a path to valid";
  report(3, stuck == 0, "valid final state reachable from every state", d.str());
}

void criterion4() {
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> size(kRunMinN, kRunMaxN);
  int good = 0, retried = 0, retry_good = 0;
  std::int64_t max_steps = 0, total_steps = 0;
  for (int k = 0; k < kRuns; ++k) {
    const int n = size(rng);
    const std::uint64_t shape_seed = rng(), reg_seed = rng(), sched_seed = rng();
    const Support s = random_support(n, shape_seed);
    const Configuration c0 = random_registers(s, reg_seed, kRunConflictProbability);
    const ExecutionResult r = run(c0, RandomSequential{sched_seed}, kRunCap, &step_invariants);
    total_steps += r.steps;
    max_steps = std::max(max_steps, r.steps);
    const bool ok = r.final() && is_valid(r.configuration) && sinks(r.configuration).size() == 1;
    good += ok;
    if (r.final() && !ok) std::cerr << "final but not valid with one sink:\n" << serialize(r.configuration);
    if (!r.final()) {
      ++retried;
      const ExecutionResult again = run(c0, RandomSequential{rng()}, kRunCap, &step_invariants);
      retry_good += again.final() && is_valid(again.configuration) && sinks(again.configuration).size() == 1;
    }
  }
  std::ostringstream d;
  d << good << "/" << kRuns << " final, valid, one sink; " << retried << " retried, " << retry_good
    << " finished on retry; mean steps " << total_steps / kRuns << ", max " << max_steps;
  report(4, good >= kRunsRequired && retry_good == retried, "random sequential runs converge", d.str());
}

void criterion5() {
  std::uint64_t checked = 0, bad = 0;
  for (int n = kObs1MinN; n <= kObs1MaxN; ++n) {
    for (const Support& s : enumerate_supports(n)) {
      if (!is_two_connected(s)) continue;
      ++checked;
      if (angle_census(s).formula() != 6) {
        ++bad;
        std::cerr << format_shape(s) << "formula " << angle_census(s).formula() << '\n';
      }
    }
  }
  std::ostringstream d;
  d << checked << " 2-connected supports " << kObs1MinN << "<=n<=" << kObs1MaxN << ", " << bad << " counterexamples";
  report(5, bad == 0 && checked > 0, "2*n60 + n120 - n240 = 6", d.str());
}

void criterion6() {
  std::uint64_t checked = 0, bad = 0, kinds[4] = {0, 0, 0, 0};
  for (int n = kLemma1MinN; n <= kLemma1MaxN; ++n) {
    for (const Support& s : enumerate_supports(n)) {
      ++checked;
      try {
        const Lemma1Witness w = lemma1_witness(s);
        ++kinds[w.which];
      } catch (const std::exception& e) {
        ++bad;
        std::cerr << format_shape(s) << e.what() << '\n';
      }
    }
  }
  std::ostringstream d;
  d << checked << " supports " << kLemma1MinN << "<=n<=" << kLemma1MaxN << " (pending " << kinds[1] << ", 60 degree "
    << kinds[2] << ", 120-180-120 chain " << kinds[3] << "), " << bad << " failures";
  report(6, bad == 0, "boundary witness on every simply connected support", d.str());
}

void criterion7() {
  const auto maps = all_portmaps();
  std::uint64_t triangles = 0, wrong = 0;
  auto check_all = [&](const Configuration& c) {
    for (int p = 0; p < static_cast<int>(c.size()); ++p) {
      for (int port = 0; port < kDegree; ++port) {
        const int q = c.neighbor_at_port(p, port), r = c.neighbor_at_port(p, port + 1);
        if (q == Support::kEmpty || r == Support::kEmpty) continue;
        ++triangles;
        try {
          const auto [qr, rq] = infer_triangle_labels(c, p, q, r);
          const bool chir = infer_same_chirality(c, p, q, r);
          if (qr != c.port_toward(q, r) || rq != c.port_toward(r, q) ||
              chir != (c.portmap(p).chirality == c.portmap(q).chirality))
            ++wrong;
        } catch (const std::exception&) {
          ++wrong;
        }
      }
    }
  };
  auto tri = std::make_shared<const Support>(triangle3());
  for (const auto& a : maps)
    for (const auto& b : maps)
      for (const auto& c : maps) check_all(Configuration::all_in(tri, {a, b, c}));
  auto rh = std::make_shared<const Support>(rhombus());
  for (const auto& a : maps)
    for (const auto& b : maps)
      for (const auto& c : maps)
        for (const auto& e : maps) check_all(Configuration::all_in(rh, {a, b, c, e}));

  std::mt19937_64 rng(7);
  std::uint64_t particles = 0, disagree = 0;
  for (int k = 0; k < kLocalR4Configurations; ++k) {
    const Support s = k % 2 == 0 ? triangle3() : random_support(3 + static_cast<int>(rng() % 10), rng());
    const Configuration c = random_registers(s, rng(), kUnbiasedConflictProbability);
    for (int p = 0; p < static_cast<int>(c.size()); ++p) {
      ++particles;
      disagree += local_check_r4(c, p) != check_r4(c, p);
    }
  }
  std::ostringstream d;
  d << triangles << " triangle inferences over 12^3 triangle and 12^4 rhombus port maps, " << wrong << " wrong; "
    << kLocalR4Configurations << " random configurations, " << particles << " particles, " << disagree
    << " local/global R4 disagreements";
  report(7, wrong == 0 && disagree == 0, "triangle labels and chirality inferred from views", d.str());
}

void criterion8() {
  std::uint64_t supports = 0, found = 0, replay_bad = 0, lemma5_bad = 0, lemma6_bad = 0, valid_seen = 0;
  int smallest = 0;
  for (int n = 2; n <= kUnfairMaxN; ++n) {
    for (const Support& s : enumerate_supports(n, true)) {
      ++supports;
      const auto cyc = find_unfair_cycle(s);
      if (!cyc) continue;
      ++found;
      if (smallest == 0) smallest = n;
      const CycleWindow w = window_from_script(cyc->initial, cyc->script);
      const std::int64_t period = static_cast<std::int64_t>(cyc->script.size());
      // each prefix of the scripted run lands on the window's configuration
      for (std::int64_t k = 0; k <= period; ++k) {
        const ExecutionResult r = run(cyc->initial, Scripted{cyc->script}, k);
        if (!(r.configuration == w.configs[static_cast<std::size_t>(k)]) || r.final()) ++replay_bad;
      }
      const std::uint64_t idle_before = step_invariants.idle;
      const ExecutionResult r = run(cyc->initial, Scripted{cyc->script}, kUnfairReplayPeriods * period, &step_invariants);
      if (!(r.configuration == cyc->initial) || r.final() || step_invariants.idle != idle_before) ++replay_bad;
      const CycleReport rep = analyze_cycle(w);
      lemma5_bad += !rep.lemma5_holds;
      lemma6_bad += !rep.lemma6_holds;
      valid_seen += rep.reaches_valid;
      if (!rep.lemma5_holds || !rep.lemma6_holds) std::cerr << serialize(cyc->initial);
    }
  }
  std::ostringstream d;
  d << supports << " supports n<=" << kUnfairMaxN << " up to symmetry, " << found << " with a cycle, smallest n="
    << smallest << "; " << replay_bad << " replay mismatches, " << valid_seen << " cycles through valid states, "
    << lemma5_bad << " stable-edge and " << lemma6_bad << " unstable-edge assertion failures";
  report(8, found > 0 && replay_bad == 0 && valid_seen == 0 && lemma5_bad == 0 && lemma6_bad == 0,
         "periodic execution avoiding valid configurations", d.str());
}

void criterion9() {
  std::uint64_t checked = 0, bad = 0;
  for (int n = 1; n <= kErosionMaxN; ++n) {
    for (const Support& s : enumerate_supports(n)) {
      ++checked;
      const Configuration c = erosion_orientation(s);
      if (!is_valid(c) || !oracle::acyclic(c) || sinks(c).size() != 1) {
        ++bad;
        std::cerr << serialize(c);
      }
    }
  }
  std::ostringstream d;
  d << checked << " supports n<=" << kErosionMaxN << ", " << bad << " not valid, acyclic with one sink";
  report(9, bad == 0, "erosion orientation", d.str());
}

void criterion10() {
  std::ostringstream d;
  d << step_invariants.events << " events, " << step_invariants.r234_failures
    << " with R2-R4 failing at the activated particle, " << step_invariants.increases << " violation-count increases";
  report(10, step_invariants.events > 0 && step_invariants.r234_failures == 0 && step_invariants.increases == 0,
         "step-level invariants on criteria 4 and 8 traces", d.str());
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
