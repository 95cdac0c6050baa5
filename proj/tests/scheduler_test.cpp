#include <gtest/gtest.h>

#include <sstream>

#include "oracles.hpp"
#include "pmle/generators.hpp"
#include "pmle/oracle.hpp"
#include "pmle/scheduler.hpp"

using namespace pmle;

namespace {

// Round robin in cell order on the oracle's global state.
std::pair<oracle::GlobalState, int> oracle_round_robin(oracle::GlobalState g) {
  int steps = 0;
  std::size_t next = 0;
  while (true) {
    bool moved = false;
    for (std::size_t k = 0; k < g.cells.size(); ++k) {
      const std::size_t i = (next + k) % g.cells.size();
      if (!oracle::oracle_activable(g, g.cells[i])) continue;
      g.out[g.cells[i]] = oracle::oracle_step(g, g.cells[i]);
      next = i + 1;
      ++steps;
      moved = true;
      break;
    }
    if (!moved) return {g, steps};
  }
}

}  // namespace

TEST(Scheduler, ErosionConfigurationIsFinalAtStepZero) {
  const Configuration c = erosion_orientation(hexagon(2));
  EXPECT_TRUE(detect_final(c));
  const ExecutionResult r = run(c, RandomSequential{1}, 100);
  EXPECT_TRUE(r.final());
  EXPECT_EQ(r.steps, 0);
}

TEST(Scheduler, DetectFinalSmallCases) {
  EXPECT_FALSE(detect_final(Configuration::all_in(line(2))));
  EXPECT_TRUE(detect_final(Configuration::all_in(Support({{0, 0}}))));
}

TEST(Scheduler, RoundRobinMatchesOracleSchedule) {
  for (const Support& s : {triangle3(), rhombus(), hexagon(1), line(4), parallelogram(3, 2)}) {
    const Configuration c0 = Configuration::all_in(s);
    const ExecutionResult r = run(c0, RoundRobin{}, 10000);
    const auto [g, steps] = oracle_round_robin(oracle::global_state(c0));
    ASSERT_TRUE(r.final());
    EXPECT_EQ(r.steps, steps);
    EXPECT_EQ(oracle::global_state(r.configuration).out, g.out);
    EXPECT_TRUE(is_valid(r.configuration));
    EXPECT_EQ(sinks(r.configuration).size(), 1u);
  }
}

TEST(Scheduler, AllInTriangleRoundRobin) {
  const ExecutionResult r = run(Configuration::all_in(triangle3()), RoundRobin{}, 100);
  ASSERT_TRUE(r.final());
  EXPECT_EQ(r.steps, 2);  // (0,0) orients both edges, (0,1) orients toward (1,0)
  EXPECT_EQ(sinks(r.configuration), (std::vector<Cell>{Cell{1, 0}}));
}

TEST(Scheduler, RandomRunsAreDeterministic) {
  const Configuration c0 = random_registers(random_support(15, 3), 3, 0.1);
  std::ostringstream a, b;
  TextTraceWriter wa(a), wb(b);
  const ExecutionResult ra = run(c0, RandomSequential{42}, kDefaultStepCap, &wa);
  const ExecutionResult rb = run(c0, RandomSequential{42}, kDefaultStepCap, &wb);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(ra.configuration, rb.configuration);
  EXPECT_EQ(ra.steps, rb.steps);
}

TEST(Scheduler, FinalRunsAreValidWithOneSink) {
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const Support s = random_support(5 + static_cast<int>(seed % 16), seed);
    const Configuration c0 = random_registers(s, seed, 0.1);
    MemoryTrace trace;
    const ExecutionResult r = run(c0, RandomSequential{seed}, kDefaultStepCap, &trace);
    ASSERT_TRUE(r.final()) << serialize(c0);
    EXPECT_TRUE(oracle::global_valid(r.configuration));
    EXPECT_EQ(oracle::global_sinks(r.configuration), 1);
    int last = r234_violation_count(c0);
    for (const TraceEvent& e : trace.events) {
      EXPECT_TRUE(e.activated_satisfies_r234);
      EXPECT_LE(e.post_violation_count, last);
      last = e.post_violation_count;
      EXPECT_TRUE(e.effect.changed);
    }
    EXPECT_EQ(static_cast<std::int64_t>(trace.events.size()), r.steps);
  }
}

TEST(Scheduler, LocalRouteGivesTheSameExecution) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Support s = random_support(12, seed);
    const Configuration c0 = random_registers(s, seed, 0.1);
    const ExecutionResult a = run(c0, RandomSequential{seed}, kDefaultStepCap, nullptr, R4Route::Omniscient);
    const ExecutionResult b = run(c0, RandomSequential{seed}, kDefaultStepCap, nullptr, R4Route::Local);
    EXPECT_EQ(a.configuration, b.configuration);
    EXPECT_EQ(a.steps, b.steps);
  }
}

TEST(Scheduler, CapIsHonoured) {
  const Configuration c0 = Configuration::all_in(hexagon(2));
  const ExecutionResult r = run(c0, RandomSequential{1}, 3);
  EXPECT_FALSE(r.final());
  EXPECT_EQ(r.steps, 3);
  EXPECT_THROW(run(c0, RoundRobin{}, -1), std::invalid_argument);
}

TEST(Scheduler, ScriptedNonActivableEntryIsANoOpEvent) {
  const Configuration c0 = Configuration::all_in(line(2));
  MemoryTrace trace;
  const ExecutionResult r = run(c0, Scripted{{Cell{0, 0}, Cell{0, 0}, Cell{0, 0}}}, 1);
  EXPECT_EQ(r.steps, 1);
  EXPECT_TRUE(r.final());
  // nothing activable after the first step; a second scripted run on a
  // non-final config with an idle entry still advances the step count
  Configuration c1 = Configuration::all_in(line(3));
  const ExecutionResult r1 = run(c1, Scripted{{Cell{0, 0}, Cell{0, 0}}}, 2, &trace);
  ASSERT_EQ(trace.events.size(), 2u);
  EXPECT_TRUE(trace.events[0].effect.changed);
  EXPECT_FALSE(trace.events[1].effect.changed);
  EXPECT_EQ(r1.steps, 2);
  EXPECT_THROW(run(c0, Scripted{{}}, 5), std::invalid_argument);
  EXPECT_THROW(run(c0, Scripted{{Cell{9, 9}}}, 5), std::invalid_argument);
}

TEST(Scheduler, TraceRoundTripAndReplay) {
  const Configuration c0 = random_registers(random_support(10, 8), 8, 0.1);
  std::ostringstream os;
  TextTraceWriter w(os);
  const ExecutionResult r = run(c0, RandomSequential{5}, kDefaultStepCap, &w);
  std::istringstream is(os.str());
  const TraceLog log = read_trace(is);
  EXPECT_EQ(log.header.scheduler, "random");
  EXPECT_EQ(log.header.seed, 5u);
  EXPECT_EQ(log.header.cap, kDefaultStepCap);
  EXPECT_EQ(log.header.shape, hex64(shape_hash(c0.support())));
  EXPECT_EQ(static_cast<std::int64_t>(log.records.size()), r.steps);
  EXPECT_EQ(replay(c0, log.records, r.steps), r.configuration);
  EXPECT_EQ(replay(c0, log.records, 0), c0);
  std::istringstream bad("0 0 0 1 0 1 2\n");
  EXPECT_THROW(read_trace(bad), ParseError);
}

TEST(Scheduler, ConcurrentRunsReplayFromTheirTrace) {
  const Configuration c0 = Configuration::all_in(hexagon(2));
  std::ostringstream os;
  TextTraceWriter w(os);
  const ExecutionResult r = run(c0, ConcurrentRandomSet{3, 0.5}, 2000, &w);
  std::istringstream is(os.str());
  const TraceLog log = read_trace(is);
  EXPECT_EQ(replay(c0, log.records, r.steps), r.configuration);
  EXPECT_EQ(log.header.scheduler, "concurrent");
}

TEST(Scheduler, AnalyzeCycleRejectsNonPeriodicWindows) {
  const Configuration c0 = Configuration::all_in(line(2));
  EXPECT_THROW(analyze_cycle(window_from_script(c0, {Cell{0, 0}})), std::invalid_argument);
  CycleWindow w;
  w.configs = {c0};
  EXPECT_THROW(analyze_cycle(w), std::invalid_argument);
}

TEST(Scheduler, FinalWindowHasOnlyStableEdges) {
  const Configuration c = erosion_orientation(hexagon(1));
  CycleWindow w;
  w.configs = {c, c};
  const CycleReport rep = analyze_cycle(w);
  for (const auto& e : rep.edges) EXPECT_TRUE(e.stable);
  EXPECT_TRUE(rep.lemma5_holds);
  EXPECT_TRUE(rep.lemma6_holds);
  EXPECT_TRUE(rep.reaches_valid);
}

TEST(Scheduler, UnfairCycleScriptReplaysPeriodically) {
  const auto cyc = find_unfair_cycle(hexagon(1));
  ASSERT_TRUE(cyc);
  const std::int64_t period = static_cast<std::int64_t>(cyc->script.size());
  MemoryTrace trace;
  const ExecutionResult r = run(cyc->initial, Scripted{cyc->script}, 5 * period, &trace);
  EXPECT_FALSE(r.final());
  EXPECT_EQ(r.configuration, cyc->initial);
  for (const TraceEvent& e : trace.events) EXPECT_TRUE(e.effect.changed);
  for (std::size_t i = static_cast<std::size_t>(period); i < trace.events.size(); ++i)
    EXPECT_EQ(trace.events[i].activated, trace.events[i - static_cast<std::size_t>(period)].activated);
  const CycleReport rep = analyze_cycle(window_from_script(cyc->initial, cyc->script));
  EXPECT_FALSE(rep.reaches_valid);
  EXPECT_TRUE(rep.lemma5_holds);
  EXPECT_TRUE(rep.lemma6_holds);
}
