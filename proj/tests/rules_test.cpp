#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmle/generators.hpp"
#include "pmle/rules.hpp"

using namespace pmle;

namespace {

// Sets the global-direction links of particle at `cell`.
void set_dirs(Configuration& c, Cell cell, std::initializer_list<Dir> out) {
  const int i = c.support().require_index(cell);
  for (Dir d = 0; d < kDegree; ++d)
    if (c.support().neighbor_index(i, d) != Support::kEmpty) c.set_link(i, c.port_toward_dir(i, d), LinkState::In);
  for (Dir d : out) c.set_link(i, c.port_toward_dir(i, d), LinkState::Out);
}

}  // namespace

TEST(Rules, ConsecutiveMask) {
  EXPECT_TRUE(rule::r3_mask(0));
  EXPECT_TRUE(rule::r3_mask(0b000001));
  EXPECT_TRUE(rule::r3_mask(0b100001));  // ports 5 and 0
  EXPECT_TRUE(rule::r3_mask(0b001110));
  EXPECT_FALSE(rule::r3_mask(0b000101));
  EXPECT_FALSE(rule::r3_mask(0b010010));
  EXPECT_TRUE(rule::r3_mask(0b111111));
}

TEST(Rules, DirectedTriangleCycleViolatesR4) {
  Configuration c = Configuration::all_in(triangle3());
  // (0,0) -> (1,0) -> (0,1) -> (0,0)
  set_dirs(c, {0, 0}, {0});
  set_dirs(c, {1, 0}, {2});
  set_dirs(c, {0, 1}, {4});
  for (const Cell& p : c.support().cells()) {
    EXPECT_TRUE(check_r1(c, p));
    EXPECT_TRUE(check_r2(c, p));
    EXPECT_TRUE(check_r3(c, p));
    EXPECT_FALSE(check_r4(c, p));
  }
  EXPECT_FALSE(is_valid(c));
  EXPECT_EQ(violating_particles(c).size(), 3u);
  EXPECT_TRUE(sinks(c).empty());
}

TEST(Rules, AcyclicTriangleIsValid) {
  Configuration c = Configuration::all_in(triangle3());
  set_dirs(c, {0, 0}, {0, 1});
  set_dirs(c, {1, 0}, {2});
  EXPECT_TRUE(is_valid(c));
  EXPECT_EQ(sinks(c), (std::vector<Cell>{Cell{0, 1}}));
}

TEST(Rules, AllInViolatesR1Everywhere) {
  const Configuration c = Configuration::all_in(hexagon(1));
  const RuleReport rep = rule_report(c);
  EXPECT_FALSE(rep.valid);
  for (const auto& pr : rep.particles) {
    EXPECT_FALSE(pr.r1);
    EXPECT_TRUE(pr.r2 && pr.r3 && pr.r4);
  }
  EXPECT_EQ(rep.sinks.size(), 7u);
  EXPECT_EQ(r234_violation_count(c), 0);
  EXPECT_TRUE(check_r1(Configuration::all_in(Support({{3, 3}})), Cell{3, 3}));
}

TEST(Rules, ConflictViolatesR1Only) {
  Configuration c = Configuration::all_in(line(2));
  set_dirs(c, {0, 0}, {0});
  set_dirs(c, {1, 0}, {3});
  EXPECT_FALSE(check_r1(c, Cell{0, 0}));
  EXPECT_TRUE(check_r4(c, Cell{0, 0}));
  EXPECT_TRUE(sinks(c).empty());
}

TEST(Rules, TooManyOrSplitOutgoingEdges) {
  Configuration c = Configuration::all_in(hexagon(1));
  set_dirs(c, {0, 0}, {0, 1, 2, 3});
  EXPECT_FALSE(check_r2(c, Cell{0, 0}));
  EXPECT_TRUE(check_r3(c, Cell{0, 0}));
  set_dirs(c, {0, 0}, {0, 2});
  EXPECT_TRUE(check_r2(c, Cell{0, 0}));
  EXPECT_FALSE(check_r3(c, Cell{0, 0}));
  set_dirs(c, {0, 0}, {5, 0, 1});
  EXPECT_TRUE(check_r3(c, Cell{0, 0}));
}

TEST(Rules, AgreeWithGlobalFrameOracleOnRandomConfigurations) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    const Support s = random_support(2 + static_cast<int>(seed % 14), seed);
    const Configuration c = random_registers(s, seed, seed % 3 == 0 ? 0.0 : 0.15);
    const oracle::GlobalState g = oracle::global_state(c);
    for (int i = 0; i < static_cast<int>(c.size()); ++i) {
      const oracle::Rules want = oracle::global_rules(g, s.cell(i));
      ASSERT_EQ(check_r1(c, i), want.r1) << serialize(c);
      ASSERT_EQ(check_r2(c, i), want.r2) << serialize(c);
      ASSERT_EQ(check_r3(c, i), want.r3) << serialize(c);
      ASSERT_EQ(check_r4(c, i), want.r4) << serialize(c);
      ++checked;
    }
    EXPECT_EQ(is_valid(c), oracle::global_valid(c));
  }
  EXPECT_GT(checked, 2000);
}

TEST(Rules, ErosionOrientationsAreValidWithOneSink) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Support s = random_support(5 + static_cast<int>(seed % 20), seed);
    const Configuration c = erosion_orientation(s, random_portmaps(s.size(), seed));
    EXPECT_TRUE(oracle::global_valid(c));
    EXPECT_TRUE(is_valid(c));
    EXPECT_EQ(sinks(c).size(), 1u);
  }
}

TEST(Rules, ReportFormat) {
  Configuration c = Configuration::all_in(line(2));
  set_dirs(c, {0, 0}, {0});
  const std::string text = format_report(rule_report(c), true);
  EXPECT_EQ(text, "valid particles=2 violating=0 sinks=1\n0 0 r1=1 r2=1 r3=1 r4=1\n1 0 r1=1 r2=1 r3=1 r4=1\n");
  EXPECT_EQ(format_report(rule_report(c), false), "valid particles=2 violating=0 sinks=1\n");
}
