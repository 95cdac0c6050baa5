#include <gtest/gtest.h>

#include "oracles.hpp"
#include "pmle/algorithm.hpp"
#include "pmle/generators.hpp"

using namespace pmle;

using oracle::oracle_step;

TEST(Algorithm, PairOrientsOnFirstActivation) {
  Configuration c = Configuration::all_in(line(2));
  const ActivationEffect e = activate(c, 0);
  EXPECT_TRUE(e.changed);
  EXPECT_TRUE(e.line1_fired);
  EXPECT_FALSE(e.line2_fired);
  EXPECT_EQ(orientation(c, 0, 1), EdgeOrientation::AtoB);
  EXPECT_TRUE(is_valid(c));
  EXPECT_FALSE(is_activable(c, 0));
  EXPECT_FALSE(is_activable(c, 1));
}

TEST(Algorithm, ConflictIsResolvedTowardTheActivatedParticle) {
  Configuration c = Configuration::all_in(line(2));
  c.set_link(0, 0, LinkState::Out);
  c.set_link(1, 3, LinkState::Out);
  EXPECT_EQ(orientation(resolve_conflicts(c, 0), 0, 1), EdgeOrientation::BtoA);
  const auto [next, e] = activation_step(c, Cell{0, 0});
  EXPECT_EQ(e.conflicts_resolved, 1);
  EXPECT_FALSE(e.line1_fired);
  EXPECT_EQ(orientation(next, 0, 1), EdgeOrientation::BtoA);
}

TEST(Algorithm, TriangleCentreRetractsWhenOrientingWouldCloseACycle) {
  Configuration c = Configuration::all_in(triangle3());
  const Support& s = c.support();
  const int a = s.require_index({0, 0}), b = s.require_index({0, 1}), d = s.require_index({1, 0});
  // b -> d -> a; edge a-b undirected
  c.set_link(b, c.port_toward(b, d), LinkState::Out);
  c.set_link(d, c.port_toward(d, a), LinkState::Out);
  const ActivationEffect e = activate(c, a);
  EXPECT_TRUE(e.line1_fired);
  EXPECT_TRUE(e.line2_fired);
  EXPECT_FALSE(e.changed);
  EXPECT_EQ(outgoing_mask(c, a), 0u);
}

TEST(Algorithm, SplitOutgoingEdgesAreRetracted) {
  Configuration c = Configuration::all_in(hexagon(1));
  const int centre = c.support().require_index({0, 0});
  for (int d : {0, 2, 4}) c.set_link(centre, c.port_toward_dir(centre, d), LinkState::Out);
  for (int d : {1, 3, 5}) {
    const int j = c.support().neighbor_index(centre, d);
    c.set_link(j, c.port_toward(j, centre), LinkState::Out);
  }
  const ActivationEffect e = activate(c, centre);
  EXPECT_FALSE(e.line1_fired);
  EXPECT_TRUE(e.line2_fired);
  EXPECT_EQ(outgoing_mask(c, centre), 0u);
}

TEST(Algorithm, MatchesGlobalFrameOracle) {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    const Support s = random_support(2 + static_cast<int>(seed % 12), seed);
    const Configuration c = random_registers(s, seed, 0.2);
    const oracle::GlobalState g = oracle::global_state(c);
    for (int p = 0; p < static_cast<int>(c.size()); ++p) {
      for (R4Route route : {R4Route::Omniscient, R4Route::Local}) {
        const auto [next, e] = activation_step(c, p, route);
        const auto want = oracle_step(g, s.cell(p));
        const oracle::GlobalState after = oracle::global_state(next);
        ASSERT_EQ(after.out.at(s.cell(p)), want) << serialize(c) << "particle " << p;
        EXPECT_EQ(e.changed, want != g.out.at(s.cell(p)));
      }
    }
  }
}

TEST(Algorithm, ActivationTouchesOnlyTheActivatedParticle) {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Configuration c = random_registers(random_support(10, seed), seed, 0.1);
    for (int p = 0; p < static_cast<int>(c.size()); ++p) {
      const auto [next, e] = activation_step(c, p);
      for (int q = 0; q < static_cast<int>(c.size()); ++q)
        if (q != p) {
          ASSERT_EQ(next.registers(q), c.registers(q));
        }
    }
  }
}

TEST(Algorithm, ActivatedParticleSatisfiesR234Afterwards) {
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const Configuration c = random_registers(random_support(4 + static_cast<int>(seed % 10), seed), seed, 0.2);
    for (int p = 0; p < static_cast<int>(c.size()); ++p) {
      const auto [next, e] = activation_step(c, p);
      EXPECT_FALSE(violates_r234(next, p));
      EXPECT_LE(r234_violation_count(next), r234_violation_count(c));
      if (!check_r1(next, p)) {
        EXPECT_EQ(outgoing_mask(next, p), 0u);
      }
    }
  }
}

TEST(Algorithm, ValidConfigurationsHaveNoActivableParticle) {
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Support s = random_support(5 + static_cast<int>(seed % 15), seed);
    const Configuration c = erosion_orientation(s, random_portmaps(s.size(), seed));
    for (int p = 0; p < static_cast<int>(c.size()); ++p) {
      EXPECT_FALSE(is_activable(c, p));
      EXPECT_FALSE(is_activable(c, p, R4Route::Local));
    }
  }
}

TEST(Algorithm, ConcurrentActivationUsesThePreState) {
  Configuration c = Configuration::all_in(line(2));
  const auto effects = activate_concurrently(c, {0, 1});
  ASSERT_EQ(effects.size(), 2u);
  EXPECT_TRUE(effects[0].changed && effects[1].changed);
  EXPECT_EQ(orientation(c, 0, 1), EdgeOrientation::Conflict);
}
