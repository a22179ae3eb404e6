#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "msint/estimators.hpp"
#include "msint/simulation.hpp"
#include "msint/verify.hpp"

using namespace msint;

TEST(EmpiricalCounts, Examples) {
  const Sample two{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1)};
  EXPECT_DOUBLE_EQ(empirical_counts(two, 1, 2, 2.0), 0.5);
  EXPECT_DOUBLE_EQ(empirical_counts(two, 1, 2, 0.5), 0.0);
  // Unobserved across the jump: 1 -> 0 -> 2 is not a 1 -> 2 transition.
  const Sample hidden{EventHistory(0, 1, {{0.5, 0}, {1.5, 2}})};
  EXPECT_DOUBLE_EQ(empirical_counts(hidden, 1, 2, 2.0), 0.0);
}

TEST(EmpiricalOccupancy, Examples) {
  const Sample all{EventHistory(0, 1), EventHistory(1, 1)};
  EXPECT_DOUBLE_EQ(empirical_occupancy(all, 1, 1.0), 1.0);
  const Sample half{EventHistory(0, 0), EventHistory(1, 1)};
  EXPECT_DOUBLE_EQ(empirical_occupancy(half, 1, 1.0), 0.5);
  const Sample jumper{EventHistory(0, 1, {{1.0, 2}})};
  EXPECT_DOUBLE_EQ(empirical_occupancy(jumper, 1, 1.0, Side::kLeft), 1.0);
  EXPECT_DOUBLE_EQ(empirical_occupancy(jumper, 1, 1.0), 0.0);
}

TEST(NelsonAalen, RiskSets) {
  const Sample one{EventHistory(0, 1, {{1.0, 2}})};
  const EstimateGrid g1 = nelson_aalen(one, 2, 2.0);
  ASSERT_EQ(g1.times.size(), 1u);
  EXPECT_DOUBLE_EQ(g1.hazard_increments[0](0, 1), 1.0);
  EXPECT_DOUBLE_EQ(g1.hazard_increments[0](0, 0), -1.0);

  const Sample two{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1)};
  const EstimateGrid g2 = nelson_aalen(two, 2, 2.0);
  EXPECT_DOUBLE_EQ(g2.hazard_increments[0](0, 1), 0.5);
}

TEST(NelsonAalen, TiedTimesArePooled) {
  const Sample s{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1, {{1.0, 3}}), EventHistory(2, 1),
                 EventHistory(3, 1)};
  const EstimateGrid g = nelson_aalen(s, 3, 2.0);
  ASSERT_EQ(g.times.size(), 1u);
  EXPECT_DOUBLE_EQ(g.hazard_increments[0](0, 1), 0.25);
  EXPECT_DOUBLE_EQ(g.hazard_increments[0](0, 2), 0.25);
  EXPECT_DOUBLE_EQ(g.hazard_increments[0](0, 0), -0.5);
}

TEST(NelsonAalen, UnobservedSubjectsLeaveTheRiskSet) {
  // Subject 1 is hidden at 1-, so only subject 0 is at risk in state 1.
  const Sample s{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1, {{0.5, 0}, {1.5, 1}})};
  const EstimateGrid g = nelson_aalen(s, 2, 2.0);
  ASSERT_EQ(g.times.size(), 1u);
  EXPECT_DOUBLE_EQ(g.hazard_increments[0](0, 1), 1.0);
}

TEST(NelsonAalen, IgnoresEventsPastHorizon) {
  const Sample s{EventHistory(0, 1, {{1.0, 2}, {3.0, 1}})};
  EXPECT_EQ(nelson_aalen(s, 2, 2.0).times.size(), 1u);
}

TEST(AalenJohansen, Examples) {
  EstimateGrid empty;
  empty.d = 2;
  aalen_johansen(empty);
  EXPECT_TRUE(empty.transition.empty());
  EXPECT_EQ(empty.transition_at(5.0), identity(2));

  const Sample two{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1)};
  EstimateGrid g = nelson_aalen(two, 2, 2.0);
  aalen_johansen(g);
  EXPECT_DOUBLE_EQ(g.transition[0](0, 0), 0.5);
  EXPECT_DOUBLE_EQ(g.transition[0](0, 1), 0.5);
}

TEST(AalenJohansen, RejectsNonHazardRows) {
  EstimateGrid g;
  g.d = 2;
  g.times = {1.0};
  Matrix bad(2, 2);
  bad << -1.5, 1.5, 0, 0;
  g.hazard_increments = {bad};
  EXPECT_THROW(aalen_johansen(g), std::logic_error);
}

TEST(OccupationEstimate, InitialDistribution) {
  const Sample s{EventHistory(0, 1), EventHistory(1, 1), EventHistory(2, 0, {{1.0, 2}})};
  const EstimateGrid g = estimate(s, 2, 2.0);
  EXPECT_DOUBLE_EQ(g.initial(0), 1.0);
  EXPECT_DOUBLE_EQ(g.initial(1), 0.0);
  const Sample none{EventHistory(0, 0, {{1.0, 1}})};
  EXPECT_THROW(estimate(none, 2, 2.0), std::invalid_argument);
}

TEST(OccupationEstimate, ConstantPastLastEvent) {
  const Sample s{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1)};
  const EstimateGrid g = estimate(s, 2, 5.0);
  EXPECT_EQ(g.occupation_at(1.0), g.occupation_at(5.0));
  EXPECT_EQ(g.occupation_at(0.5), g.initial);
}

TEST(UncensoredIdentity, ObservedProportionsForRandomSamples) {
  std::mt19937_64 gen(101);
  RandomScenarioOptions opts;
  for (int trial = 0; trial < 1000; ++trial) {
    const ScenarioConfig s = random_scenario(gen, opts);
    const std::size_t n = 1 + gen() % 40;
    const Sample sample = simulate_sample(s, {}, n, gen());
    const EstimateGrid g = estimate(sample, s.d, s.tau);
    for (Time t : s.grid) {
      const RowVector p = g.occupation_at(t);
      for (State j = 1; j <= s.d; ++j) {
        ASSERT_NEAR(p(j - 1), empirical_occupancy(sample, j, t), 1e-12) << "trial " << trial;
      }
    }
  }
}

TEST(EventCsv, RoundTrip) {
  const Sample s{EventHistory(3, 1, {{1.0, 2}, {2.5, 0}}), EventHistory(7, 0, {{0.5, 2}})};
  std::stringstream io;
  write_event_csv(io, s);
  EXPECT_EQ(read_event_csv(io, 2), s);
}

TEST(EventCsv, ValidationNamesTheLine) {
  auto fails_on = [](const std::string& text, std::size_t line) {
    std::istringstream in(text);
    try {
      read_event_csv(in, 3);
    } catch (const CsvError& e) {
      EXPECT_EQ(e.line(), line) << e.what();
      return;
    }
    ADD_FAILURE() << "no error for:\n" << text;
  };
  fails_on("subject,time,state\n0,0,1\n0,1,99\n", 3);
  fails_on("subject,time,state\n0,1,1\n", 2);
  fails_on("subject,time,state\n0,0,1\n0,2,2\n0,1,3\n", 4);
  fails_on("subject,time,state\n0,0,1\n0,1,1\n", 3);
  fails_on("subject,time,state\n0,0\n", 2);
  fails_on("subject,time,state\n0,zero,1\n", 2);
  fails_on("id,time,state\n", 1);
  fails_on("", 0);
}

TEST(EventCsv, StateNinetyNineMessage) {
  std::istringstream in("subject,time,state\n0,0,1\n0,1,99\n");
  try {
    read_event_csv(in, 3);
    FAIL();
  } catch (const CsvError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("99"), std::string::npos);
  }
}

TEST(OccupationCsv, Layout) {
  const Sample s{EventHistory(0, 1, {{1.0, 2}}), EventHistory(1, 1)};
  std::ostringstream out;
  write_occupation_csv(out, estimate(s, 2, 2.0));
  EXPECT_EQ(out.str(), "t,p_1,p_2\n0,1,0\n1,0.5,0.5\n");
}
