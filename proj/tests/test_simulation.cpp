#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "msint/simulation.hpp"
#include "msint/verify.hpp"

using namespace msint;

namespace {

ScenarioConfig still_markov() {
  ScenarioConfig s;
  s.name = "still";
  s.d = 3;
  s.tau = 3;
  s.grid = {1, 2, 3};
  s.initial = {0.0, 1.0, 0.0};
  s.rules = {{std::nullopt, 2, 3, 0.0, std::nullopt}};
  return s;
}

std::vector<double> sorted_weights(const PathSpace& ps) {
  std::vector<double> w;
  for (const auto& p : ps.paths()) w.push_back(p.weight);
  std::sort(w.begin(), w.end());
  return w;
}

}  // namespace

TEST(Scenario, ValidationErrors) {
  ScenarioConfig s = idn_scenario();
  s.rules.push_back({1.0, 1, 3, 0.6, std::nullopt});
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = idn_scenario();
  s.initial = {0.5, 0.0, 0.0};
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = idn_scenario();
  s.rules.push_back({1.5, 1, 3, 0.1, std::nullopt});
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = surv_scenario();
  s.rules[0].key = 1.0;
  EXPECT_THROW(s.validate(), std::invalid_argument);
  s = surv_scenario();
  s.rules[0].to = 1;
  EXPECT_THROW(s.validate(), std::invalid_argument);
}

TEST(Scenario, MoreSpecificRuleWins) {
  ScenarioConfig s = idn_scenario();
  s.rules.push_back({std::nullopt, 2, 3, 0.1, std::nullopt});
  EXPECT_DOUBLE_EQ(s.jump_row(2, 2, 1.0)[2], 0.8);
  EXPECT_DOUBLE_EQ(s.jump_row(1, 2, 1.0)[2], 0.1);
}

TEST(Censoring, Validation) {
  CensoringConfig c;
  c.kind = CensoringKind::kFilteringConforming;
  c.q = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.kind = CensoringKind::kViolating;
  c.q = 0.7;
  c.delta = 1.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c.kind = CensoringKind::kIndependentRight;
  c.censor_times = {1.0};
  c.censor_probs = {0.5, 0.5};
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Rng, SubjectStreamsAreIndependentOfOrder) {
  SubjectRng a(7, 3, SubjectRng::Purpose::kPath);
  SubjectRng b(7, 3, SubjectRng::Purpose::kPath);
  SubjectRng c(7, 3, SubjectRng::Purpose::kObservation);
  const double x = a.uniform();
  EXPECT_EQ(x, b.uniform());
  EXPECT_NE(x, c.uniform());
  EXPECT_GE(x, 0.0);
  EXPECT_LT(x, 1.0);
  const Sample s1 = simulate_sample(idn_scenario(), {}, 50, 9);
  const Sample s2 = simulate_sample(idn_scenario(), {}, 80, 9);
  for (std::size_t i = 0; i < s1.size(); ++i) EXPECT_EQ(s1[i], s2[i]);
}

TEST(SamplePath, ZeroProbabilitiesGiveConstantPaths) {
  const ScenarioConfig s = still_markov();
  for (std::uint64_t i = 0; i < 50; ++i) {
    SubjectRng rng(1, i, SubjectRng::Purpose::kPath);
    const StatePath p = sample_path(rng, s);
    EXPECT_EQ(p.initial(), 2);
    EXPECT_TRUE(p.jumps().empty());
  }
}

TEST(SamplePath, ForcedDurationExit) {
  ScenarioConfig s;
  s.name = "forced";
  s.d = 2;
  s.tau = 4;
  s.grid = {1, 2, 3, 4};
  s.kind = RuleKind::kDuration;
  s.initial = {0.5, 0.5};
  s.rules = {{std::nullopt, 1, 2, 1.0, 1.0}, {std::nullopt, 2, 1, 1.0, 1.0}};
  for (std::uint64_t i = 0; i < 50; ++i) {
    SubjectRng rng(2, i, SubjectRng::Purpose::kPath);
    const StatePath p = sample_path(rng, s);
    ASSERT_EQ(p.jumps().size(), 4u);
    for (std::size_t g = 0; g < 4; ++g) EXPECT_EQ(p.jumps()[g].t, s.grid[g]);
  }
}

TEST(SamplePath, IdnLawOfLargeNumbers) {
  const Sample s = simulate_sample(idn_scenario(), {}, 100000, 7);
  const double expect[] = {0.25, 0.30, 0.45};
  for (State j = 1; j <= 3; ++j) EXPECT_NEAR(empirical_occupancy(s, j, 3.0), expect[j - 1], 0.01);
}

TEST(SamplePath, ChiSquareAgainstExactPaths) {
  // Smoke alarm, not a strict gate: compare path frequencies with the enumeration.
  std::mt19937_64 gen(61);
  for (int trial = 0; trial < 5; ++trial) {
    const ScenarioConfig sc = random_scenario(gen);
    const PathSpace ps = exact_pathspace(sc);
    const std::size_t n = 100000;
    std::map<std::string, std::size_t> freq;
    auto key = [](const StatePath& p) {
      std::string k = std::to_string(p.initial());
      for (const auto& j : p.jumps()) k += "|" + std::to_string(j.t) + ">" + std::to_string(j.to);
      return k;
    };
    for (std::size_t i = 0; i < n; ++i) {
      SubjectRng rng(trial, i, SubjectRng::Purpose::kPath);
      ++freq[key(sample_path(rng, sc))];
    }
    double chi2 = 0.0;
    std::size_t seen = 0;
    for (const auto& [path, w] : ps.paths()) {
      const double e = w * n;
      const double o = static_cast<double>(freq[key(path)]);
      seen += freq[key(path)];
      chi2 += (o - e) * (o - e) / e;
    }
    EXPECT_EQ(seen, n) << "sampled a path outside the enumeration";
    // Wilson-Hilferty upper quantile at p = 1e-4 (z = 3.72).
    const double k = static_cast<double>(ps.paths().size()) - 1.0;
    if (k < 1) continue;
    const double z = 3.72;
    const double bound = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3.0);
    EXPECT_LT(chi2, bound + 10.0) << sc.name << " with " << ps.paths().size() << " paths";
  }
}

TEST(ApplyCensoring, NoneKeepsThePath) {
  const StatePath u(1, {{1.0, 2}, {3.0, 3}});
  SubjectRng rng(1, 0, SubjectRng::Purpose::kObservation);
  const EventHistory x = apply_censoring(rng, 5, u, {}, idn_scenario());
  EXPECT_EQ(x.subject(), 5);
  EXPECT_EQ(x.jumps(), u.jumps());
}

TEST(ApplyCensoring, DeterministicRightCensoring) {
  CensoringConfig c;
  c.kind = CensoringKind::kIndependentRight;
  c.censor_times = {2.0};
  c.censor_probs = {1.0};
  const StatePath u(1, {{3.0, 2}});
  SubjectRng rng(1, 0, SubjectRng::Purpose::kObservation);
  const EventHistory x = apply_censoring(rng, 0, u, c, idn_scenario());
  ASSERT_EQ(x.jumps().size(), 1u);
  EXPECT_EQ(x.jumps()[0], (Jump{2.0, 0}));
}

TEST(ApplyCensoringProperty, ObservedStatesAreTrueStates) {
  std::mt19937_64 gen(67);
  std::vector<CensoringConfig> cfgs(4);
  cfgs[1].kind = CensoringKind::kIndependentRight;
  cfgs[1].censor_times = {0.5, 1.0, 2.5};
  cfgs[1].censor_probs = {0.2, 0.2, 0.2};
  cfgs[2].kind = CensoringKind::kFilteringConforming;
  cfgs[2].q = 0.6;
  cfgs[3].kind = CensoringKind::kViolating;
  cfgs[3].q = 0.8;
  cfgs[3].delta = 0.5;
  for (int trial = 0; trial < 200; ++trial) {
    const ScenarioConfig sc = random_scenario(gen);
    for (const auto& c : cfgs) {
      SubjectRng prng(trial, 0, SubjectRng::Purpose::kPath);
      SubjectRng orng(trial, 0, SubjectRng::Purpose::kObservation);
      const StatePath u = sample_path(prng, sc);
      const EventHistory x = apply_censoring(orng, 0, u, c, sc);
      for (double t = 0.0; t <= sc.tau; t += 0.25) {
        ASSERT_TRUE(x.at(t) == 0 || x.at(t) == u.at(t));
        ASSERT_TRUE(x.before(t) == 0 || x.before(t) == u.before(t));
      }
      if (c.kind == CensoringKind::kFilteringConforming || c.kind == CensoringKind::kViolating) {
        // Observation status never changes at a grid time.
        for (Time g : sc.grid) ASSERT_EQ(x.at(g) == 0, x.before(g) == 0);
      }
    }
  }
}

TEST(ApplyCensoring, ConformingFilteringPreservesHazard) {
  CensoringConfig c;
  c.kind = CensoringKind::kFilteringConforming;
  c.q = 0.7;
  const Sample s = simulate_sample(idn_scenario(), c, 10000, 7);
  const EstimateGrid g = nelson_aalen(s, 3, 3.0);
  const AdditiveIF lambda = g.hazard_if();
  EXPECT_NEAR(lambda.jump_at(1.0)(0, 1), 0.5, 0.03);
  EXPECT_NEAR(lambda.jump_at(2.0)(0, 1), 0.5, 0.03);
  EXPECT_NEAR(lambda.jump_at(3.0)(1, 2), 0.6, 0.03);
}

TEST(ApplyCensoring, ViolatingMechanismBiasesTheHazard) {
  CensoringConfig c;
  c.kind = CensoringKind::kViolating;
  c.q = 0.7;
  c.delta = 0.5;
  const Sample s = simulate_sample(idn_scenario(), c, 20000, 7);
  const AdditiveIF lambda = nelson_aalen(s, 3, 3.0).hazard_if();
  EXPECT_GT(std::abs(lambda.jump_at(1.0)(0, 1) - 0.5), 0.5 * 0.5 * 0.5);
  EXPECT_GT(std::abs(lambda.jump_at(3.0)(1, 2) - 0.6), 0.5 * 0.5 * 0.6);
}

TEST(ExactPathspace, Examples) {
  const PathSpace idn = exact_pathspace(idn_scenario());
  EXPECT_EQ(sorted_weights(idn).size(), 5u);
  const std::vector<double> expect{0.05, 0.1, 0.2, 0.25, 0.4};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_NEAR(sorted_weights(idn)[i], expect[i], 1e-15);

  const PathSpace still = exact_pathspace(still_markov());
  ASSERT_EQ(still.paths().size(), 1u);
  EXPECT_EQ(still.paths()[0].weight, 1.0);

  const PathSpace surv = exact_pathspace(surv_scenario());
  EXPECT_EQ(sorted_weights(surv), (std::vector<double>{0.5, 0.5}));
}

TEST(ExactPathspace, CapIsEnforced) {
  EXPECT_THROW(exact_pathspace(idn_scenario(), 3), PathSpaceTooLarge);
}

TEST(ExactPathspace, WeightsSumToOne) {
  for (const auto& s : random_corpus(71, 100)) {
    const PathSpace ps = exact_pathspace(s);
    double total = 0.0;
    for (const auto& p : ps.paths()) total += p.weight;
    ASSERT_NEAR(total, 1.0, 1e-12);
  }
}
