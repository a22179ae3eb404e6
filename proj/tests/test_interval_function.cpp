#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "msint/interval_function.hpp"
#include "msint/verify.hpp"

using namespace msint;

namespace {

AdditiveIF scalar_atoms(std::initializer_list<std::pair<Time, double>> atoms) {
  std::vector<std::pair<Time, double>> v(atoms);
  return AdditiveIF::scalar(v);
}

Matrix m1(double x) { return Matrix::Constant(1, 1, x); }

/// Ordered product over an explicit partition, for cross-checking transforms.
Matrix product_over(const GeneralIF& f, const Partition& p) {
  Matrix prod = identity(f.dim());
  for (const auto& c : p) prod = prod * f(c);
  return prod;
}

}  // namespace

TEST(AdditiveIF, EvaluatesAtomsAndDensity) {
  const AdditiveIF mu(1, {{1.0, m1(0.5)}}, {{0.0, 2.0, m1(0.25)}});
  EXPECT_DOUBLE_EQ(mu(Interval::left_open(0, 2))(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(mu(Interval::open(0, 1))(0, 0), 0.25);
  EXPECT_DOUBLE_EQ(mu(Interval::point(1))(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(mu(Interval::point(0.5))(0, 0), 0.0);
}

TEST(AdditiveIF, RejectsMalformedInput) {
  EXPECT_THROW(AdditiveIF(2, {{1.0, m1(1.0)}}), std::invalid_argument);
  EXPECT_THROW(AdditiveIF(1, {{1.0, m1(1.0)}, {1.0, m1(2.0)}}), std::invalid_argument);
  EXPECT_THROW(AdditiveIF(1, {}, {{0.0, 2.0, m1(1)}, {1.0, 3.0, m1(1)}}), std::invalid_argument);
  EXPECT_THROW(AdditiveIF(1, {}, {{1.0, 1.0, m1(1)}}), std::invalid_argument);
}

TEST(AdditiveIF, UpperContinuousAtEmptySet) {
  const AdditiveIF mu(1, {{1.0, m1(0.5)}}, {{0.0, 2.0, m1(3.0)}});
  double prev = INFINITY;
  for (double eps = 0.5; eps > 1e-9; eps /= 4) {
    const double v = std::abs(mu(Interval::open(1.0, 1.0 + eps))(0, 0));
    EXPECT_LT(v, prev);
    prev = v;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(VariationNorm, AtomNormsAdd) {
  EXPECT_DOUBLE_EQ(variation_norm(scalar_atoms({{1, 0.5}, {2, 0.25}}), Interval::left_open(0, 3)), 0.75);
  EXPECT_DOUBLE_EQ(variation_norm(scalar_atoms({{1, -0.5}, {2, 0.25}}), Interval::left_open(0, 3)), 0.75);
}

TEST(VariationNorm, GeneralLowerBoundIsMonotoneInDepth) {
  const AdditiveIF mu(1, {{1.0, m1(-0.5)}}, {{0.0, 3.0, m1(0.2)}});
  const GeneralIF g = GeneralIF::from(mu);
  double prev = 0.0;
  for (int depth = 0; depth < 6; ++depth) {
    const double v = variation_norm(g, Interval::left_open(0, 3), depth);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, mu.variation(Interval::left_open(0, 3)) + 1e-12);
    prev = v;
  }
}

TEST(Transforms, AdditiveFunctionIsItsOwnTransform) {
  const AdditiveIF mu = scalar_atoms({{1, 0.5}});
  const auto r = additive_transform(GeneralIF::from(mu), Interval::left_open(0, 2));
  EXPECT_TRUE(r.converged);
  EXPECT_DOUBLE_EQ(r.value(0, 0), 0.5);
}

TEST(Transforms, SingleAtomProduct) {
  const auto r = multiplicative_transform(identity_plus(scalar_atoms({{1, 0.5}})), Interval::left_open(0, 2));
  EXPECT_TRUE(r.converged);
  EXPECT_DOUBLE_EQ(r.value(0, 0), 1.5);
}

TEST(Transforms, DensityProductConvergesToExponential) {
  const AdditiveIF mu(1, {}, {{0.0, 1.0, m1(0.7)}});
  // Products over n equal cells approach exp(0.7) at rate 1/n, so only a
  // loose tolerance is reachable here.
  TransformOptions opts;
  opts.tol = 1e-5;
  const auto r = multiplicative_transform(identity_plus(mu), Interval::left_open(0, 1), opts);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value(0, 0), std::exp(0.7), 1e-4);
  EXPECT_LT(r.value(0, 0), std::exp(0.7));
}

TEST(Transforms, NonConvergenceIsReported) {
  // Oscillating evaluator: the cell sums never settle.
  const GeneralIF bad(1, [](const Interval& a) { return m1(a.is_singleton() ? 1.0 : 0.0); }, {});
  TransformOptions opts;
  opts.max_depth = 4;
  const auto r = additive_transform(bad, Interval::left_open(0, 1), opts);
  EXPECT_FALSE(r.converged);
  EXPECT_THROW(r.value_or_throw(), ConvergenceError);
}

TEST(StrictDefect, SelfTransformHasNoDefect) {
  const AdditiveIF mu = scalar_atoms({{1, 0.5}, {2, -0.3}});
  const Partition p = schedule_partition(mu.support(), Interval::left_open(0, 3), 2);
  EXPECT_DOUBLE_EQ(strict_transform_defect(GeneralIF::from(mu), mu, p), 0.0);
}

TEST(ProductIntegral, Examples) {
  EXPECT_DOUBLE_EQ(prodint_additive(scalar_atoms({{1, -1.0}}), Interval::left_open(0, 2))(0, 0), 0.0);
  const AdditiveIF c(1, {}, {{0.0, 1.0, m1(0.8)}});
  EXPECT_NEAR(prodint_additive(c, Interval::left_open(0, 1))(0, 0), std::exp(0.8), 1e-14);
  EXPECT_DOUBLE_EQ(prodint_additive(AdditiveIF::zero(3), Interval::left_open(0, 1)).trace(), 3.0);
}

TEST(ProductIntegral, AtomAtDensityStartComesFirst) {
  // Non-commuting factors: the atom at 1 must multiply before the density on (1,2].
  Matrix jump(2, 2);
  jump << 0, 0.5, 0, 0;
  Matrix rate(2, 2);
  rate << 0, 0, 0.3, 0;
  const AdditiveIF mu(2, {{1.0, jump}}, {{1.0, 2.0, rate}});
  const Matrix expect = (identity(2) + jump) * expm(rate);
  EXPECT_LT(max_abs(prodint_additive(mu, Interval::closed(1, 2)) - expect), 1e-14);
}

TEST(ProductIntegral, MultiplicativeOverSplits) {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 200; ++trial) {
    const AdditiveIF mu = random_pure_jump(gen);
    const double cut = 0.5 * std::uniform_int_distribution<int>(1, 15)(gen);
    const Matrix whole = prodint_additive(mu, Interval::left_open(0, 8));
    const Matrix split =
        prodint_additive(mu, Interval::left_open(0, cut)) * prodint_additive(mu, Interval::left_open(cut, 8));
    ASSERT_LT(max_abs(whole - split), 1e-12);
    const Matrix young = prodint_additive(mu, Interval::open(0, cut)) *
                         prodint_additive(mu, Interval::point(cut)) *
                         prodint_additive(mu, Interval::left_open(cut, 8));
    ASSERT_LT(max_abs(whole - young), 1e-12);
  }
}

TEST(ProductIntegral, TransformMatchesOnRandomSubintervals) {
  std::mt19937_64 gen(5);
  for (int trial = 0; trial < 100; ++trial) {
    const AdditiveIF mu = random_pure_jump(gen);
    for (int k = 0; k < 10; ++k) {
      const Interval a = random_subinterval(gen);
      const auto r = multiplicative_transform(identity_plus(mu), a);
      ASSERT_TRUE(r.converged);
      ASSERT_LT(max_abs(r.value - prodint_additive(mu, a)), 1e-10) << a.to_string();
    }
  }
}

TEST(StepFunction, LimitsAndValues) {
  const StepFunction f(1.0, {{1.0, 1.0, 5.0, 2.0}, {2.0, 2.0, 2.0, 0.0}});
  EXPECT_DOUBLE_EQ(f(0.5), 1.0);
  EXPECT_DOUBLE_EQ(f(1.0), 5.0);
  EXPECT_DOUBLE_EQ(f.left_limit(1.0), 1.0);
  EXPECT_DOUBLE_EQ(f.right_limit(1.0), 2.0);
  EXPECT_DOUBLE_EQ(f(3.0), 0.0);
  EXPECT_DOUBLE_EQ(f.sup_abs(Interval::open(1, 3)), 2.0);
  EXPECT_DOUBLE_EQ(f.sup_abs(Interval::closed(1, 3)), 5.0);
  EXPECT_THROW(StepFunction(1.0, {{1.0, 0.0, 1.0, 1.0}}), std::invalid_argument);
}

TEST(KolmogorovIntegral, Examples) {
  const AdditiveIF mu = scalar_atoms({{1, 0.5}});
  EXPECT_DOUBLE_EQ(kolmogorov_integral(StepFunction(1.0), mu, Interval::left_open(0, 2))(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(kolmogorov_integral(StepFunction(0.0), mu, Interval::left_open(0, 2))(0, 0), 0.0);
}

TEST(KolmogorovIntegral, DensityPieceIntegratesStepwise) {
  const AdditiveIF mu(1, {}, {{0.0, 4.0, m1(1.0)}});
  const StepFunction f(2.0, {{1.0, 2.0, 9.0, -1.0}});
  // 2 on (0,1), -1 on (1,3]; the value at the single point 1 does not matter.
  EXPECT_DOUBLE_EQ(kolmogorov_integral(f, mu, Interval::left_open(0, 3))(0, 0), 2.0 - 2.0);
}

TEST(KolmogorovIntegral, SupBoundProperty) {
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> val(-3.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const AdditiveIF mu = random_pure_jump(gen);
    std::vector<StepFunction::Break> breaks;
    double prev = val(gen);
    const double before = prev;
    for (int t = 1; t <= 8; ++t) {
      const double right = val(gen);
      breaks.push_back({static_cast<double>(t), prev, val(gen), right});
      prev = right;
    }
    const StepFunction f(before, breaks);
    const Interval a = random_subinterval(gen);
    const double lhs = op_norm(kolmogorov_integral(f, mu, a));
    ASSERT_LE(lhs, f.sup_abs(a) * mu.variation(a) + 1e-12);
  }
}

TEST(DualityBound, Examples) {
  const BoundCheck zero = check_duality_bound(AdditiveIF::zero(2), Interval::left_open(0, 1));
  EXPECT_EQ(zero.lhs, 0.0);
  EXPECT_EQ(zero.rhs, 0.0);
  EXPECT_TRUE(zero.ok);

  const BoundCheck one = check_duality_bound(scalar_atoms({{1, 0.5}}), Interval::left_open(0, 2));
  EXPECT_DOUBLE_EQ(one.lhs, 0.5);
  EXPECT_NEAR(one.rhs, 0.5 * std::exp(0.5), 1e-15);
  EXPECT_TRUE(one.ok);
}

TEST(DualityBound, LeftSideIsTheExactVariationForPureJump) {
  // Brute force: the best grouping over all 2^(m-1) ways of cutting m factors.
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 100; ++trial) {
    const AdditiveIF mu = random_pure_jump(gen);
    const Interval a = Interval::left_open(0, 8);
    std::vector<Matrix> f;
    for (const auto& atom : mu.atoms()) f.push_back(identity(mu.dim()) + atom.jump);
    const std::size_t m = f.size();
    double best = 0.0;
    for (unsigned mask = 0; mask < (1u << (m - 1)); ++mask) {
      double sum = 0.0;
      Matrix block = identity(mu.dim());
      for (std::size_t i = 0; i < m; ++i) {
        block = block * f[i];
        if (i + 1 == m || (mask >> i) & 1u) {
          sum += op_norm(block - identity(mu.dim()));
          block = identity(mu.dim());
        }
      }
      best = std::max(best, sum);
    }
    const BoundCheck c = check_duality_bound(mu, a);
    ASSERT_NEAR(c.lhs, best, 1e-12);
    ASSERT_TRUE(c.ok);
    // Any explicit partition gives a lower bound for the same quantity.
    const GeneralIF pi = product_integral_if(mu);
    const Partition p = young_partition(mu.support(), a);
    double cells = 0.0;
    for (const auto& cell : p) cells += op_norm(pi(cell) - identity(mu.dim()));
    ASSERT_LE(cells, c.lhs + 1e-12);
    ASSERT_LT(max_abs(product_over(pi, p) - prodint_additive(mu, a)), 1e-12);
  }
}

TEST(DualityBound, DensityInstances) {
  std::mt19937_64 gen(29);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix rate(2, 2);
    rate << entry(gen), entry(gen), entry(gen), entry(gen);
    const AdditiveIF mu(2, {{1.0, 0.4 * identity(2)}}, {{0.0, 2.0, rate}});
    const BoundCheck c = check_duality_bound(mu, Interval::left_open(0, 2));
    ASSERT_TRUE(c.ok) << c.lhs << " vs " << c.rhs;
  }
}
