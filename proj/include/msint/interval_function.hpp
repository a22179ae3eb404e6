#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "msint/interval.hpp"
#include "msint/matrix.hpp"

namespace msint {

/// Point mass of an additive interval function.
struct Atom {
  Time t;
  Matrix jump;
};

/// Constant matrix intensity on the half-open piece (lo, hi].
struct DensityPiece {
  Time lo;
  Time hi;
  Matrix intensity;
};

/// Additive matrix-valued interval function made of finitely many atoms plus a
/// piecewise-constant density. Evaluation and variation are exact.
class AdditiveIF {
 public:
  AdditiveIF(Eigen::Index dim, std::vector<Atom> atoms, std::vector<DensityPiece> density = {});

  static AdditiveIF zero(Eigen::Index dim) { return AdditiveIF(dim, {}); }
  /// 1x1 function with the given (time, mass) atoms.
  static AdditiveIF scalar(std::span<const std::pair<Time, double>> atoms);

  Eigen::Index dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& density() const { return density_; }
  bool pure_jump() const { return density_.empty(); }

  Matrix operator()(const Interval& a) const;

  /// Exact variation on a: atom norms plus intensity norms times covered length.
  double variation(const Interval& a) const;

  /// Mass at the single time t (zero matrix if there is no atom).
  Matrix jump_at(Time t) const;

  /// Atom times and density breakpoints, sorted and deduplicated.
  std::vector<Time> support() const;

  /// Entry (j, k) as a 1x1 function.
  AdditiveIF entry(Eigen::Index j, Eigen::Index k) const;

 private:
  Eigen::Index dim_;
  std::vector<Atom> atoms_;
  std::vector<DensityPiece> density_;
};

using IntervalEvaluator = std::function<Matrix(const Interval&)>;

/// Arbitrary interval function given by an evaluator and a declared list of
/// times where its one-sided limits may differ.
class GeneralIF {
 public:
  GeneralIF(Eigen::Index dim, IntervalEvaluator eval, std::vector<Time> support,
            std::optional<double> variation_hint = std::nullopt);

  /// View an additive function as a general one.
  static GeneralIF from(const AdditiveIF& mu);

  Eigen::Index dim() const { return dim_; }
  const std::vector<Time>& support() const { return support_; }
  std::optional<double> variation_hint() const { return variation_hint_; }

  Matrix operator()(const Interval& a) const { return eval_(a); }

  /// A -> f(A) + shift * identity.
  GeneralIF shifted(double shift) const;

  /// Entry (j, k) as a 1x1 function.
  GeneralIF entry(Eigen::Index j, Eigen::Index k) const;

 private:
  Eigen::Index dim_;
  IntervalEvaluator eval_;
  std::vector<Time> support_;
  std::optional<double> variation_hint_;
};

/// A -> identity + mu(A).
GeneralIF identity_plus(const AdditiveIF& mu);

/// A -> prodint_additive(mu, A); the multiplicative transform of identity + mu.
GeneralIF product_integral_if(const AdditiveIF& mu);

// ---------------------------------------------------------------------------
// Limits over refinements
// ---------------------------------------------------------------------------

/// Where a refinement schedule starts before halving.
enum class ScheduleStart {
  kYoungOnSupport,  ///< singletons at the support times inside the interval
  kTrivial,         ///< the one-cell partition
};

/// Partition number `depth` of the schedule: the start partition with every
/// non-degenerate cell halved `depth` times.
Partition schedule_partition(std::span<const Time> support, const Interval& a, int depth,
                             ScheduleStart start = ScheduleStart::kYoungOnSupport);

struct TransformOptions {
  double tol = 1e-10;
  int max_depth = 24;
};

struct TransformResult {
  Matrix value;
  int depth = 0;         ///< schedule depth at which the value was taken
  double change = 0.0;   ///< op_norm of the last successive difference
  bool converged = false;

  /// The value, or throws ConvergenceError if the schedule did not settle.
  const Matrix& value_or_throw() const;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Limit over refinements of the sums of f over cells of a.
TransformResult additive_transform(const GeneralIF& f, const Interval& a,
                                   const TransformOptions& opts = {});

/// Limit over refinements of the left-to-right ordered products f(B1) f(B2) ... f(Bm).
TransformResult multiplicative_transform(const GeneralIF& f, const Interval& a,
                                         const TransformOptions& opts = {});

/// Exact variation of an additive function on a.
double variation_norm(const AdditiveIF& mu, const Interval& a);

/// Largest cell-norm sum over schedule partitions 0..depth. This is a lower
/// bound for the variation of f on a and is nondecreasing in depth.
double variation_norm(const GeneralIF& f, const Interval& a, int depth);

/// Sum over cells of p of ||f(B) - target(B)||.
double strict_transform_defect(const GeneralIF& f, const GeneralIF& target, const Partition& p);
double strict_transform_defect(const GeneralIF& f, const AdditiveIF& target, const Partition& p);

/// Defect at schedule depths 0..max_depth. The support used is the union of
/// both functions' supports.
std::vector<double> defect_sweep(const GeneralIF& f, const GeneralIF& target, const Interval& a,
                                 int max_depth, ScheduleStart start = ScheduleStart::kTrivial);

// ---------------------------------------------------------------------------
// Exact product integration and integration against additive functions
// ---------------------------------------------------------------------------

/// Ordered product integral of (identity + mu(du)) over a. Atoms contribute
/// (identity + jump); density pieces contribute matrix exponentials.
Matrix prodint_additive(const AdditiveIF& mu, const Interval& a);

/// Regulated step function with finitely many declared breakpoints.
class StepFunction {
 public:
  struct Break {
    Time t;
    double left;   ///< limit from the left at t
    double value;  ///< value at t
    double right;  ///< limit from the right at t
  };

  /// `before` is the value ahead of the first breakpoint. Throws
  /// std::invalid_argument if adjacent one-sided limits disagree, which would
  /// mean a jump at an undeclared point.
  explicit StepFunction(double before, std::vector<Break> breaks = {});

  double operator()(Time t) const;
  double left_limit(Time t) const;
  double right_limit(Time t) const;
  double sup_abs(const Interval& a) const;
  const std::vector<Break>& breaks() const { return breaks_; }

 private:
  /// Value on the open gap containing t (t must not be a breakpoint).
  double gap_value(Time t) const;

  double before_;
  std::vector<Break> breaks_;
};

/// Integral of a step function against an additive function over a.
Matrix kolmogorov_integral(const StepFunction& f, const AdditiveIF& mu, const Interval& a);

struct BoundCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool ok = false;
};

/// Compares the variation of (prodint(mu) - identity) on a with
/// exp(V) * V, V the exact variation of mu on a. The left side is the
/// maximum over groupings of consecutive elementary factors (atoms, and
/// density pieces cut into `density_cuts` equal parts), which is the exact
/// variation when mu is pure-jump.
BoundCheck check_duality_bound(const AdditiveIF& mu, const Interval& a, int density_cuts = 16);

}  // namespace msint
