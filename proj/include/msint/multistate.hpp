#pragma once

#include <string>
#include <vector>

#include "msint/interval_function.hpp"

namespace msint {

/// States are numbered 1..d. State 0 is reserved for "unobserved" in
/// observed histories and never appears in a StatePath.
using State = int;

enum class Side { kRight, kLeft };

struct Jump {
  Time t;
  State to;
  friend bool operator==(const Jump&, const Jump&) = default;
};

/// Right-continuous piecewise-constant trajectory.
class StatePath {
 public:
  StatePath(State initial, std::vector<Jump> jumps = {});

  State initial() const { return initial_; }
  const std::vector<Jump>& jumps() const { return jumps_; }

  /// U(t); U(t) = initial for t < first jump.
  State at(Time t) const;
  /// U(t-), with U(0-) = U(0).
  State before(Time t) const;
  State at(Time t, Side side) const { return side == Side::kRight ? at(t) : before(t); }

  friend bool operator==(const StatePath&, const StatePath&) = default;

 private:
  State initial_;
  std::vector<Jump> jumps_;
};

struct WeightedPath {
  StatePath path;
  double weight;
};

/// Finitely supported law of a multi-state process on (0, tau].
class PathSpace {
 public:
  PathSpace(int d, Time tau, std::vector<Time> grid, std::vector<WeightedPath> paths);

  int d() const { return d_; }
  Time tau() const { return tau_; }
  /// Declared jump grid; every path jump lies on it.
  const std::vector<Time>& grid() const { return grid_; }
  const std::vector<WeightedPath>& paths() const { return paths_; }

  /// J = (0, tau].
  Interval horizon() const { return Interval::left_open(0.0, tau_); }

 private:
  int d_;
  Time tau_;
  std::vector<Time> grid_;
  std::vector<WeightedPath> paths_;
};

/// p_j(t) or p_j(t-).
double occupation(const PathSpace& ps, State j, Time t, Side side = Side::kRight);
RowVector occupation_vector(const PathSpace& ps, Time t, Side side = Side::kRight);

/// P_jk(a) with the endpoint convention implied by a's closedness: a closed
/// left end conditions on U(s-), an open one on U(s); a closed right end
/// reads U(t), an open one U(t-). Returns 1{j=k} when the condition has
/// probability zero.
double transition_if(const PathSpace& ps, State j, State k, const Interval& a);
Matrix transition_matrix(const PathSpace& ps, const Interval& a);
/// P as a general interval function with support on the grid.
GeneralIF transition_function(const PathSpace& ps);

/// F_jk(a): expected number of direct j->k jumps in a.
double counting_mean(const PathSpace& ps, State j, State k, const Interval& a);
/// Q_jk(a): expectation of the indicator M_jk(a).
double indicator_mean(const PathSpace& ps, State j, State k, const Interval& a);
/// d x d interval functions F and Q (zero diagonal).
AdditiveIF counting_mean_if(const PathSpace& ps);
GeneralIF indicator_mean_if(const PathSpace& ps);

/// Cumulative transition hazard matrix: atoms F_jk([u,u]) / p_j(u-), diagonal
/// minus the off-diagonal row sum.
class HazardMatrixIF {
 public:
  /// Validates the hazard-matrix shape constraints.
  explicit HazardMatrixIF(AdditiveIF lambda);

  const AdditiveIF& lambda() const { return lambda_; }
  operator const AdditiveIF&() const { return lambda_; }  // NOLINT

  /// Total exit hazard Lambda_{j.} of one state, as a 1x1 function.
  AdditiveIF exit_hazard(State j) const;

 private:
  AdditiveIF lambda_;
};

class InconsistentPathSpace : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

HazardMatrixIF hazard(const PathSpace& ps);

/// p(s) P((t0,t1]) ... P((t_{m-1},t_m]) with t0 = s, tm = t and the given
/// interior cuts. Cuts equal to s or t are ignored.
RowVector iterated_product(const PathSpace& ps, Time s, Time t, const std::vector<Time>& cuts);

/// 1/p_j(u-) as a step function, zero where p_j(u-) = 0.
StepFunction inverse_left_occupation(const PathSpace& ps, State j);

/// p_j(t) >= p_j(s) prodint_(s,t] (1 - Lambda_{j.}(du)).
BoundCheck check_occupation_lower_bound(const PathSpace& ps, State j, Time s, Time t);

struct ExtinctionBoundary {
  Time t;
  double occupation_before;  ///< p_j(t-)
  double exit_hazard;        ///< sum over k != j of Lambda_jk([t,t])
  bool ok;
};

struct ExtinctionReport {
  State j;
  std::vector<ExtinctionBoundary> boundaries;
  bool ok() const;
  std::string summary() const;
};

/// Scans the times where p_j drops from positive to zero. On a finite path
/// space every such boundary must have p_j(t-) > 0 and total exit hazard 1.
ExtinctionReport check_extinction_dichotomy(const PathSpace& ps, State j);

}  // namespace msint
