#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "msint/io.hpp"
#include "msint/multistate.hpp"
#include "msint/simulation.hpp"

namespace msint {

struct CheckRecord {
  std::string name;
  std::string anchor;  ///< the identity or bound being checked
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  bool pass = false;
};

struct ConvergenceRow {
  std::string arm;
  std::size_t n = 0;
  double sup_error = 0.0;
};

struct RunReport {
  std::string command;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<CheckRecord> records;
  std::vector<ConvergenceRow> convergence;
  double seconds = 0.0;

  bool ok() const;
  std::size_t failures() const;
  /// Appends another report's records and rows.
  void merge(const RunReport& other);
};

json to_json(const RunReport& r);

/// Hex FNV-1a digest of a JSON document's compact dump.
std::string digest(const json& doc);

/// Named tolerances; every check reads its tolerance from here.
struct Tolerances {
  std::map<std::string, double> values = {
      {"occupation_identity", 1e-10},
      {"hazard_transform", 1e-10},
      {"product_integral", 1e-10},
      {"counting_transform", 1e-10},
      {"duality", 1e-10},
      {"kolmogorov", 1e-12},
      {"markov", 1e-10},
      {"lower_bound", 1e-12},
      {"extinction", 1e-12},
      {"convergence_final", 0.02},
      {"violating_floor", 0.05},
  };

  double at(const std::string& name) const;
  /// Overrides one entry; throws std::invalid_argument for unknown names.
  void set(const std::string& name, double value);
};

/// Grid times plus 0: the points where step functions on the path space may change.
std::vector<Time> knots(const PathSpace& ps);

/// Every interval with endpoints s < t among the knots, in all four endpoint shapes.
std::vector<Interval> knot_intervals(const PathSpace& ps);

// Suites. Each returns one record per checked quantity; `label` prefixes the names.

/// p(0) prodint_(0,t](1 + Lambda) against p(t) at every grid time.
std::vector<CheckRecord> check_occupation_identity(const PathSpace& ps, const std::string& label,
                                                   const Tolerances& tol = {});

/// Defect of (P - 1) against Lambda on the horizon along the trivial-start
/// halving schedule. Checks that the sweep never increases and ends below
/// tolerance. The sweep itself is returned through `sweep` when non-null.
std::vector<CheckRecord> check_hazard_transform(const PathSpace& ps, const std::string& label,
                                                const Tolerances& tol = {},
                                                std::vector<double>* sweep = nullptr);

/// The multiplicative transform of P equals the product integral of Lambda on
/// every knot interval, whether or not P itself is multiplicative.
std::vector<CheckRecord> check_transition_transform(const PathSpace& ps, const std::string& label,
                                                    const Tolerances& tol = {});

/// sum over cells of |Q_jk(B) - F_jk(B)| on the Young partition of the grid, all j != k.
std::vector<CheckRecord> check_counting_transform(const PathSpace& ps, const std::string& label,
                                                  const Tolerances& tol = {});

/// Integral of 1/p_j(u-) against F_jk equals Lambda_jk on every knot interval,
/// and its norm stays below sup|f| times the variation of F_jk.
std::vector<CheckRecord> check_kolmogorov(const PathSpace& ps, const std::string& label,
                                          const Tolerances& tol = {});

/// P(a) = prodint_a(1 + Lambda) on every knot interval, for the rows whose
/// conditioning event has positive probability (Markov scenarios).
std::vector<CheckRecord> check_markov(const PathSpace& ps, const std::string& label,
                                      const Tolerances& tol = {});

/// Occupation lower bound for every state and knot pair s <= t.
std::vector<CheckRecord> check_lower_bound(const PathSpace& ps, const std::string& label,
                                           const Tolerances& tol = {});

/// Exit hazard equals one wherever an occupation drops to zero.
std::vector<CheckRecord> check_extinction(const PathSpace& ps, const std::string& label,
                                          const Tolerances& tol = {});

/// Transform of (1 + mu) against the exact product integral on each interval,
/// plus the variation bound on each.
std::vector<CheckRecord> check_duality(const AdditiveIF& mu, const std::vector<Interval>& intervals,
                                       const std::string& label, const Tolerances& tol = {});

// Randomized instances.

/// `count` random grid scenarios from one generator seeded with `seed`.
std::vector<ScenarioConfig> random_corpus(std::uint64_t seed, std::size_t count,
                                          const RandomScenarioOptions& opts = {});

/// Pure-jump d x d function (d <= max_d) with 1..max_atoms atoms on integer
/// times in (0, 8], each atom's op-norm at most max_norm.
AdditiveIF random_pure_jump(std::mt19937_64& gen, int max_d = 4, int max_atoms = 6,
                            double max_norm = 0.9);

/// Random subinterval of (0, 8] with endpoints on the half-integer lattice and a random shape.
Interval random_subinterval(std::mt19937_64& gen);

/// Names accepted by run_suites; aliases map onto these.
const std::vector<std::string>& suite_names();
std::string canonical_suite(const std::string& name);

/// Runs the named suites (all if empty) on one path space.
std::vector<CheckRecord> run_suites(const PathSpace& ps, const std::string& label, bool markov,
                                    const std::vector<std::string>& only, const Tolerances& tol = {});

struct ConvergenceOptions {
  std::vector<std::size_t> ns = {100, 1000, 10000};
  std::uint64_t seed = 7;
};

/// sup over the knots of ||p_hat(t) - p(t)||_inf for one simulated sample.
double occupation_sup_error(const PathSpace& oracle, const Sample& sample);

/// Simulates each n under the conforming mechanism (and the violating one if
/// given), estimates and compares with the oracle. Records the monotonicity
/// and final-size checks for the conforming arm and the bias floor for the
/// violating arm at the largest n.
RunReport run_convergence(const ScenarioConfig& scenario, const CensoringConfig& conforming,
                          const CensoringConfig* violating, const ConvergenceOptions& opts,
                          const Tolerances& tol = {});

}  // namespace msint
