#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "msint/estimators.hpp"
#include "msint/multistate.hpp"

namespace msint {

/// What the transition probabilities at a grid time may depend on.
enum class RuleKind {
  kMarkov,      ///< current state only
  kEntryTime,   ///< current state and the time it was entered (0 for the initial state)
  kDuration,    ///< current state and the number of grid steps spent in it
};

/// One entry of a transition table. Missing `time` matches every grid time and
/// missing `key` matches every history feature; more specific rules win.
struct TransitionRule {
  std::optional<Time> time;
  State from = 1;
  State to = 2;
  double prob = 0.0;
  std::optional<double> key;
};

/// A process that can only jump at the grid times, with per-time tables.
struct ScenarioConfig {
  std::string name;
  int d = 1;
  Time tau = 1.0;
  std::vector<Time> grid;
  RuleKind kind = RuleKind::kMarkov;
  std::vector<TransitionRule> rules;
  std::vector<double> initial;

  /// Throws std::invalid_argument on malformed tables.
  void validate() const;

  /// Jump probabilities to states 1..d (index 0..d-1; the own state is 0) at
  /// grid index `g` from `from` given the history feature.
  std::vector<double> jump_row(std::size_t g, State from, double feature) const;

  /// Feature values that can occur at grid index g.
  std::vector<double> feature_values(std::size_t g) const;
};

enum class CensoringKind {
  kNone,
  kIndependentRight,  ///< X = U before an independent censoring time C, 0 from C on
  kFilteringConforming,
  kViolating,
};

/// Observation mechanism. For the filtering kinds the observation status is
/// constant on slots whose boundaries are the midpoints between consecutive
/// grid times (and 0), so status never changes at a grid time.
struct CensoringConfig {
  CensoringKind kind = CensoringKind::kNone;
  /// Censoring-time distribution for kIndependentRight; leftover mass is C = infinity.
  std::vector<Time> censor_times;
  std::vector<double> censor_probs;
  /// Per-slot observation probability.
  double q = 1.0;
  /// kViolating: a slot whose grid time carries a transition is observed with probability q(1 - delta).
  double delta = 0.0;

  void validate() const;
};

/// Random source for one subject. Each (seed, subject, purpose) triple gets its
/// own mt19937_64 seeded through SplitMix64, so results do not depend on the
/// order in which subjects are simulated.
class SubjectRng {
 public:
  enum class Purpose : std::uint64_t { kPath = 1, kObservation = 2, kScenario = 3 };

  SubjectRng(std::uint64_t seed, std::uint64_t subject, Purpose purpose);

  /// Uniform on [0, 1) from the top 53 bits of one draw.
  double uniform();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

StatePath sample_path(SubjectRng& rng, const ScenarioConfig& scenario);

EventHistory apply_censoring(SubjectRng& rng, std::int64_t subject, const StatePath& path,
                             const CensoringConfig& cfg, const ScenarioConfig& scenario);

/// n subjects with ids 0..n-1.
Sample simulate_sample(const ScenarioConfig& scenario, const CensoringConfig& cfg, std::size_t n,
                       std::uint64_t seed);

class PathSpaceTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Every history with positive probability and its exact weight.
PathSpace exact_pathspace(const ScenarioConfig& scenario, std::size_t max_paths = 1'000'000);

// ---------------------------------------------------------------------------
// Reference scenarios
// ---------------------------------------------------------------------------

/// Illness-death model whose death hazard depends on the illness entry time:
/// 1->2 w.p. 0.5 at t=1 and t=2; 2->3 at t=3 w.p. 0.8 (entered at 1) or 0.2 (entered at 2).
ScenarioConfig idn_scenario();

/// Two-state survival model with a single 1->2 jump w.p. 0.5 at t=1.
ScenarioConfig surv_scenario();

struct RandomScenarioOptions {
  int min_d = 2;
  int max_d = 4;
  int min_grid = 2;
  int max_grid = 4;
  std::optional<RuleKind> kind;
  bool progressive = false;    ///< jumps only to higher-numbered states
  double forced_exit_rate = 0.15;  ///< chance that a table row exits with total probability 1
};

ScenarioConfig random_scenario(std::mt19937_64& gen, const RandomScenarioOptions& opts = {});

}  // namespace msint
