#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "msint/multistate.hpp"

namespace msint {

/// One subject's observed trajectory of X on states 0..d, where 0 means
/// "unobserved". State 0 may be entered and left again.
class EventHistory {
 public:
  EventHistory(std::int64_t subject, State initial, std::vector<Jump> jumps = {});

  std::int64_t subject() const { return subject_; }
  State initial() const { return path_.initial(); }
  const std::vector<Jump>& jumps() const { return path_.jumps(); }

  State at(Time t) const { return path_.at(t); }
  State before(Time t) const { return path_.before(t); }
  State at(Time t, Side side) const { return path_.at(t, side); }

  friend bool operator==(const EventHistory&, const EventHistory&) = default;

 private:
  std::int64_t subject_;
  StatePath path_;
};

using Sample = std::vector<EventHistory>;

/// Nelson-Aalen increments, Aalen-Johansen transition matrices and the derived
/// occupation estimates on the sorted observed transition times.
struct EstimateGrid {
  int d = 0;
  std::vector<Time> times;
  std::vector<Matrix> hazard_increments;  ///< dLambda(u) at each time
  std::vector<Matrix> transition;         ///< P(0, u), empty until aalen_johansen
  RowVector initial;                      ///< p(0), empty until occupation_estimate
  std::vector<RowVector> occupation;      ///< p(u), empty until occupation_estimate

  /// Right-continuous step evaluation; constant beyond the last event time.
  Matrix transition_at(Time t) const;
  RowVector occupation_at(Time t) const;
  /// Cumulative hazard Lambda((0, t]).
  Matrix cumulative_hazard(Time t) const;
  /// Increments as a hazard-matrix interval function.
  AdditiveIF hazard_if() const;
};

/// n^-1 sum_i #{observed direct j->k jumps in (0, t]}; jumps into or out of
/// state 0 never count.
double empirical_counts(std::span<const EventHistory> sample, State j, State k, Time t);

/// n^-1 sum_i 1{X_i(t) = j} (or the left limit).
double empirical_occupancy(std::span<const EventHistory> sample, State j, Time t,
                           Side side = Side::kRight);

/// Nelson-Aalen increments at every time in (0, upto] with at least one
/// observed transition between nonzero states.
EstimateGrid nelson_aalen(std::span<const EventHistory> sample, int d, Time upto);

/// Fills grid.transition with the running ordered product of (1 + dLambda).
void aalen_johansen(EstimateGrid& grid);

/// Fills grid.initial and grid.occupation. Throws if nobody is observed at time 0.
void occupation_estimate(std::span<const EventHistory> sample, EstimateGrid& grid);

/// The three steps above.
EstimateGrid estimate(std::span<const EventHistory> sample, int d, Time upto);

// ---------------------------------------------------------------------------
// Event-history CSV: header `subject,time,state`; a time-0 row per subject
// giving the initial observed state, then one row per jump.
// ---------------------------------------------------------------------------

class CsvError : public std::runtime_error {
 public:
  CsvError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

/// Throws CsvError naming the offending line. States must lie in 0..d.
Sample read_event_csv(std::istream& in, int d);
void write_event_csv(std::ostream& out, std::span<const EventHistory> sample);

/// `t,p_1,...,p_d` with a t=0 row followed by one row per event time.
void write_occupation_csv(std::ostream& out, const EstimateGrid& grid);

}  // namespace msint
