#pragma once

#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace msint {

using Time = double;

/// A nonempty subinterval of the time axis with explicit endpoint closedness.
///
/// A degenerate interval (lo == hi) is only valid as the closed singleton [t,t].
/// Endpoints are compared exactly, so callers should keep jump times on a
/// dyadic or integer grid.
class Interval {
 public:
  Interval(Time lo, Time hi, bool lo_closed, bool hi_closed);

  static Interval open(Time lo, Time hi) { return {lo, hi, false, false}; }
  static Interval closed(Time lo, Time hi) { return {lo, hi, true, true}; }
  static Interval left_open(Time lo, Time hi) { return {lo, hi, false, true}; }
  static Interval right_open(Time lo, Time hi) { return {lo, hi, true, false}; }
  static Interval point(Time t) { return {t, t, true, true}; }

  Time lo() const { return lo_; }
  Time hi() const { return hi_; }
  bool lo_closed() const { return lo_closed_; }
  bool hi_closed() const { return hi_closed_; }

  bool is_singleton() const { return lo_ == hi_; }
  Time length() const { return hi_ - lo_; }
  bool contains(Time t) const;
  bool contains(const Interval& other) const;

  std::string to_string() const;

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  Time lo_;
  Time hi_;
  bool lo_closed_;
  bool hi_closed_;
};

/// True iff every point of a is strictly less than every point of b.
bool ordered_before(const Interval& a, const Interval& b);

/// Intersection of two intervals, or nullopt when it is empty.
std::optional<Interval> intersect(const Interval& a, const Interval& b);

/// Finite ordered partition of an interval into contiguous, disjoint cells.
class Partition {
 public:
  /// Validates contiguity; throws std::invalid_argument otherwise.
  explicit Partition(std::vector<Interval> cells);

  /// The one-cell partition {a}.
  static Partition trivial(const Interval& a) { return Partition({a}); }

  const std::vector<Interval>& cells() const { return cells_; }
  std::size_t size() const { return cells_.size(); }
  auto begin() const { return cells_.begin(); }
  auto end() const { return cells_.end(); }

  /// The interval covered by the union of all cells.
  Interval base() const;

  /// Largest cell length (singletons have length zero).
  Time mesh() const;

  /// True iff every cell of *this lies inside some cell of coarser.
  bool refines(const Partition& coarser) const;

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<Interval> cells_;
};

/// Common refinement: the nonempty pairwise intersections of cells of p and q.
Partition refine(const Partition& p, const Partition& q);

/// Partition of j into singletons at `times` and the open gaps between them.
/// `times` must be strictly increasing and contained in j.
Partition young_partition(std::span<const Time> times, const Interval& j);

/// Splits every non-degenerate cell (lo,hi) at its midpoint m into the Young
/// triple (lo,m), [m,m], (m,hi), keeping the cell's own outer closedness.
Partition halve_cells(const Partition& p);

/// Times from `times` (sorted) that lie inside a.
std::vector<Time> times_within(std::span<const Time> times, const Interval& a);

}  // namespace msint
