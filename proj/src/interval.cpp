#include "msint/interval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace msint {

Interval::Interval(Time lo, Time hi, bool lo_closed, bool hi_closed)
    : lo_(lo), hi_(hi), lo_closed_(lo_closed), hi_closed_(hi_closed) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw std::invalid_argument("interval endpoints must be finite");
  }
  if (lo > hi) {
    throw std::invalid_argument("interval with lo > hi: " + to_string());
  }
  if (lo == hi && !(lo_closed && hi_closed)) {
    throw std::invalid_argument("empty interval is not representable: " + to_string());
  }
}

bool Interval::contains(Time t) const {
  const bool above = lo_closed_ ? t >= lo_ : t > lo_;
  const bool below = hi_closed_ ? t <= hi_ : t < hi_;
  return above && below;
}

bool Interval::contains(const Interval& other) const {
  const bool lo_ok = other.lo_ > lo_ || (other.lo_ == lo_ && (lo_closed_ || !other.lo_closed_));
  const bool hi_ok = other.hi_ < hi_ || (other.hi_ == hi_ && (hi_closed_ || !other.hi_closed_));
  return lo_ok && hi_ok;
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os << (lo_closed_ ? '[' : '(') << lo_ << ',' << hi_ << (hi_closed_ ? ']' : ')');
  return os.str();
}

bool ordered_before(const Interval& a, const Interval& b) {
  if (a.hi() < b.lo()) return true;
  if (a.hi() > b.lo()) return false;
  return !(a.hi_closed() && b.lo_closed());
}

std::optional<Interval> intersect(const Interval& a, const Interval& b) {
  Time lo = std::max(a.lo(), b.lo());
  Time hi = std::min(a.hi(), b.hi());
  bool lo_closed;
  if (a.lo() == b.lo()) {
    lo_closed = a.lo_closed() && b.lo_closed();
  } else {
    lo_closed = a.lo() > b.lo() ? a.lo_closed() : b.lo_closed();
  }
  bool hi_closed;
  if (a.hi() == b.hi()) {
    hi_closed = a.hi_closed() && b.hi_closed();
  } else {
    hi_closed = a.hi() < b.hi() ? a.hi_closed() : b.hi_closed();
  }
  if (lo > hi) return std::nullopt;
  if (lo == hi && !(lo_closed && hi_closed)) return std::nullopt;
  return Interval(lo, hi, lo_closed, hi_closed);
}

Partition::Partition(std::vector<Interval> cells) : cells_(std::move(cells)) {
  if (cells_.empty()) {
    throw std::invalid_argument("partition needs at least one cell");
  }
  for (std::size_t i = 1; i < cells_.size(); ++i) {
    const Interval& prev = cells_[i - 1];
    const Interval& next = cells_[i];
    if (prev.hi() != next.lo() || prev.hi_closed() == next.lo_closed()) {
      throw std::invalid_argument("partition cells are not contiguous at " + prev.to_string() +
                                  " / " + next.to_string());
    }
  }
}

Interval Partition::base() const {
  const Interval& first = cells_.front();
  const Interval& last = cells_.back();
  return {first.lo(), last.hi(), first.lo_closed(), last.hi_closed()};
}

Time Partition::mesh() const {
  Time m = 0.0;
  for (const auto& c : cells_) m = std::max(m, c.length());
  return m;
}

bool Partition::refines(const Partition& coarser) const {
  if (!(base() == coarser.base())) return false;
  // Both are ordered, so the containing cell index never decreases.
  std::size_t j = 0;
  for (const auto& cell : cells_) {
    while (j < coarser.size() && !coarser.cells_[j].contains(cell)) ++j;
    if (j == coarser.size()) return false;
  }
  return true;
}

Partition refine(const Partition& p, const Partition& q) {
  if (!(p.base() == q.base())) {
    throw std::invalid_argument("cannot refine partitions of different intervals: " +
                                p.base().to_string() + " vs " + q.base().to_string());
  }
  std::vector<Interval> cells;
  std::size_t j = 0;
  for (const auto& a : p) {
    // Cells of q entirely before a are never needed again.
    while (j < q.size() && ordered_before(q.cells()[j], a)) ++j;
    for (std::size_t k = j; k < q.size(); ++k) {
      const Interval& b = q.cells()[k];
      if (ordered_before(a, b)) break;
      if (auto c = intersect(a, b)) cells.push_back(*c);
    }
  }
  return Partition(std::move(cells));
}

Partition young_partition(std::span<const Time> times, const Interval& j) {
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!j.contains(times[i])) {
      std::ostringstream os;
      os << "time " << times[i] << " is outside " << j.to_string();
      throw std::invalid_argument(os.str());
    }
    if (i > 0 && !(times[i - 1] < times[i])) {
      throw std::invalid_argument("young_partition times must be strictly increasing");
    }
  }
  if (j.is_singleton()) return Partition::trivial(j);

  std::vector<Interval> cells;
  Time left = j.lo();
  bool left_closed = j.lo_closed();
  for (Time t : times) {
    if (left < t) cells.emplace_back(left, t, left_closed, false);
    cells.push_back(Interval::point(t));
    left = t;
    left_closed = false;
  }
  if (left < j.hi()) cells.emplace_back(left, j.hi(), left_closed, j.hi_closed());
  return Partition(std::move(cells));
}

Partition halve_cells(const Partition& p) {
  std::vector<Interval> cells;
  cells.reserve(3 * p.size());
  for (const auto& c : p) {
    if (c.is_singleton()) {
      cells.push_back(c);
      continue;
    }
    const Time mid = c.lo() + 0.5 * (c.hi() - c.lo());
    if (!(c.lo() < mid && mid < c.hi())) {
      // Below floating resolution; the cell cannot be split further.
      cells.push_back(c);
      continue;
    }
    cells.emplace_back(c.lo(), mid, c.lo_closed(), false);
    cells.push_back(Interval::point(mid));
    cells.emplace_back(mid, c.hi(), false, c.hi_closed());
  }
  return Partition(std::move(cells));
}

std::vector<Time> times_within(std::span<const Time> times, const Interval& a) {
  std::vector<Time> out;
  for (Time t : times) {
    if (a.contains(t)) out.push_back(t);
  }
  return out;
}

}  // namespace msint
