#pragma once

#include <vector>

namespace cosz {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double x) const { return lo <= x && x <= hi; }
  bool operator==(const Interval&) const = default;
};

/// Sorted union of pairwise disjoint intervals with lo < hi.
///
/// Members are stored as closed intervals; whether an endpoint belongs to the
/// underlying set (strict vs non-strict defining inequality) only matters on
/// a null set and is documented by the producer.
class IntervalSet {
 public:
  IntervalSet() = default;

  /// Sorts, drops empty members and merges overlapping or touching ones.
  static IntervalSet from_intervals(std::vector<Interval> intervals);

  const std::vector<Interval>& intervals() const { return intervals_; }
  double measure() const;
  int count() const { return static_cast<int>(intervals_.size()); }
  bool empty() const { return intervals_.empty(); }

  bool contains(double x) const;
  /// True if [iv.lo, iv.hi] lies inside a single member.
  bool covers(Interval iv) const;
  /// True if some member meets [iv.lo, iv.hi].
  bool meets(Interval iv) const;

  IntervalSet intersect(const IntervalSet& other) const;

 private:
  std::vector<Interval> intervals_;
};

}  // namespace cosz
