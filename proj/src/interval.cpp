#include "cosz/interval.hpp"

#include <algorithm>
#include <stdexcept>

namespace cosz {

IntervalSet IntervalSet::from_intervals(std::vector<Interval> intervals) {
  std::erase_if(intervals, [](const Interval& iv) { return !(iv.lo < iv.hi); });
  std::sort(intervals.begin(), intervals.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  IntervalSet out;
  for (const auto& iv : intervals) {
    if (!out.intervals_.empty() && iv.lo <= out.intervals_.back().hi) {
      out.intervals_.back().hi = std::max(out.intervals_.back().hi, iv.hi);
    } else {
      out.intervals_.push_back(iv);
    }
  }
  return out;
}

double IntervalSet::measure() const {
  double total = 0.0;
  for (const auto& iv : intervals_) total += iv.length();
  return total;
}

namespace {

// First member with hi >= x.
auto first_not_before(const std::vector<Interval>& v, double x) {
  return std::lower_bound(v.begin(), v.end(), x,
                          [](const Interval& iv, double value) { return iv.hi < value; });
}

}  // namespace

bool IntervalSet::contains(double x) const {
  auto it = first_not_before(intervals_, x);
  return it != intervals_.end() && it->lo <= x;
}

bool IntervalSet::covers(Interval iv) const {
  auto it = first_not_before(intervals_, iv.lo);
  return it != intervals_.end() && it->lo <= iv.lo && iv.hi <= it->hi;
}

bool IntervalSet::meets(Interval iv) const {
  auto it = first_not_before(intervals_, iv.lo);
  return it != intervals_.end() && it->lo <= iv.hi;
}

IntervalSet IntervalSet::intersect(const IntervalSet& other) const {
  std::vector<Interval> out;
  std::size_t i = 0;
  std::size_t j = 0;
  const auto& a = intervals_;
  const auto& b = other.intervals_;
  while (i < a.size() && j < b.size()) {
    const double lo = std::max(a[i].lo, b[j].lo);
    const double hi = std::min(a[i].hi, b[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (a[i].hi < b[j].hi) {
      ++i;
    } else {
      ++j;
    }
  }
  IntervalSet result;
  result.intervals_ = std::move(out);
  return result;
}

}  // namespace cosz
