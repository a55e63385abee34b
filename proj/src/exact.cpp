// Exact zeros of f at the points pi p/q, q <= 6.
//
// With theta = pi / q, every cos(r theta) and every ratio
// sin(r theta) / sin(theta) = U_{r-1}(cos theta) lies in Z[1, sqrt D] / 4.
// Accumulating f, f'/sin(x) and f'' residue by residue therefore yields
// numbers (u + v sqrt D) / 4 with integer u, v, and such a number vanishes
// iff u = v = 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "cosz/constants.hpp"
#include "cosz/zeros.hpp"

namespace cosz {

namespace {

__extension__ typedef __int128 i128;

constexpr int kPeriod = 120;  // lcm of 2q for q <= 6

struct Field {
  int D;
  int conj;  // unit k with zeta -> zeta^k the nontrivial automorphism
};

Field field_of(int q) {
  switch (q) {
    case 4: return {2, 3};
    case 5: return {5, 3};
    case 6: return {3, 5};
    default: return {1, 1};
  }
}

struct Pair {
  long long u = 0;
  long long v = 0;
};

// x = 4 * value, y = 4 * conjugate value.
Pair split(double x, double y, int D) {
  Pair p;
  if (D == 1) {
    p.u = std::llround(x);
  } else {
    p.u = std::llround(0.5 * (x + y));
    p.v = std::llround((x - y) / (2.0 * std::sqrt(static_cast<double>(D))));
  }
  if (std::abs(p.u + p.v * std::sqrt(static_cast<double>(D)) - x) > 1e-9) {
    throw std::logic_error("exact_zeros: value table is not in the expected field");
  }
  return p;
}

struct Table {
  int q = 1;
  Field field{};
  std::array<Pair, 12> cos{};
  std::array<Pair, 12> sin_ratio{};
};

Table make_table(int q) {
  Table t;
  t.q = q;
  t.field = field_of(q);
  const double theta = constants::pi / q;
  const int k = t.field.conj;
  for (int r = 0; r < 2 * q; ++r) {
    t.cos[r] = split(4.0 * std::cos(r * theta), 4.0 * std::cos(r * k * theta), t.field.D);
    if (q > 1) {
      t.sin_ratio[r] = split(4.0 * std::sin(r * theta) / std::sin(theta),
                             4.0 * std::sin(r * k * theta) / std::sin(k * theta), t.field.D);
    }
  }
  return t;
}

const Table& table_of(int q) {
  static const std::array<Table, 7> tables = [] {
    std::array<Table, 7> out{};
    for (int q = 1; q <= 6; ++q) out[q] = make_table(q);
    return out;
  }();
  return tables[q];
}

struct Sum {
  i128 u = 0;
  i128 v = 0;
  bool zero() const { return u == 0 && v == 0; }
  double value(int D) const {
    return (static_cast<double>(u) + static_cast<double>(v) * std::sqrt(static_cast<double>(D))) /
           4.0;
  }
};

}  // namespace

std::vector<ExactZero> exact_zeros(const DiffPoly& f) {
  if (f.degenerate()) throw std::domain_error("f vanishes identically");
  std::array<i128, kPeriod> count{};
  std::array<i128, kPeriod> first{};
  std::array<i128, kPeriod> second{};
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  const auto& mask = f.mask();
  for (int a = 0; a <= f.n(); ++a) {
    if (mask.bit(a)) continue;
    const int r = a % kPeriod;
    const i128 k = a;
    count[r] += 1;
    first[r] += k;
    second[r] += k * k;
    const double d = a;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }

  std::vector<ExactZero> out;
  for (int q = 1; q <= 6; ++q) {
    const Table& table = table_of(q);
    const int D = table.field.D;
    for (int p = 1; p < 2 * q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      Sum value;
      Sum slope;
      Sum curve;
      for (int r = 0; r < kPeriod; ++r) {
        if (count[r] == 0) continue;
        const int s = (r * p) % (2 * q);
        value.u += count[r] * table.cos[s].u;
        value.v += count[r] * table.cos[s].v;
        slope.u += first[r] * table.sin_ratio[s].u;
        slope.v += first[r] * table.sin_ratio[s].v;
        curve.u += second[r] * table.cos[s].u;
        curve.v += second[r] * table.cos[s].v;
      }
      if (!value.zero()) continue;
      ExactZero z;
      z.p = p;
      z.q = q;
      z.x = constants::pi * p / q;
      // f'(x) = -sin(pi/q) * slope, f''(x) = -curve.
      const double d1 = std::sin(constants::pi / q) * std::abs(slope.value(D));
      const double d2 = std::abs(curve.value(D));
      if (!slope.zero()) {
        z.order = 1;
        z.guard = 0.5 * d1 / m2;
      } else if (!curve.zero()) {
        z.order = 2;
        // At pi the odd derivatives vanish, so the quartic remainder applies.
        z.guard = q == 1 ? std::sqrt(3.0 * d2 / m4) : 1.5 * d2 / m3;
      } else {
        z.order = 0;
        z.guard = constants::pi / (constants::samples_per_branch * f.T());
      }
      out.push_back(z);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const ExactZero& a, const ExactZero& b) { return a.x < b.x; });
  return out;
}

}  // namespace cosz
