#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "cosz/mask.hpp"

namespace cosz {

/// f(x) = sum_{k=0}^{n} cos(kx) - sum_{k=0}^{m} eps_k cos(kx), i.e. D_n - g.
class DiffPoly {
 public:
  DiffPoly(int n, CoeffMask mask);

  int n() const { return n_; }
  double T() const { return n_ + 0.5; }
  const CoeffMask& mask() const { return mask_; }

  /// True when the mask covers every k <= n, so f vanishes identically.
  bool degenerate() const { return mask_.ones() == n_ + 1; }

 private:
  int n_;
  CoeffMask mask_;
};

/// Strictly increasing exponent set A with f_A = sum_{a in A} cos(ax).
struct IndexSet {
  std::vector<int> values;

  std::size_t size() const { return values.size(); }
};

/// Precomputed half-integer sine form of the slow curve,
///   phi(x) = 2 sin(x/2) (g(x) - 1/2) = sum_{j=0}^{m} c_j sin((j + 1/2) x),
/// with c_0 = 2 eps_0 - eps_1 - 1 and c_j = eps_j - eps_{j+1}. The form gives
/// exact term-wise bounds on every derivative of phi and an O(m) evaluator
/// that needs no per-term trig calls.
class SlowCurve {
 public:
  explicit SlowCurve(const CoeffMask& mask);

  struct Value {
    double phi;
    double dphi;
  };

  Value eval(double x) const;
  double phi(double x) const { return eval(x).phi; }

  /// sup_x |phi^(r)(x)| <= sum_j |c_j| (j + 1/2)^r, for r <= 4.
  double derivative_bound(int r) const { return bounds_.at(r); }

 private:
  std::vector<int> coeff_;  // c_j, each in {-2, ..., 1}
  std::vector<double> bounds_;
};

namespace poly {

/// g(x) by direct summation over set bits.
double eval_g(const CoeffMask& mask, double x);

/// g^(r)(x) by direct summation.
double eval_g_deriv(const CoeffMask& mask, int r, double x);

/// f(x) through the factorization s(x) (sin(Tx) - phi(x)) away from the
/// pole and by direct summation near it. x in [0, 2 pi].
double eval_f(const DiffPoly& f, double x);

/// f(x) = sum_{a in A} cos(ax), direct O(n) summation over the exponent set.
double eval_f_direct(const DiffPoly& f, double x);

/// f^(r)(x) = D_n^(r)(x) - g^(r)(x) by direct summation.
double eval_f_deriv(const DiffPoly& f, int r, double x);

IndexSet to_index_set(const DiffPoly& f);

/// f(0) = n + 1 - t, exactly.
long long value_at_zero(const DiffPoly& f);

/// f(pi) = [n even] - sum_k eps_k (-1)^k, exactly.
long long value_at_pi(const DiffPoly& f);

/// f''(pi) = -sum_{a in A} a^2 (-1)^a, exactly.
long long second_derivative_at_pi(const DiffPoly& f);

/// sum_{a in A} a^4, an upper bound on sup |f''''|.
double fourth_derivative_bound(const DiffPoly& f);

}  // namespace poly
}  // namespace cosz
