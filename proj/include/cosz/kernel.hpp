#pragma once

// Dirichlet kernel D_n(x) = sum_{k=0}^{n} cos(kx) = 1/2 + sin(Tx) / (2 sin(x/2)),
// T = n + 1/2, together with the envelope s(x) = 1 / (2 sin(x/2)) and the
// slow curve phi(x) = 2 sin(x/2) (g(x) - 1/2). With these,
//
//   D_n(x) - g(x) = s(x) (sin(Tx) - phi(x))   for x in (0, 2 pi).
//
// All angles are radians. Every function here is pure.

#include "cosz/mask.hpp"

namespace cosz::kernel {

struct KernelParams {
  int n = 0;
  double T = 0.5;

  static KernelParams of(int n);
};

/// D_n(x) for x in [0, 2 pi]. Closed form when |sin(x/2)| >= theta0,
/// direct summation otherwise.
double dirichlet(int n, double x);

/// D_n^(r)(x) by direct summation of k^r cos(kx + r pi/2).
/// Throws std::overflow_error when n^r is not representable.
double dirichlet_deriv(int n, int r, double x);

/// s(x) = 1 / (2 sin(x/2)) on (0, 2 pi).
double envelope_s(double x);

/// B^(r)(x) for B(x) = 1 / sin(x/2), r <= 8, x in (0, 2 pi).
double b_deriv(int r, double x);

/// phi(x) = 2 sin(x/2) (g(x) - 1/2) on (0, 2 pi).
double slow_curve_phi(const CoeffMask& mask, double x);

/// Throws std::overflow_error if k^r overflows a double for k = n.
void check_power_range(int n, int r);

}  // namespace cosz::kernel
