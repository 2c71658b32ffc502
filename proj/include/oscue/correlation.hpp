#pragma once

#include <span>
#include <vector>

#include "oscue/kernel.hpp"

namespace oscue {

// m-point correlation function R_m(theta_1..theta_m) = det[K(theta_a, theta_b)].
// m is capped at 12 (determinant cost / statistical meaninglessness beyond).
double corr_finite(const KernelContext& ctx, std::span<const double> thetas);

// Microscopic limit of (1/L)^m R_m under N = n*L, Lambda = lambda*L,
// theta_j = xi_j / L as L -> infinity:
//   det[ sinc((xi_a - xi_b)/2) * K_small(xi_a, xi_b) ]
// where K_small is the (n, lambda) kernel context passed in.
double corr_limit_general(const KernelContext& small_ctx, std::span<const double> xi);

// Same limit for n = 1 in closed form: the kernel factor collapses to
// sqrt(w(lambda xi_a) w(lambda xi_b)) / mu_0(base).  mu0_hint = 0 recomputes
// the base moment internally.
double corr_limit_simple(const Weight& base, int lambda, std::span<const double> xi,
                         double mu0_hint = 0.0);

// det[ sinc(pi (l_a - l_b)/lambda) ]: the correlation of well occupancy
// patterns in the sharp-well regime.  Entries may be non-integer (real
// arguments appear in the moment expansions).
double sine_det_factor(int lambda, std::span<const double> ell);

struct WellLocalizationResult {
  double finite = 0.0;   // (N sqrt(t))^{-m} R_m at the well-centered points
  double limit  = 0.0;   // (2pi)^{-m/2} exp(-sum u^2/2) * sine det factor
};

// Sharp-well Gaussian localization: wells at 2pi l_j/(lambda N), Gaussian
// displacements u_j in units of 1/(lambda N sqrt(t)); cosine potential with
// depth t per well.  Returns the finite-N value and its t -> infinity limit.
WellLocalizationResult gaussian_well_limit(int lambda, std::span<const int> ell,
                                           std::span<const double> u, int n_points,
                                           double t);

}  // namespace oscue
