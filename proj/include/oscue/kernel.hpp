#pragma once

#include <memory>
#include <vector>

#include "oscue/opuc.hpp"
#include "oscue/potential.hpp"

namespace oscue {

struct KernelBuildOptions {
  bool force_direct = false;   // skip the sparse assembly route
  double cond_cap = 1e12;
  int moment_nodes_hint = 0;
};

// Reproducing kernel of the degree-<N polynomial space weighted by w, in the
// phase-conjugated convention that makes it real symmetric:
//   K(theta, phi) = Im(e^{-iN(theta-phi)/2} Psi(theta) conj(Psi(phi)))
//                   / sin((theta-phi)/2),
// with Psi = kappa_N pi_N sqrt(w) (Christoffel-Darboux form).  Near the
// diagonal the equivalent sum over the orthonormal basis is used.  Immutable
// after construction; evaluations are thread-safe.
class KernelContext {
 public:
  KernelContext(Weight w, int n_points, KernelBuildOptions opts = {});

  int n_points() const { return n_; }
  int period_multiplier() const { return weight_.period_multiplier(); }
  const Weight& weight() const { return weight_; }
  const OpucBasis& basis() const { return basis_; }
  double weight_mu0() const { return mu0_; }

  double kernel(double theta, double phi) const;
  double kernel_diag(double theta) const;
  xreal kernel_x(xreal theta, xreal phi) const;
  xreal kernel_diag_x(xreal theta) const;

  // The near-diagonal branch (orthonormal sum with the conjugating phase),
  // exposed so tests can compare it against the quotient form everywhere.
  double kernel_sum_form(double theta, double phi) const;
  // Imaginary residue of the phased sum before it is discarded (should be
  // at rounding level; tested).
  double sum_form_imag_residue(double theta, double phi) const;

  // Psi_N(theta) = kappa_N pi_N(e^{i theta}) sqrt(w(theta)).
  cplx boundary_function(double theta) const;
  // Orthonormal element phi_l(theta) = kappa_l pi_l(e^{i theta}) sqrt(w(theta)).
  cplx orthonormal(int l, double theta) const;
  xcplx orthonormal_x(int l, xreal theta) const;
  // All of phi_0..phi_{N-1} at one angle (shared weight evaluation).
  std::vector<cplx> orthonormal_all(double theta) const;

  // Symmetric kernel-value matrix over a node set (quotient form with cached
  // boundary values; orthonormal sums near the diagonal).
  std::vector<std::vector<double>> kernel_matrix(const std::vector<double>& nodes) const;

 private:
  xcplx sum_form_x(xreal theta, xreal phi) const;
  Weight weight_;
  int n_;
  OpucBasis basis_;
  double mu0_;  // zeroth moment of the stored weight (this period multiplier)
};

// Quotient-form kernel evaluation (free-function spelling of ctx.kernel).
double cd_kernel(const KernelContext& ctx, double theta, double phi);

// Residual of the finite-size scale identity
//   K_{nL, lambda L}(e^{i xi/L}, e^{i eta/L})
//     = [sin((xi-eta)/2) / sin((xi-eta)/(2L))] * K_{n, lambda}(e^{i xi}, e^{i eta})
// with big = the (nL, lambda L) context and small = the (n, lambda) context.
double scaling_identity_check(const KernelContext& big, const KernelContext& small,
                              int L, double xi, double eta);

struct DensityProfile {
  std::vector<double> theta;
  std::vector<double> rho;     // K(theta,theta)/N, integrates to 1
  int n_points = 0;
  int period_multiplier = 1;
};

// rho over one full circle, points_per_period samples per 2pi/Lambda window.
DensityProfile density_of_states(const KernelContext& ctx, int points_per_period = 256);

// trapezoid of K(theta,theta) over the circle; equals n_points up to quadrature.
double kernel_trace(const KernelContext& ctx, int nodes_per_period = 1024);

// (1 + t cos theta)/(2pi); the variational equilibrium density for potential
// -t cos on the circle.  Valid while it stays a density: throws OutOfRegime
// unless 0 <= t <= 1.
double equilibrium_density_cosine(double t, double theta);

struct SupErrorReport {
  double sup_error = 0.0;
  int grid_points = 0;
};

// Scaled-weight comparison for the cosine potential: builds the ensemble with
// potential -n_scale*t*cos on Lambda wells and N = n_scale*Lambda points, and
// reports sup_x |rho_N(x/Lambda) - (1 + t cos x)/(2pi)| over an x-grid on
// [0, 2pi).  Passes a raised condition cap internally (sharp weights).
SupErrorReport small_lambda_limit_check(double t, int n_scale,
                                        int period_multiplier,
                                        int grid_points = 256);

}  // namespace oscue
