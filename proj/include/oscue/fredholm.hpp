#pragma once

#include <complex>
#include <span>
#include <vector>

#include "oscue/kernel.hpp"

namespace oscue {

// Closed arc on the circle: start in [0, 2pi), end in (start, start + 2pi].
// end may exceed 2pi (the arc wraps through 0); quadrature nodes keep the one
// representative on the contiguous interval, which is the convention the
// kernel's spectrum and determinants are invariant under.
struct Arc {
  double start = 0.0;
  double end = 0.0;
  double length() const { return end - start; }
};

// Disjoint union of arcs, total measure <= 2pi.
class ArcSet {
 public:
  explicit ArcSet(std::vector<Arc> arcs);

  // The lambda*N arcs between adjacent well centers, each shrunk by
  // eps/(lambda N) on both sides (eps is a phase radius inside one well
  // period, 0 < eps < pi): arc j = [(2pi(j-1) + eps)/(lambda N),
  // (2pi j - eps)/(lambda N)].
  static ArcSet well_complement(int lambda, int n_points, double eps);

  // Symmetric window around the well center at 0, half-width eps wells:
  // [-2pi eps/(lambda N), 2pi eps/(lambda N)], 0 < eps <= 1/2.
  static ArcSet well_window(int lambda, int n_points, double eps);

  static ArcSet full_circle();

  const std::vector<Arc>& arcs() const { return arcs_; }
  double total_measure() const;
  // True when the arcs are equal-length translates on a regular lattice
  // (well_complement structure); lets the discretization reuse kernel blocks
  // under the shift symmetry.
  bool translation_structured() const { return translation_step_ > 0; }
  double translation_step() const { return translation_step_; }

 private:
  std::vector<Arc> arcs_;
  double translation_step_ = 0.0;
};

// Symmetrized Nystrom discretization of the kernel restricted to an arc set:
// A_ij = sqrt(q_i q_j) K(x_i, x_j) over Gauss-Legendre nodes.  The node count
// doubles until det(1 - A) is stable to 1e-10 (auto_refine), then the real
// symmetric eigendecomposition is kept.
class NystromSystem {
 public:
  NystromSystem(const KernelContext& ctx, const ArcSet& set,
                int nodes_per_arc = 48, bool auto_refine = true);

  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& quad_weights() const { return weights_; }
  const std::vector<double>& eigenvalues() const { return eigs_; }  // descending
  double trace() const { return trace_; }
  int nodes_per_arc() const { return per_arc_; }
  bool converged() const { return converged_; }

 private:
  void build(const KernelContext& ctx, const ArcSet& set, int per_arc);
  std::vector<double> nodes_, weights_, eigs_;
  double trace_ = 0.0;
  int per_arc_ = 0;
  bool converged_ = false;
};

// det(1 + z K restricted to the arc set) = prod_i (1 + z e_i).
cplx fredholm_det(const NystromSystem& sys, cplx z);

// P(no points in the arc set) = det(1 - K).  Result clamped to [0, 1];
// values outside by more than 1e-6 raise CheckFailed.
double gap_probability(const KernelContext& ctx, const ArcSet& set);

// Distribution of the point count in the arc set: P(k) is the xi^k
// coefficient of prod_i ((1 - e_i) + xi e_i), eigenvalues clamped to [0, 1].
// Eigenvalues outside [-1e-8, 1 + 1e-8] raise CheckFailed.  Returned vector
// has length n_points + 1.
std::vector<double> count_distribution(const NystromSystem& sys, int n_points);

// P(exactly k points in the arc set); builds the discretization internally.
double count_probability(const KernelContext& ctx, const ArcSet& set, int k);

// Correlation-integral moments M_m = int_{J^m} det[K(x_a, x_b)] dx, computed
// by tensor-product Gauss-Legendre over index combinations (independent of
// the eigenvalue route).  m <= 6; nodes_per_arc = 0 picks an m-dependent
// default.  CostCap beyond the supported range.
double series_moment(const KernelContext& ctx, const ArcSet& set, int m,
                     int nodes_per_arc = 0);

// Microscopic-limit moment for the cosine potential at well window eps:
//   M_m^lim = (2pi/lambda)^m / m! * int_{[-eps,eps]^m}
//             det[sinc(pi(x_a - x_b)/lambda)] * prod_j f(x_j) dx,
// f(x) = w(2pi x) / mu_0 through the stored base weight (scale-free).
// Graded panels absorb the sharp-well concentration.  m <= 4.
double series_moment_limit(int lambda, double eps, double t, int m);

struct TraceBoundReport {
  double missing_mass = 0.0;  // 1 - gap probability
  double tau = 0.0;           // trace of K over the arc set
  double bound = 0.0;         // tau * exp(tau + 1)
};

// Checks 1 - P(empty) <= tau e^{tau+1} on the arc set; throws CheckFailed on
// violation beyond 1e-9.  tau comes from the closed-form weight integral when
// the context has the single-point-per-well structure (Lambda = lambda*N),
// else from quadrature of the kernel diagonal.
TraceBoundReport trace_bound_check(const KernelContext& ctx, const ArcSet& set);

struct DecayFitReport {
  double slope = 0.0;                // d log M_m^lim / d log t
  std::vector<double> values;        // M_m^lim at each t
};

// Least-squares slope of log series_moment_limit vs log t; the sharp-well
// regime must show at least 1/t decay, so slope > -0.8 raises CheckFailed.
DecayFitReport laplace_decay_check(int lambda, double eps,
                                   std::span<const double> t_values, int m = 2);

}  // namespace oscue
