#pragma once

#include <complex>
#include <string>
#include <vector>

#include "oscue/common.hpp"

#include "json.hpp"

namespace oscue {

enum class PotentialKind { Zero, CosineScaled, FourierSeries, PiecewiseConstant };

struct FourierTerm {
  int k = 1;        // harmonic index, k >= 1
  double a = 0.0;   // coefficient of cos(k theta)
  double b = 0.0;   // coefficient of sin(k theta)
};

// Real 2pi-periodic potential V on the unit circle.  The ensemble weight is
// built from V composed with theta -> Lambda*theta, so V itself is always the
// one-period profile.
class PotentialSpec {
 public:
  static PotentialSpec zero();
  // V(theta) = -t cos(theta); requires 0 <= t <= 200.
  static PotentialSpec cosine(double t);
  static PotentialSpec fourier(std::vector<FourierTerm> terms);
  // breaks: ascending in [0, 2pi), first break at 0; values[i] on
  // [breaks[i], breaks[i+1]).
  static PotentialSpec piecewise(std::vector<double> breaks, std::vector<double> values);

  PotentialKind kind() const { return kind_; }
  double cosine_t() const;

  double operator()(double theta) const;
  xreal eval_x(xreal theta) const;

  // Exact for Zero/CosineScaled/PiecewiseConstant; dense grid + refinement
  // for FourierSeries.
  double min_value() const;

  // Largest Fourier index present; -1 when not band-limited (piecewise).
  int bandwidth() const;
  bool band_limited() const { return kind_ != PotentialKind::PiecewiseConstant; }

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }

  nlohmann::json to_json() const;
  static PotentialSpec from_json(const nlohmann::json& j);

 private:
  PotentialSpec() = default;
  PotentialKind kind_ = PotentialKind::Zero;
  double t_ = 0.0;
  std::vector<FourierTerm> terms_;
  std::vector<double> breaks_, values_;
};

// Stored ensemble weight w(theta) = exp(-V(Lambda*theta) - c) with c = min V,
// so the stored maximum is exactly 1.  All downstream quantities are invariant
// under the rescaling; kappa values refer to this normalization.
class Weight {
 public:
  Weight(PotentialSpec spec, int period_multiplier);

  double operator()(double theta) const;
  xreal eval_x(xreal theta) const;
  // log of the stored weight (numerically safe for sharp potentials).
  xreal log_eval_x(xreal theta) const;

  int period_multiplier() const { return lambda_cap_; }
  const PotentialSpec& spec() const { return spec_; }
  // Subtracted constant c = min V.
  double log_offset() const { return static_cast<double>(offset_); }

  // Same potential profile with period multiplier 1.  Keeps the stored
  // offset (a rescale must propagate, or assembled kappa values and the
  // pointwise weight would disagree by the rescale constant).
  Weight base() const {
    Weight w = *this;
    w.lambda_cap_ = 1;
    return w;
  }

  // Testing hook: same weight multiplied by exp(-delta).  Breaks the max=1
  // normalization on purpose (scale-invariance checks).
  Weight rescaled(double delta) const;

 private:
  PotentialSpec spec_;
  int lambda_cap_;
  xreal offset_;
};

// Trigonometric moments mu_k = int_0^{2pi} e^{-ik theta} w(theta) dtheta of a
// stored weight, k = -max_order..max_order, Hermitian (mu_{-k} = conj(mu_k))
// by construction.
class MomentTable {
 public:
  MomentTable(int period_multiplier, std::vector<xcplx> mu_nonneg, double claimed_error);

  int max_order() const { return static_cast<int>(mu_.size()) - 1; }
  int period_multiplier() const { return lambda_cap_; }
  cplx mu(int k) const;
  xcplx mu_x(int k) const;
  double mu0() const { return static_cast<double>(mu_[0].real()); }
  double claimed_error() const { return claimed_error_; }

 private:
  int lambda_cap_;
  std::vector<xcplx> mu_;  // k = 0..max_order
  double claimed_error_;
};

// Direct quadrature of the stored weight: periodic trapezoid with node
// doubling to relative 1e-13 (vs mu_0) for band-limited potentials, per-arc
// Gauss-Legendre for piecewise weights.  n_nodes_hint (0 = auto) must respect
// the sampling floor 4*(max_order + Lambda*bandwidth) when given.
MomentTable compute_moments(const Weight& w, int max_order, int n_nodes_hint = 0);

// Periodization shortcut: moments of w at indices Lambda*q equal the base
// weight's moments at q; all others vanish.  Falls back to compute_moments
// for Lambda = 1.
MomentTable compute_moments_periodized(const Weight& w, int max_order);

// 2*pi*I_k(t) (modified Bessel), the exact moment of exp(t cos theta).
// Power series with compensated summation; throws OverflowRisk for t > 700.
double bessel_moment_oracle(double t, int k);
xreal bessel_moment_oracle_x(xreal t, int k);

}  // namespace oscue
