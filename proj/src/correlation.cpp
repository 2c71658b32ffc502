#include "oscue/correlation.hpp"

#include <cmath>

#include <Eigen/Core>
#include <Eigen/LU>

namespace oscue {

namespace {

constexpr int kMaxOrder = 12;

using MatR = Eigen::Matrix<xreal, Eigen::Dynamic, Eigen::Dynamic>;

xreal det_x(const MatR& a) {
  if (a.rows() == 0) return 1;
  return Eigen::PartialPivLU<MatR>(a).determinant();
}

void check_order(std::size_t m) {
  if (m > kMaxOrder)
    throw CostCap("correlation order " + std::to_string(m) + " exceeds cap " +
                  std::to_string(kMaxOrder));
}

}  // namespace

double corr_finite(const KernelContext& ctx, std::span<const double> thetas) {
  check_order(thetas.size());
  const int m = static_cast<int>(thetas.size());
  MatR a(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = ctx.kernel_diag_x(thetas[i]);
    for (int j = 0; j < i; ++j) {
      xreal v = ctx.kernel_x(thetas[i], thetas[j]);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return static_cast<double>(det_x(a));
}

double corr_limit_general(const KernelContext& small_ctx, std::span<const double> xi) {
  check_order(xi.size());
  const int m = static_cast<int>(xi.size());
  MatR a(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = small_ctx.kernel_diag_x(xi[i]);
    for (int j = 0; j < i; ++j) {
      xreal d = static_cast<xreal>(xi[i]) - xi[j];
      xreal v = sinc_x(d / 2) * small_ctx.kernel_x(xi[i], xi[j]);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return static_cast<double>(det_x(a));
}

double corr_limit_simple(const Weight& base, int lambda, std::span<const double> xi,
                         double mu0_hint) {
  check_order(xi.size());
  if (lambda < 1) throw OutOfRegime("limit correlation: lambda must be >= 1");
  if (base.period_multiplier() != 1)
    throw OutOfRegime("limit correlation: pass the one-well weight");
  xreal mu0 = mu0_hint;
  if (!(mu0 > 0)) mu0 = compute_moments(base, 0).mu0();
  const int m = static_cast<int>(xi.size());
  std::vector<xreal> sw(m);
  for (int i = 0; i < m; ++i)
    sw[i] = std::sqrt(base.eval_x(static_cast<xreal>(lambda) * xi[i]) / mu0);
  MatR a(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = sw[i] * sw[i];
    for (int j = 0; j < i; ++j) {
      xreal d = static_cast<xreal>(xi[i]) - xi[j];
      xreal v = sinc_x(d / 2) * sw[i] * sw[j];
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return static_cast<double>(det_x(a));
}

double sine_det_factor(int lambda, std::span<const double> ell) {
  check_order(ell.size());
  if (lambda < 1) throw OutOfRegime("occupancy determinant: lambda must be >= 1");
  const int m = static_cast<int>(ell.size());
  MatR a(m, m);
  for (int i = 0; i < m; ++i) {
    a(i, i) = 1;
    for (int j = 0; j < i; ++j) {
      xreal d = static_cast<xreal>(ell[i]) - ell[j];
      xreal v = sinc_x(pi_x * d / lambda);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return static_cast<double>(det_x(a));
}

WellLocalizationResult gaussian_well_limit(int lambda, std::span<const int> ell,
                                           std::span<const double> u, int n_points,
                                           double t) {
  check_order(ell.size());
  if (ell.size() != u.size())
    throw OutOfRegime("well localization: index and displacement counts differ");
  if (lambda < 1 || n_points < 1) throw OutOfRegime("well localization: bad sizes");
  if (!(t > 0)) throw OutOfRegime("well localization: depth must be positive");
  const int m = static_cast<int>(ell.size());
  const int lam_total = lambda * n_points;

  Weight w(PotentialSpec::cosine(t), lam_total);
  KernelContext ctx(std::move(w), n_points);

  std::vector<double> thetas(m);
  const double scale = lam_total * std::sqrt(t);
  for (int i = 0; i < m; ++i)
    thetas[i] = two_pi * ell[i] / lam_total + u[i] / scale;

  WellLocalizationResult res;
  double norm = std::pow(n_points * std::sqrt(t), -m);
  res.finite = norm * corr_finite(ctx, thetas);

  std::vector<double> ell_d(m);
  double usq = 0;
  for (int i = 0; i < m; ++i) {
    ell_d[i] = ell[i];
    usq += u[i] * u[i];
  }
  res.limit = std::pow(two_pi, -0.5 * m) * std::exp(-usq / 2) *
              sine_det_factor(lambda, ell_d);
  return res;
}

}  // namespace oscue
