#include "oscue/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

namespace oscue {

namespace {

// Below this |sin(d/2)| the quotient form loses digits; switch to the sum.
constexpr double kQuotientFloor = 1e-5;

// Builds the basis for the context and reports the zeroth moment of the
// stored weight through mu0_out (written before the members that depend on
// it are read; the constructor leaves mu0_ out of its initializer list).
OpucBasis build_basis(const Weight& w, int n, const KernelBuildOptions& opts,
                      double& mu0_out) {
  if (n < 1) throw DegreeOutOfRange("kernel context: need at least one point");
  OpucOptions oo;
  oo.cond_cap = opts.cond_cap;
  const int lam = w.period_multiplier();
  if (lam > 1 && !opts.force_direct) {
    // Periodized weight: solve the one-well problem and spread coefficients.
    // The zeroth moments of base and periodized weight coincide.
    Weight base = w.base();
    MomentTable mom = compute_moments(base, n / lam, opts.moment_nodes_hint);
    mu0_out = mom.mu0();
    OpucBasis small = opuc_direct(mom, n / lam, oo);
    return opuc_assemble(small, lam, n);
  }
  MomentTable mom = compute_moments(w, n, opts.moment_nodes_hint);
  mu0_out = mom.mu0();
  return opuc_direct(mom, n, oo);
}

}  // namespace

KernelContext::KernelContext(Weight w, int n, KernelBuildOptions opts)
    : weight_(std::move(w)), n_(n), basis_(build_basis(weight_, n, opts, mu0_)) {}

xcplx KernelContext::orthonormal_x(int l, xreal theta) const {
  xcplx z = std::polar<xreal>(1, theta);
  return basis_.kappa_x(l) * basis_.eval_x(l, z) * std::sqrt(weight_.eval_x(theta));
}

cplx KernelContext::orthonormal(int l, double theta) const {
  xcplx v = orthonormal_x(l, theta);
  return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

cplx KernelContext::boundary_function(double theta) const {
  xcplx v = orthonormal_x(n_, theta);
  return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

std::vector<cplx> KernelContext::orthonormal_all(double theta) const {
  xreal th = theta;
  xcplx z = std::polar<xreal>(1, th);
  xreal sw = std::sqrt(weight_.eval_x(th));
  std::vector<cplx> out(n_);
  for (int l = 0; l < n_; ++l) {
    xcplx v = basis_.kappa_x(l) * basis_.eval_x(l, z) * sw;
    out[l] = cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
  }
  return out;
}

xcplx KernelContext::sum_form_x(xreal theta, xreal phi) const {
  xreal d = theta - phi;
  xcplx zt = std::polar<xreal>(1, theta);
  xcplx zp = std::polar<xreal>(1, phi);
  xcplx acc(0, 0);
  for (int l = 0; l < n_; ++l) {
    xreal k = basis_.kappa_x(l);
    acc += (k * k) * basis_.eval_x(l, zt) * std::conj(basis_.eval_x(l, zp));
  }
  xreal sw = std::sqrt(weight_.eval_x(theta) * weight_.eval_x(phi));
  return std::polar<xreal>(1, -static_cast<xreal>(n_ - 1) * d / 2) * acc * sw;
}

double KernelContext::kernel_sum_form(double theta, double phi) const {
  return static_cast<double>(sum_form_x(theta, phi).real());
}

double KernelContext::sum_form_imag_residue(double theta, double phi) const {
  return static_cast<double>(sum_form_x(theta, phi).imag());
}

xreal KernelContext::kernel_x(xreal theta, xreal phi) const {
  // The difference is taken raw, never wrapped mod 2pi. For even n the
  // conjugating half-integer phase makes the kernel antiperiodic in theta, so
  // there is no single-valued branch; what is well defined is the kernel with
  // one fixed representative per point. Under that convention determinants,
  // Nystrom spectra, and the reproducing identity are all exact (changing a
  // representative flips a whole row and column, a similarity by diag(+-1)).
  // Pairwise wrapping would mix branches and corrupt all three.
  xreal d = theta - phi;
  xreal s = std::sin(d / 2);
  if (std::abs(static_cast<double>(s)) < kQuotientFloor)
    return sum_form_x(theta, phi).real();
  xcplx psi_t = basis_.kappa_x(n_) * basis_.eval_x(n_, std::polar<xreal>(1, theta));
  xcplx psi_p = basis_.kappa_x(n_) * basis_.eval_x(n_, std::polar<xreal>(1, phi));
  xreal sw = std::sqrt(weight_.eval_x(theta) * weight_.eval_x(phi));
  xcplx a = std::polar<xreal>(1, -static_cast<xreal>(n_) * d / 2) * psi_t * std::conj(psi_p) * sw;
  return a.imag() / s;
}

xreal KernelContext::kernel_diag_x(xreal theta) const {
  xcplx z = std::polar<xreal>(1, theta);
  xreal acc = 0;
  for (int l = 0; l < n_; ++l) {
    xreal k = basis_.kappa_x(l);
    acc += k * k * std::norm(basis_.eval_x(l, z));
  }
  return acc * weight_.eval_x(theta);
}

double KernelContext::kernel(double theta, double phi) const {
  return static_cast<double>(kernel_x(theta, phi));
}

double KernelContext::kernel_diag(double theta) const {
  return static_cast<double>(kernel_diag_x(theta));
}

std::vector<std::vector<double>> KernelContext::kernel_matrix(
    const std::vector<double>& nodes) const {
  const int m = static_cast<int>(nodes.size());
  std::vector<xcplx> psi(m);
  std::vector<std::vector<xcplx>> phi(m);
  std::vector<xreal> diag(m);
  parallel_for(m, [&](std::size_t i) {
    xreal th = nodes[i];
    xcplx z = std::polar<xreal>(1, th);
    xreal sw = std::sqrt(weight_.eval_x(th));
    psi[i] = basis_.kappa_x(n_) * basis_.eval_x(n_, z) * sw;
    auto& row = phi[i];
    row.resize(n_);
    xreal acc = 0;
    for (int l = 0; l < n_; ++l) {
      row[l] = basis_.kappa_x(l) * basis_.eval_x(l, z) * sw;
      acc += std::norm(row[l]);
    }
    diag[i] = acc;
  });

  std::vector<std::vector<double>> out(m, std::vector<double>(m));
  parallel_for(m, [&](std::size_t i) {
    out[i][i] = static_cast<double>(diag[i]);
    for (std::size_t j = 0; j < i; ++j) {
      // Raw difference, same representative convention as kernel_x.
      xreal d = static_cast<xreal>(nodes[i]) - nodes[j];
      xreal s = std::sin(d / 2);
      xreal v;
      if (std::abs(static_cast<double>(s)) < kQuotientFloor) {
        xcplx acc(0, 0);
        for (int l = 0; l < n_; ++l) acc += phi[i][l] * std::conj(phi[j][l]);
        v = (std::polar<xreal>(1, -static_cast<xreal>(n_ - 1) * d / 2) * acc).real();
      } else {
        xcplx a = std::polar<xreal>(1, -static_cast<xreal>(n_) * d / 2) * psi[i] *
                  std::conj(psi[j]);
        v = a.imag() / s;
      }
      out[i][j] = static_cast<double>(v);
    }
  });
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) out[i][j] = out[j][i];
  return out;
}

double cd_kernel(const KernelContext& ctx, double theta, double phi) {
  return ctx.kernel(theta, phi);
}

double scaling_identity_check(const KernelContext& big, const KernelContext& small,
                              int L, double xi, double eta) {
  if (L < 1) throw DegreeOutOfRange("scaling identity: L must be >= 1");
  if (big.n_points() != small.n_points() * L ||
      big.period_multiplier() != small.period_multiplier() * L)
    throw OutOfRegime("scaling identity: contexts are not an L-fold pair");
  xreal d = static_cast<xreal>(xi) - eta;
  // sin(d/2)/sin(d/(2L)) without cancellation at small d.
  xreal ratio = L * sinc_x(d / 2) / sinc_x(d / (2 * L));
  xreal base = static_cast<xreal>(eta);
  xreal lhs = big.kernel_x((base + d) / L, base / L);
  xreal rhs = ratio * small.kernel_x(base + d, base);
  return static_cast<double>(std::abs(lhs - rhs));
}

DensityProfile density_of_states(const KernelContext& ctx, int points_per_period) {
  if (points_per_period < 2)
    throw InsufficientResolution("density grid: need at least 2 points per period");
  const int lam = ctx.period_multiplier();
  const int total = points_per_period * lam;
  DensityProfile prof;
  prof.theta.resize(total);
  prof.rho.resize(total);
  prof.n_points = ctx.n_points();
  prof.period_multiplier = lam;
  const double inv_n = 1.0 / ctx.n_points();
  parallel_for(total, [&](std::size_t j) {
    double th = two_pi * static_cast<double>(j) / total;
    prof.theta[j] = th;
    prof.rho[j] = ctx.kernel_diag(th) * inv_n;
  });
  return prof;
}

double kernel_trace(const KernelContext& ctx, int nodes_per_period) {
  if (nodes_per_period < 2)
    throw InsufficientResolution("kernel trace: need at least 2 nodes per period");
  const int total = nodes_per_period * ctx.period_multiplier();
  std::vector<xreal> vals(total);
  parallel_for(total, [&](std::size_t j) {
    vals[j] = ctx.kernel_diag_x(two_pi_x * static_cast<xreal>(j) / total);
  });
  // Periodic trapezoid; summed sequentially so the result is reproducible.
  xreal acc = 0, comp = 0;
  for (xreal v : vals) {
    xreal y = v - comp;
    xreal t = acc + y;
    comp = (t - acc) - y;
    acc = t;
  }
  return static_cast<double>(acc * two_pi_x / total);
}

double equilibrium_density_cosine(double t, double theta) {
  if (!(t >= 0 && t <= 1))
    throw OutOfRegime("equilibrium density: valid for 0 <= t <= 1");
  return (1 + t * std::cos(theta)) / two_pi;
}

SupErrorReport small_lambda_limit_check(double t, int n_scale, int period_multiplier,
                                        int grid_points) {
  if (!(t >= 0 && t <= 1))
    throw OutOfRegime("density limit check: valid for 0 <= t <= 1");
  if (n_scale < 1 || period_multiplier < 1 || grid_points < 2)
    throw OutOfRegime("density limit check: bad sizes");
  Weight w(PotentialSpec::cosine(n_scale * t), period_multiplier);
  KernelBuildOptions opts;
  // The comparison sharpens as n grows and the moment matrix worsens with it;
  // the default cap would refuse exactly the interesting sizes.
  opts.cond_cap = 1e16;
  KernelContext ctx(std::move(w), n_scale * period_multiplier, opts);
  const int lam = period_multiplier;
  std::vector<double> err(grid_points);
  parallel_for(grid_points, [&](std::size_t j) {
    double x = two_pi * static_cast<double>(j) / grid_points;
    double rho = ctx.kernel_diag(x / lam) / ctx.n_points();
    err[j] = std::abs(rho - equilibrium_density_cosine(t, x));
  });
  SupErrorReport rep;
  rep.grid_points = grid_points;
  rep.sup_error = *std::max_element(err.begin(), err.end());
  return rep;
}

}  // namespace oscue
