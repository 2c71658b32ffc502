#include "oscue/fredholm.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include "oscue/quadrature.hpp"

namespace oscue {

namespace {

constexpr int kMaxNodesPerArc = 1024;
constexpr int kMaxTotalNodes = 4096;
constexpr double kDetStabilityTol = 1e-10;

double det_one_minus(const std::vector<double>& eigs) {
  double p = 1;
  for (double e : eigs) p *= 1 - e;
  return p;
}

// Determinant of an m x m matrix held row-major in buf; destroys buf.
double det_small(double* a, int m) {
  double sign = 1;
  for (int c = 0; c < m; ++c) {
    int piv = c;
    for (int r = c + 1; r < m; ++r)
      if (std::abs(a[r * m + c]) > std::abs(a[piv * m + c])) piv = r;
    if (a[piv * m + c] == 0) return 0;
    if (piv != c) {
      for (int k = c; k < m; ++k) std::swap(a[piv * m + k], a[c * m + k]);
      sign = -sign;
    }
    for (int r = c + 1; r < m; ++r) {
      double f = a[r * m + c] / a[c * m + c];
      for (int k = c; k < m; ++k) a[r * m + k] -= f * a[c * m + k];
    }
  }
  double d = sign;
  for (int c = 0; c < m; ++c) d *= a[c * m + c];
  return d;
}

double binomial_estimate(int n, int m) {
  double c = 1;
  for (int j = 0; j < m; ++j) c *= static_cast<double>(n - j) / (j + 1);
  return c;
}

}  // namespace

ArcSet::ArcSet(std::vector<Arc> arcs) : arcs_(std::move(arcs)) {
  for (const Arc& a : arcs_) {
    if (!(a.start >= 0 && a.start < two_pi))
      throw OutOfRegime("arc set: start must lie in [0, 2pi)");
    if (!(a.end > a.start && a.end <= a.start + two_pi))
      throw OutOfRegime("arc set: end must lie in (start, start + 2pi]");
  }
  std::vector<Arc> sorted = arcs_;
  std::sort(sorted.begin(), sorted.end(),
            [](const Arc& a, const Arc& b) { return a.start < b.start; });
  double total = 0;
  int wrapping = 0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    total += sorted[i].length();
    if (sorted[i].end > two_pi) {
      ++wrapping;
      if (i + 1 != sorted.size() || sorted[i].end - two_pi > sorted[0].start + 1e-15)
        throw OutOfRegime("arc set: arcs overlap across the wrap");
    }
    if (i + 1 < sorted.size() && sorted[i].end > sorted[i + 1].start + 1e-15)
      throw OutOfRegime("arc set: arcs overlap");
  }
  if (wrapping > 1) throw OutOfRegime("arc set: more than one arc wraps");
  if (total > two_pi + 1e-12) throw OutOfRegime("arc set: total measure exceeds 2pi");

  // Regular translate lattice: equal lengths, equidistant starts, full wrap.
  if (arcs_.size() >= 2) {
    double len = arcs_[0].length();
    double step = arcs_[1].start - arcs_[0].start;
    bool regular = step > 0;
    for (std::size_t i = 0; regular && i < arcs_.size(); ++i) {
      if (std::abs(arcs_[i].length() - len) > 1e-12) regular = false;
      if (std::abs(arcs_[i].start - (arcs_[0].start + i * step)) > 1e-12) regular = false;
    }
    if (regular && std::abs(step * static_cast<double>(arcs_.size()) - two_pi) < 1e-9)
      translation_step_ = step;
  }
}

ArcSet ArcSet::well_complement(int lambda, int n_points, double eps) {
  if (lambda < 1 || n_points < 1) throw OutOfRegime("arc set: bad sizes");
  if (!(eps > 0 && eps < pi))
    throw OutOfRegime("arc set: complement radius must lie in (0, pi)");
  const int k = lambda * n_points;
  std::vector<Arc> arcs(k);
  for (int j = 0; j < k; ++j) {
    arcs[j].start = (two_pi * j + eps) / k;
    arcs[j].end = (two_pi * (j + 1) - eps) / k;
  }
  return ArcSet(std::move(arcs));
}

ArcSet ArcSet::well_window(int lambda, int n_points, double eps) {
  if (lambda < 1 || n_points < 1) throw OutOfRegime("arc set: bad sizes");
  if (!(eps > 0 && eps <= 0.5))
    throw OutOfRegime("arc set: window half-width must lie in (0, 1/2]");
  const double half = two_pi * eps / (lambda * n_points);
  return ArcSet({Arc{two_pi - half, two_pi + half}});
}

ArcSet ArcSet::full_circle() { return ArcSet({Arc{0.0, two_pi}}); }

double ArcSet::total_measure() const {
  double t = 0;
  for (const Arc& a : arcs_) t += a.length();
  return t;
}

NystromSystem::NystromSystem(const KernelContext& ctx, const ArcSet& set,
                             int nodes_per_arc, bool auto_refine) {
  const int k = static_cast<int>(set.arcs().size());
  if (k == 0) {
    converged_ = true;
    return;
  }
  if (nodes_per_arc < 2)
    throw InsufficientResolution("nystrom: need at least 2 nodes per arc");
  if (nodes_per_arc > kMaxNodesPerArc || nodes_per_arc * k > kMaxTotalNodes)
    throw CostCap("nystrom: requested resolution exceeds the node budget");

  build(ctx, set, nodes_per_arc);
  if (!auto_refine) {
    converged_ = true;
    return;
  }
  double prev = det_one_minus(eigs_);
  for (;;) {
    int next = per_arc_ * 2;
    if (next > kMaxNodesPerArc || next * k > kMaxTotalNodes) {
      converged_ = false;
      break;
    }
    build(ctx, set, next);
    double cur = det_one_minus(eigs_);
    if (std::abs(cur - prev) < kDetStabilityTol) {
      converged_ = true;
      break;
    }
    prev = cur;
  }
}

void NystromSystem::build(const KernelContext& ctx, const ArcSet& set, int per_arc) {
  const auto& arcs = set.arcs();
  const int k = static_cast<int>(arcs.size());
  const int total = k * per_arc;
  per_arc_ = per_arc;

  // Shift symmetry: when the arcs are translates by a multiple of the weight
  // period, the kernel block between arcs a and b depends only on a-b, so one
  // block-column of evaluations fills the whole matrix.
  const double step = set.translation_step();
  bool structured = false;
  if (set.translation_structured()) {
    double cycles = step * ctx.period_multiplier() / two_pi;
    structured = std::abs(cycles - std::round(cycles)) < 1e-9;
  }

  Eigen::MatrixXd a(total, total);
  if (structured) {
    std::vector<double> u(per_arc), q(per_arc);
    gauss_legendre_on(per_arc, arcs[0].start, arcs[0].end, u, q);
    nodes_.assign(total, 0.0);
    weights_.assign(total, 0.0);
    for (int d = 0; d < k; ++d)
      for (int i = 0; i < per_arc; ++i) {
        nodes_[d * per_arc + i] = u[i] + d * step;
        weights_[d * per_arc + i] = q[i];
      }
    std::vector<std::vector<double>> block(k);
    parallel_for(k, [&](std::size_t d) {
      auto& b = block[d];
      b.resize(per_arc * per_arc);
      for (int i = 0; i < per_arc; ++i)
        for (int j = 0; j < per_arc; ++j)
          b[i * per_arc + j] = ctx.kernel(u[i] + static_cast<double>(d) * step, u[j]);
    });
    std::vector<double> s(per_arc);
    for (int i = 0; i < per_arc; ++i) s[i] = std::sqrt(q[i]);
    // Signed shift, not mod k: wrapping by a full turn is not a kernel
    // symmetry for even point counts, but K(u_i + d h, u_j) = K(u_j - d h,
    // u_i) always holds, so negative shifts reuse the transposed block.
    for (int ba = 0; ba < k; ++ba)
      for (int bb = 0; bb < k; ++bb) {
        const bool flip = ba < bb;
        const auto& b = block[flip ? bb - ba : ba - bb];
        for (int i = 0; i < per_arc; ++i)
          for (int j = 0; j < per_arc; ++j)
            a(ba * per_arc + i, bb * per_arc + j) =
                s[i] * s[j] * (flip ? b[j * per_arc + i] : b[i * per_arc + j]);
      }
  } else {
    nodes_.clear();
    weights_.clear();
    nodes_.reserve(total);
    weights_.reserve(total);
    std::vector<double> u(per_arc), q(per_arc);
    for (const Arc& arc : arcs) {
      gauss_legendre_on(per_arc, arc.start, arc.end, u, q);
      nodes_.insert(nodes_.end(), u.begin(), u.end());
      weights_.insert(weights_.end(), q.begin(), q.end());
    }
    auto km = ctx.kernel_matrix(nodes_);
    std::vector<double> s(total);
    for (int i = 0; i < total; ++i) s[i] = std::sqrt(weights_[i]);
    for (int i = 0; i < total; ++i)
      for (int j = 0; j < total; ++j) a(i, j) = s[i] * s[j] * km[i][j];
  }

  trace_ = 0;
  for (int i = 0; i < total; ++i) trace_ += a(i, i);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericError("nystrom: eigenvalue decomposition failed");
  eigs_.assign(es.eigenvalues().data(), es.eigenvalues().data() + total);
  std::reverse(eigs_.begin(), eigs_.end());
}

cplx fredholm_det(const NystromSystem& sys, cplx z) {
  cplx p(1, 0);
  for (double e : sys.eigenvalues()) p *= cplx(1, 0) + z * e;
  return p;
}

double gap_probability(const KernelContext& ctx, const ArcSet& set) {
  NystromSystem sys(ctx, set);
  if (!sys.converged())
    throw InsufficientResolution("gap probability: quadrature did not stabilize "
                                 "within the node budget");
  double g = det_one_minus(sys.eigenvalues());
  if (g < -1e-6 || g > 1 + 1e-6)
    throw CheckFailed("gap probability " + std::to_string(g) + " outside [0,1]");
  return std::min(1.0, std::max(0.0, g));
}

std::vector<double> count_distribution(const NystromSystem& sys, int n_points) {
  if (n_points < 0) throw OutOfRegime("count distribution: negative point total");
  std::vector<double> p{1.0};
  for (double e : sys.eigenvalues()) {
    if (e < -1e-8 || e > 1 + 1e-8)
      throw CheckFailed("count distribution: eigenvalue " + std::to_string(e) +
                        " outside [0,1]");
    e = std::min(1.0, std::max(0.0, e));
    if (e < 1e-14) continue;
    std::vector<double> q(p.size() + 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
      q[i] += (1 - e) * p[i];
      q[i + 1] += e * p[i];
    }
    p = std::move(q);
  }
  if (static_cast<int>(p.size()) > n_points + 1) {
    double tail = 0;
    for (std::size_t i = n_points + 1; i < p.size(); ++i) tail += p[i];
    if (tail > 1e-8)
      throw CheckFailed("count distribution: mass " + std::to_string(tail) +
                        " beyond the point total");
  }
  p.resize(n_points + 1, 0.0);
  return p;
}

double count_probability(const KernelContext& ctx, const ArcSet& set, int k) {
  if (k < 0) throw OutOfRegime("count probability: negative count");
  if (k > ctx.n_points()) return 0.0;
  NystromSystem sys(ctx, set);
  if (!sys.converged())
    throw InsufficientResolution("count probability: quadrature did not stabilize "
                                 "within the node budget");
  return count_distribution(sys, ctx.n_points())[k];
}

double series_moment(const KernelContext& ctx, const ArcSet& set, int m,
                     int nodes_per_arc) {
  if (m < 1) throw OutOfRegime("correlation moment: order must be >= 1");
  if (m > 6) throw CostCap("correlation moment: order capped at 6");
  static const int kDefault[7] = {0, 512, 160, 64, 40, 24, 16};
  int per = nodes_per_arc > 0 ? nodes_per_arc : kDefault[m];
  if (per < 2) throw InsufficientResolution("correlation moment: too few nodes");

  std::vector<double> nodes, weights;
  std::vector<double> u(per), q(per);
  for (const Arc& arc : set.arcs()) {
    gauss_legendre_on(per, arc.start, arc.end, u, q);
    nodes.insert(nodes.end(), u.begin(), u.end());
    weights.insert(weights.end(), q.begin(), q.end());
  }
  const int total = static_cast<int>(nodes.size());
  if (total == 0) return 0.0;
  if (total < m) return 0.0;
  if (binomial_estimate(total, m) > 5e7)
    throw CostCap("correlation moment: combination count exceeds budget");

  if (m == 1) {
    xreal acc = 0;
    for (int i = 0; i < total; ++i)
      acc += static_cast<xreal>(weights[i]) * ctx.kernel_diag_x(nodes[i]);
    return static_cast<double>(acc);
  }

  // Scaled matrix S = sqrt(q_i q_j) K_ij: an m-minor determinant of S already
  // carries the product of the m quadrature weights.
  auto km = ctx.kernel_matrix(nodes);
  std::vector<double> s(total);
  for (int i = 0; i < total; ++i) s[i] = std::sqrt(weights[i]);
  std::vector<double> sm(static_cast<std::size_t>(total) * total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      sm[static_cast<std::size_t>(i) * total + j] = s[i] * s[j] * km[i][j];

  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  double buf[36];
  xreal acc = 0;
  for (;;) {
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        buf[r * m + c] = sm[static_cast<std::size_t>(idx[r]) * total + idx[c]];
    acc += det_small(buf, m);

    int pos = m - 1;
    while (pos >= 0 && idx[pos] == total - m + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
  xreal fact = 1;
  for (int i = 2; i <= m; ++i) fact *= i;
  return static_cast<double>(fact * acc);
}

double series_moment_limit(int lambda, double eps, double t, int m) {
  if (m < 1) throw OutOfRegime("limit moment: order must be >= 1");
  if (m > 4) throw CostCap("limit moment: order capped at 4");
  if (lambda < 1) throw OutOfRegime("limit moment: lambda must be >= 1");
  if (!(eps > 0 && eps <= 0.5)) throw OutOfRegime("limit moment: bad window");
  if (!(t > 0)) throw OutOfRegime("limit moment: depth must be positive");

  // Nodes graded toward the well concentration scale around x = 0.
  const double sigma = 1 / (two_pi * std::sqrt(t));
  auto breaks = graded_breakpoints(-eps, eps, 0.0, sigma);
  std::vector<double> nodes, weights;
  std::vector<double> u(16), q(16);
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    gauss_legendre_on(16, breaks[p], breaks[p + 1], u, q);
    nodes.insert(nodes.end(), u.begin(), u.end());
    weights.insert(weights.end(), q.begin(), q.end());
  }
  const int total = static_cast<int>(nodes.size());
  if (total < m) return 0.0;
  if (binomial_estimate(total, m) > 5e7)
    throw CostCap("limit moment: combination count exceeds budget");

  const xreal mu0 = bessel_moment_oracle_x(t, 0) * std::exp(static_cast<xreal>(-t));
  std::vector<double> qf(total);
  for (int i = 0; i < total; ++i) {
    xreal f = std::exp(t * (std::cos(two_pi_x * nodes[i]) - 1)) / mu0;
    qf[i] = static_cast<double>(weights[i] * f);
  }
  if (m == 1) {
    xreal acc = 0;
    for (int i = 0; i < total; ++i) acc += qf[i];
    return static_cast<double>(acc * std::pow(two_pi_x / lambda, m));
  }

  std::vector<double> sinc_mat(static_cast<std::size_t>(total) * total);
  for (int i = 0; i < total; ++i)
    for (int j = 0; j < total; ++j)
      sinc_mat[static_cast<std::size_t>(i) * total + j] =
          static_cast<double>(sinc_x(pi_x * (static_cast<xreal>(nodes[i]) - nodes[j]) / lambda));

  std::vector<int> idx(m);
  for (int i = 0; i < m; ++i) idx[i] = i;
  double buf[16];
  xreal acc = 0;
  for (;;) {
    double w = 1;
    for (int r = 0; r < m; ++r) w *= qf[idx[r]];
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        buf[r * m + c] = sinc_mat[static_cast<std::size_t>(idx[r]) * total + idx[c]];
    acc += w * det_small(buf, m);

    int pos = m - 1;
    while (pos >= 0 && idx[pos] == total - m + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < m; ++i) idx[i] = idx[i - 1] + 1;
  }
  return static_cast<double>(acc * std::pow(two_pi_x / lambda, m));
}

TraceBoundReport trace_bound_check(const KernelContext& ctx, const ArcSet& set) {
  TraceBoundReport rep;
  if (set.arcs().empty()) {
    rep.missing_mass = 0;
    rep.tau = 0;
    rep.bound = 0;
    return rep;
  }
  rep.missing_mass = 1 - gap_probability(ctx, set);

  const int lam = ctx.period_multiplier();
  const bool monomial_regime = lam >= ctx.n_points();
  // In the monomial regime every basis element below the period multiplier is
  // a pure power, so K(theta,theta) = N w(theta) / mu_0 exactly and the trace
  // reduces to a weight integral.
  auto arc_integral = [&](const Arc& arc) -> xreal {
    int n = 64;
    std::vector<double> u, q;
    xreal prev = 0;
    for (;;) {
      u.resize(n);
      q.resize(n);
      gauss_legendre_on(n, arc.start, arc.end, u, q);
      xreal acc = 0;
      if (monomial_regime) {
        for (int i = 0; i < n; ++i)
          acc += static_cast<xreal>(q[i]) * ctx.weight().eval_x(u[i]);
        acc *= static_cast<xreal>(ctx.n_points()) / ctx.weight_mu0();
      } else {
        for (int i = 0; i < n; ++i)
          acc += static_cast<xreal>(q[i]) * ctx.kernel_diag_x(u[i]);
      }
      if (n > 64 && std::abs(static_cast<double>(acc - prev)) <
                        1e-11 * (1 + std::abs(static_cast<double>(acc))))
        return acc;
      if (n >= 2048) return acc;
      prev = acc;
      n *= 2;
    }
  };

  const double step = set.translation_step();
  bool structured = false;
  if (set.translation_structured()) {
    double cycles = step * lam / two_pi;
    structured = std::abs(cycles - std::round(cycles)) < 1e-9;
  }
  xreal tau = 0;
  if (structured) {
    tau = arc_integral(set.arcs()[0]) * static_cast<xreal>(set.arcs().size());
  } else {
    for (const Arc& arc : set.arcs()) tau += arc_integral(arc);
  }
  rep.tau = static_cast<double>(tau);
  rep.bound = static_cast<double>(tau * std::exp(tau + 1));
  if (rep.missing_mass > rep.bound + 1e-9)
    throw CheckFailed("trace bound violated: 1 - gap = " +
                      std::to_string(rep.missing_mass) + " > " +
                      std::to_string(rep.bound));
  return rep;
}

DecayFitReport laplace_decay_check(int lambda, double eps,
                                   std::span<const double> t_values, int m) {
  if (t_values.size() < 3)
    throw OutOfRegime("decay fit: need at least 3 depth values");
  for (std::size_t i = 1; i < t_values.size(); ++i)
    if (!(t_values[i] > t_values[i - 1]))
      throw OutOfRegime("decay fit: depth values must increase");
  if (m < 2) throw OutOfRegime("decay fit: order 1 tends to a constant");

  DecayFitReport rep;
  rep.values.reserve(t_values.size());
  std::vector<double> lx, ly;
  for (double t : t_values) {
    double v = series_moment_limit(lambda, eps, t, m);
    rep.values.push_back(v);
    if (!(v > 0)) throw NumericError("decay fit: nonpositive moment");
    lx.push_back(std::log(t));
    ly.push_back(std::log(v));
  }
  const std::size_t n = lx.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  rep.slope = sxy / sxx;
  if (rep.slope > -0.8)
    throw CheckFailed("decay fit: slope " + std::to_string(rep.slope) +
                      " is too shallow");
  return rep;
}

}  // namespace oscue
