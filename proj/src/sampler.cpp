#include "oscue/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace oscue {

namespace {

bool arc_contains(const Arc& arc, double theta) {
  double d = theta;
  if (d < arc.start) d += two_pi;
  return d >= arc.start && d < arc.end;
}

bool set_contains(const ArcSet& set, double theta) {
  for (const Arc& a : set.arcs())
    if (arc_contains(a, theta)) return true;
  return false;
}

}  // namespace

DppSampler::DppSampler(const KernelContext& ctx, DppOptions opts)
    : ctx_(ctx), opts_(opts) {
  if (opts_.grid_per_point < 2)
    throw GridTooCoarse("dpp sampler: grid too small");
  const int scale = std::max(1, ctx.period_multiplier() / ctx.n_points());
  const int g = opts_.grid_per_point * scale;
  grid_.resize(g);
  features_.resize(g);
  parallel_for(g, [&](std::size_t i) {
    grid_[i] = two_pi * static_cast<double>(i) / g;
    features_[i] = ctx_.orthonormal_all(grid_[i]);
  });
}

EigenSample DppSampler::sample(std::uint64_t seed) const {
  const int n = ctx_.n_points();
  const int g = static_cast<int>(grid_.size());
  const double h = two_pi / g;
  CounterRng rng(seed);

  // Conditional intensity on the grid, deflated in place as points are drawn.
  std::vector<double> dens(g);
  for (int i = 0; i < g; ++i) {
    double acc = 0;
    for (int l = 0; l < n; ++l) acc += std::norm(features_[i][l]);
    dens[i] = acc;
  }
  std::vector<std::vector<cplx>> basis;  // orthonormal deflation directions
  basis.reserve(n);
  std::vector<double> cum(g + 1);
  std::vector<double> angles(n);

  for (int j = 0; j < n; ++j) {
    cum[0] = 0;
    for (int i = 0; i < g; ++i) {
      double next = dens[(i + 1) % g];
      cum[i + 1] = cum[i] + h * (dens[i] + next) / 2;
    }
    const double total = cum[g];
    const double expected = n - j;
    if (std::abs(total - expected) > opts_.mass_tol * expected)
      throw GridTooCoarse("dpp sampler: conditional mass " + std::to_string(total) +
                          " drifted from " + std::to_string(expected));

    const double target = rng.uniform() * total;
    int cell = static_cast<int>(std::upper_bound(cum.begin(), cum.end(), target) -
                                cum.begin()) - 1;
    cell = std::min(std::max(cell, 0), g - 1);
    // Invert the linear density on the cell: solve p0 x + (p1-p0) x^2/(2h) = r.
    const double r = target - cum[cell];
    const double p0 = dens[cell];
    const double p1 = dens[(cell + 1) % g];
    const double slope = (p1 - p0) / h;
    double x;
    if (std::abs(slope) * h < 1e-12 * (p0 + 1e-300)) {
      x = p0 > 0 ? r / p0 : h / 2;
    } else {
      double disc = p0 * p0 + 2 * slope * r;
      if (disc < 0) disc = 0;
      x = (std::sqrt(disc) - p0) / slope;
    }
    x = std::min(std::max(x, 0.0), h);
    const double theta = wrap_angle(grid_[cell] + x);
    angles[j] = theta;

    // Exact features at the accepted point, double Gram-Schmidt deflation.
    std::vector<cplx> v = ctx_.orthonormal_all(theta);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) {
        cplx ip(0, 0);
        for (int l = 0; l < n; ++l) ip += std::conj(b[l]) * v[l];
        for (int l = 0; l < n; ++l) v[l] -= ip * b[l];
      }
    double nrm2 = 0;
    for (int l = 0; l < n; ++l) nrm2 += std::norm(v[l]);
    if (!(nrm2 > 0))
      throw GridTooCoarse("dpp sampler: degenerate draw, grid cannot resolve "
                          "the conditional density");
    const double inv = 1 / std::sqrt(nrm2);
    for (int l = 0; l < n; ++l) v[l] *= inv;

    for (int i = 0; i < g; ++i) {
      cplx ip(0, 0);
      const auto& f = features_[i];
      for (int l = 0; l < n; ++l) ip += std::conj(v[l]) * f[l];
      dens[i] = std::max(dens[i] - std::norm(ip), 0.0);
    }
    basis.push_back(std::move(v));
  }

  std::sort(angles.begin(), angles.end());
  EigenSample s;
  s.angles = std::move(angles);
  s.seed = seed;
  s.method = SampleMethod::ProjectionDpp;
  return s;
}

EigenSample sample_dpp(const KernelContext& ctx, std::uint64_t seed,
                       const DppOptions& opts) {
  return DppSampler(ctx, opts).sample(seed);
}

namespace {

class McmcChain {
 public:
  McmcChain(const Weight& w, int n, std::uint64_t seed, const McmcOptions& opts)
      : w_(w), n_(n), rng_(seed), opts_(opts), step_(opts.initial_step), x_(n) {
    for (int a = 0; a < n; ++a) x_[a] = two_pi * (a + 0.5) / n;
  }

  void burn_in() {
    long window_acc = 0, window_prop = 0;
    for (int s = 0; s < opts_.burn_in_sweeps; ++s) {
      auto [acc, prop] = sweep();
      window_acc += acc;
      window_prop += prop;
      if ((s + 1) % opts_.tune_interval == 0) {
        double rate = window_prop ? static_cast<double>(window_acc) / window_prop : 0;
        step_ *= std::exp(rate - opts_.target_acceptance);
        step_ = std::min(std::max(step_, 1e-5), pi);
        last_rate_ = rate;
        window_acc = window_prop = 0;
      }
    }
  }

  // Runs sweeps without tuning; returns the acceptance rate over them.
  double run(int sweeps) {
    long acc = 0, prop = 0;
    for (int s = 0; s < sweeps; ++s) {
      auto [a, p] = sweep();
      acc += a;
      prop += p;
    }
    return prop ? static_cast<double>(acc) / prop : last_rate_;
  }

  EigenSample snapshot(std::uint64_t seed) const {
    EigenSample s;
    s.angles = x_;
    std::sort(s.angles.begin(), s.angles.end());
    s.seed = seed;
    s.method = SampleMethod::Mcmc;
    return s;
  }

  double step() const { return step_; }
  double last_rate() const { return last_rate_; }

 private:
  std::pair<long, long> sweep() {
    long acc = 0;
    for (int a = 0; a < n_; ++a) {
      double y = wrap_angle(x_[a] + step_ * (2 * rng_.uniform() - 1));
      double dlp = static_cast<double>(w_.log_eval_x(y) - w_.log_eval_x(x_[a]));
      for (int b = 0; b < n_; ++b) {
        if (b == a) continue;
        dlp += 2 * (std::log(std::abs(2 * std::sin((y - x_[b]) / 2))) -
                    std::log(std::abs(2 * std::sin((x_[a] - x_[b]) / 2))));
      }
      if (dlp >= 0 || std::log(rng_.uniform()) < dlp) {
        x_[a] = y;
        ++acc;
      }
    }
    return {acc, n_};
  }

  const Weight& w_;
  int n_;
  CounterRng rng_;
  McmcOptions opts_;
  double step_;
  double last_rate_ = 0.0;
  std::vector<double> x_;
};

}  // namespace

EigenSample sample_mcmc(const Weight& w, int n_points, int extra_sweeps,
                        std::uint64_t seed, const McmcOptions& opts,
                        McmcDiagnostics* diag) {
  if (n_points < 1) throw OutOfRegime("mcmc: need at least one point");
  McmcChain chain(w, n_points, seed, opts);
  chain.burn_in();
  double rate = chain.run(extra_sweeps);
  if (diag) {
    diag->acceptance_rate = rate;
    diag->step = chain.step();
  }
  return chain.snapshot(seed);
}

std::vector<EigenSample> sample_mcmc_chain(const Weight& w, int n_points,
                                           int n_samples, std::uint64_t seed,
                                           const McmcOptions& opts,
                                           McmcDiagnostics* diag) {
  if (n_points < 1) throw OutOfRegime("mcmc: need at least one point");
  if (n_samples < 1) throw OutOfRegime("mcmc: need at least one sample");
  McmcChain chain(w, n_points, seed, opts);
  chain.burn_in();
  std::vector<EigenSample> out;
  out.reserve(n_samples);
  double rate_sum = 0;
  for (int s = 0; s < n_samples; ++s) {
    rate_sum += chain.run(n_points);  // thin by one sweep per point
    out.push_back(chain.snapshot(seed));
  }
  if (diag) {
    diag->acceptance_rate = rate_sum / n_samples;
    diag->step = chain.step();
  }
  return out;
}

Histogram empirical_density(const std::vector<EigenSample>& samples, int bins) {
  if (samples.size() < 100)
    throw InsufficientResolution("density histogram: need at least 100 samples");
  if (bins < 1) throw OutOfRegime("density histogram: need at least one bin");
  Histogram hist;
  hist.edges.resize(bins + 1);
  for (int b = 0; b <= bins; ++b) hist.edges[b] = two_pi * b / bins;
  std::vector<double> count(bins, 0.0);
  for (const auto& s : samples)
    for (double a : s.angles) {
      int b = static_cast<int>(wrap_angle(a) / two_pi * bins);
      b = std::min(std::max(b, 0), bins - 1);
      count[b] += 1;
    }
  const double h = two_pi / bins;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h);
  hist.density.resize(bins);
  hist.se.resize(bins);
  for (int b = 0; b < bins; ++b) {
    hist.density[b] = count[b] * norm;
    hist.se[b] = std::sqrt(count[b]) * norm;
  }
  return hist;
}

CountDistribution empirical_counts(const std::vector<EigenSample>& samples,
                                   const ArcSet& set, int n_points) {
  if (samples.empty()) throw InsufficientResolution("count histogram: no samples");
  CountDistribution dist;
  dist.p.assign(n_points + 1, 0.0);
  dist.se.assign(n_points + 1, 0.0);
  const double s_count = static_cast<double>(samples.size());
  double sum = 0, sum2 = 0;
  for (const auto& s : samples) {
    int k = 0;
    for (double a : s.angles)
      if (set_contains(set, wrap_angle(a))) ++k;
    k = std::min(k, n_points);
    dist.p[k] += 1;
    sum += k;
    sum2 += static_cast<double>(k) * k;
  }
  for (int k = 0; k <= n_points; ++k) {
    double p = dist.p[k] / s_count;
    dist.p[k] = p;
    dist.se[k] = std::sqrt(p * (1 - p) / s_count);
  }
  dist.mean = sum / s_count;
  double var = sum2 / s_count - dist.mean * dist.mean;
  dist.mean_se = std::sqrt(std::max(var, 0.0) / s_count);
  return dist;
}

std::vector<std::vector<double>> empirical_pair_correlation(
    const std::vector<EigenSample>& samples, int bins) {
  if (samples.empty()) throw InsufficientResolution("pair histogram: no samples");
  if (bins < 1) throw OutOfRegime("pair histogram: need at least one bin");
  std::vector<std::vector<double>> grid(bins, std::vector<double>(bins, 0.0));
  for (const auto& s : samples) {
    const auto& a = s.angles;
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < a.size(); ++j) {
        if (i == j) continue;
        int bi = static_cast<int>(wrap_angle(a[i]) / two_pi * bins);
        int bj = static_cast<int>(wrap_angle(a[j]) / two_pi * bins);
        bi = std::min(std::max(bi, 0), bins - 1);
        bj = std::min(std::max(bj, 0), bins - 1);
        grid[bi][bj] += 1;
      }
  }
  const double h = two_pi / bins;
  const double norm = 1.0 / (static_cast<double>(samples.size()) * h * h);
  for (auto& row : grid)
    for (double& v : row) v *= norm;
  return grid;
}

double two_sample_chi2(const std::vector<double>& counts_x,
                       const std::vector<double>& counts_y) {
  if (counts_x.size() != counts_y.size())
    throw OutOfRegime("chi2: bin counts differ in length");
  double x_total = 0, y_total = 0;
  for (double v : counts_x) x_total += v;
  for (double v : counts_y) y_total += v;
  if (!(x_total > 0) || !(y_total > 0))
    throw InsufficientResolution("chi2: empty sample");
  double t = 0;
  for (std::size_t b = 0; b < counts_x.size(); ++b) {
    double s = counts_x[b] + counts_y[b];
    if (s <= 0) continue;
    double d = counts_x[b] / x_total - counts_y[b] / y_total;
    t += d * d * (x_total * y_total) / s;
  }
  return t;
}

}  // namespace oscue
