#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "oscue/sampler.hpp"

using namespace oscue;

namespace {

std::vector<EigenSample> draw_dpp(const KernelContext& ctx, int n_samples,
                                  std::uint64_t seed) {
  DppSampler sampler(ctx);
  CounterRng root(seed);
  std::vector<EigenSample> out(n_samples);
  parallel_for(n_samples, [&](std::size_t i) {
    out[i] = sampler.sample(root.split(i).key());
  });
  return out;
}

// Bin boundaries chosen so every bin has equal expected mass under the exact
// one-point density; counts then feed a chi^2 against the uniform multinomial.
double chi2_vs_profile(const std::vector<EigenSample>& samples,
                       const KernelContext& ctx, int bins) {
  const int grid = 4096;
  std::vector<double> cdf(grid + 1, 0.0);
  for (int i = 0; i < grid; ++i) {
    double th = two_pi * (i + 0.5) / grid;
    cdf[i + 1] = cdf[i] + ctx.kernel_diag(th);
  }
  for (int i = 0; i <= grid; ++i) cdf[i] /= cdf[grid];
  std::vector<double> edges(bins + 1, 0.0);
  edges[bins] = two_pi;
  for (int b = 1; b < bins; ++b) {
    double target = static_cast<double>(b) / bins;
    auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
    edges[b] = two_pi * static_cast<double>(it - cdf.begin()) / grid;
  }
  std::vector<double> counts(bins, 0.0);
  double total = 0;
  for (const auto& s : samples)
    for (double a : s.angles) {
      int b = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), a) -
                               edges.begin()) - 1;
      b = std::min(std::max(b, 0), bins - 1);
      counts[b] += 1;
      total += 1;
    }
  double expect = total / bins;
  double t = 0;
  for (double c : counts) t += (c - expect) * (c - expect) / expect;
  return t;
}

}  // namespace

TEST_CASE("dpp samples are sorted, in range, reproducible") {
  Weight w(PotentialSpec::cosine(1.0), 2);
  KernelContext ctx(w, 4);
  DppSampler sampler(ctx);
  EigenSample a = sampler.sample(99);
  EigenSample b = sampler.sample(99);
  EigenSample c = sampler.sample(100);
  REQUIRE(a.angles.size() == 4);
  CHECK(std::is_sorted(a.angles.begin(), a.angles.end()));
  for (double th : a.angles) {
    CHECK(th >= 0.0);
    CHECK(th < two_pi);
  }
  CHECK(a.angles == b.angles);
  CHECK(a.angles != c.angles);
  CHECK(a.seed == 99);
  CHECK(a.method == SampleMethod::ProjectionDpp);
}

TEST_CASE("single point sampler matches the exact marginal") {
  // N = 1: angles are iid with density w/mu_0; Kolmogorov-Smirnov against the
  // exact CDF at the 1% level (coefficient 1.6276 for the limiting law).
  Weight w(PotentialSpec::cosine(2.0), 1);
  KernelContext ctx(w, 1);
  const int n = 10000;
  auto samples = draw_dpp(ctx, n, 7001);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) xs[i] = samples[i].angles[0];
  std::sort(xs.begin(), xs.end());
  const int grid = 8192;
  std::vector<double> cdf(grid + 1, 0.0);
  for (int i = 0; i < grid; ++i)
    cdf[i + 1] = cdf[i] + w(two_pi * (i + 0.5) / grid);
  for (int i = 0; i <= grid; ++i) cdf[i] /= cdf[grid];
  double dmax = 0;
  for (int i = 0; i < n; ++i) {
    double u = cdf[static_cast<int>(xs[i] / two_pi * grid)];
    dmax = std::max(dmax, std::abs(u - (i + 0.5) / n));
  }
  CHECK(dmax <= 1.6276236307187293 / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("grid resolution guard") {
  Weight w(PotentialSpec::cosine(1.0), 1);
  KernelContext ctx(w, 3);
  DppOptions coarse;
  coarse.grid_per_point = 8;  // 24 grid points for a 3-point projection
  coarse.mass_tol = 1e-12;
  CHECK_THROWS_AS(DppSampler(ctx, coarse).sample(1), GridTooCoarse);
}

TEST_CASE("flat ensemble samples are uniform") {
  KernelContext ctx(Weight(PotentialSpec::zero(), 1), 4);
  auto samples = draw_dpp(ctx, 1500, 4242);
  // 16 equal bins; exact one-point density is flat, so plain chi^2 applies.
  double t = chi2_vs_profile(samples, ctx, 16);
  CHECK(t <= 30.57791416689249);  // chi^2 0.99 quantile, 15 dof
}

TEST_CASE("mcmc sampler equilibrates on the flat ensemble") {
  Weight w(PotentialSpec::zero(), 1);
  McmcOptions opts;
  opts.burn_in_sweeps = 2000;
  McmcDiagnostics diag;
  auto samples = sample_mcmc_chain(w, 4, 1500, 515, opts, &diag);
  REQUIRE(samples.size() == 1500);
  CHECK(diag.acceptance_rate >= 0.1);
  CHECK(diag.acceptance_rate <= 0.7);
  for (const auto& s : samples) {
    REQUIRE(s.angles.size() == 4);
    CHECK(std::is_sorted(s.angles.begin(), s.angles.end()));
    CHECK(s.method == SampleMethod::Mcmc);
  }
  KernelContext ctx(w, 4);
  double t = chi2_vs_profile(samples, ctx, 16);
  CHECK(t <= 30.57791416689249);
}

TEST_CASE("dpp and mcmc agree on the one point histogram") {
  // Independent algorithms, same ensemble: binned angle histograms must be
  // statistically indistinguishable (two-sample chi^2, 1% level).
  for (double t : {0.0, 2.0}) {
    Weight w(t == 0.0 ? PotentialSpec::zero() : PotentialSpec::cosine(t), 1);
    KernelContext ctx(w, 4);
    const int n = 1000;
    auto dpp = draw_dpp(ctx, n, 811);
    McmcOptions opts;
    opts.burn_in_sweeps = 3000;
    auto mcmc = sample_mcmc_chain(w, 4, n, 813, opts);
    const int bins = 16;
    std::vector<double> counts_x(bins, 0.0), counts_y(bins, 0.0);
    auto tally = [&](const std::vector<EigenSample>& s, std::vector<double>& c) {
      for (const auto& e : s)
        for (double a : e.angles)
          c[std::min(bins - 1, static_cast<int>(a / two_pi * bins))] += 1;
    };
    tally(dpp, counts_x);
    tally(mcmc, counts_y);
    double stat = two_sample_chi2(counts_x, counts_y);
    CHECK(stat <= 30.57791416689249);  // chi^2 0.99 quantile, 15 dof
  }
}

TEST_CASE("count statistics match the determinantal prediction") {
  Weight w(PotentialSpec::cosine(2.0), 2);
  KernelContext ctx(w, 4);
  ArcSet set = ArcSet::well_window(2, 4, 0.25);
  const int n = 1000;
  auto samples = draw_dpp(ctx, n, 333);
  CountDistribution emp = empirical_counts(samples, set, 4);
  NystromSystem sys(ctx, set);
  std::vector<double> exact = count_distribution(sys, 4);
  CHECK(std::abs(emp.mean - sys.trace()) <= 3 * emp.mean_se + 1e-12);
  for (int k = 0; k <= 4; ++k) {
    double se = std::max(emp.se[k], 1e-3);
    CHECK(std::abs(emp.p[k] - exact[k]) <= 3.5 * se);
  }
}

TEST_CASE("empirical density tracks the kernel diagonal") {
  Weight w(PotentialSpec::cosine(1.5), 1);
  KernelContext ctx(w, 3);
  const int n = 4000;
  auto samples = draw_dpp(ctx, n, 616);
  Histogram h = empirical_density(samples, 24);
  REQUIRE(h.edges.size() == 25);
  // Histogram integral = point count.
  double mass = 0;
  for (int b = 0; b < 24; ++b) mass += h.density[b] * (h.edges[b + 1] - h.edges[b]);
  CHECK(mass == doctest::Approx(3.0).epsilon(1e-12));
  for (int b = 0; b < 24; ++b) {
    double mid = 0.5 * (h.edges[b] + h.edges[b + 1]);
    // Bin-averaged profile vs cell midpoint: allow 4 SE plus a smoothing term.
    double tol = 4 * h.se[b] + 0.05 * ctx.kernel_diag(mid);
    CHECK(std::abs(h.density[b] - ctx.kernel_diag(mid)) <= tol);
  }
}

TEST_CASE("well shift equivariance") {
  // Shifting all angles by one well period maps the ensemble to itself; the
  // per-well occupancy histogram must be flat across wells.
  Weight w(PotentialSpec::cosine(3.0), 4);
  KernelContext ctx(w, 4);
  auto samples = draw_dpp(ctx, 2000, 99);
  std::vector<double> per_well(4, 0.0);
  for (const auto& s : samples)
    for (double a : s.angles)
      per_well[static_cast<int>(a / (two_pi / 4)) % 4] += 1;
  double total = 8000;
  for (double c : per_well) {
    // Multinomial SE with p = 1/4.
    double se = std::sqrt(total * 0.25 * 0.75);
    CHECK(std::abs(c - total / 4) <= 4 * se);
  }
}
