#pragma once

#include <cstdint>
#include <vector>

#include "oscue/fredholm.hpp"
#include "oscue/kernel.hpp"
#include "oscue/rng.hpp"

namespace oscue {

enum class SampleMethod { ProjectionDpp, Mcmc };

struct EigenSample {
  std::vector<double> angles;  // sorted, in [0, 2pi)
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::ProjectionDpp;
};

struct DppOptions {
  int grid_per_point = 4096;  // grid size = grid_per_point * max(1, Lambda/N)
  double mass_tol = 1e-6;     // conditional-mass drift before GridTooCoarse
};

// Exact sequential sampler for the determinantal ensemble: draw each point
// from the deflated marginal via inverse CDF on a fine grid, then
// Gram-Schmidt-remove its feature vector (HKPV algorithm for projection
// kernels).  The grid feature matrix is precomputed once per context.
class DppSampler {
 public:
  DppSampler(const KernelContext& ctx, DppOptions opts = {});
  EigenSample sample(std::uint64_t seed) const;
  int grid_size() const { return static_cast<int>(grid_.size()); }

 private:
  const KernelContext& ctx_;
  DppOptions opts_;
  std::vector<double> grid_;                    // theta values
  std::vector<std::vector<cplx>> features_;     // [grid][l] orthonormal values
};

EigenSample sample_dpp(const KernelContext& ctx, std::uint64_t seed,
                       const DppOptions& opts = {});

struct McmcOptions {
  int burn_in_sweeps = 10000;
  double target_acceptance = 0.3;
  int tune_interval = 50;      // sweeps between step adjustments during burn-in
  double initial_step = 0.5;
};

struct McmcDiagnostics {
  double acceptance_rate = 0.0;  // post burn-in
  double step = 0.0;
};

// Single-site circular random-walk Metropolis on the joint eigenvalue density
// log p = 2 sum_{a<b} log|2 sin((x_a - x_b)/2)| - sum_a V(Lambda x_a).
// Independent of the determinantal machinery; used as a cross-validation
// oracle.  Returns the state after burn_in + extra_sweeps sweeps.
EigenSample sample_mcmc(const Weight& w, int n_points, int extra_sweeps,
                        std::uint64_t seed, const McmcOptions& opts = {},
                        McmcDiagnostics* diag = nullptr);

// Chain version: one burn-in, then n_samples states thinned by n_points sweeps.
std::vector<EigenSample> sample_mcmc_chain(const Weight& w, int n_points,
                                           int n_samples, std::uint64_t seed,
                                           const McmcOptions& opts = {},
                                           McmcDiagnostics* diag = nullptr);

struct Histogram {
  std::vector<double> edges;    // size bins + 1, spanning [0, 2pi]
  std::vector<double> density;  // normalized so the integral is n_points
  std::vector<double> se;       // per-bin standard error of the density
};

// One-point density estimate; needs >= 100 samples.
Histogram empirical_density(const std::vector<EigenSample>& samples, int bins);

struct CountDistribution {
  std::vector<double> p;   // P(count = k), k = 0..n_points
  std::vector<double> se;
  double mean = 0.0;
  double mean_se = 0.0;
};

// Distribution of the number of angles falling in the arc set.
CountDistribution empirical_counts(const std::vector<EigenSample>& samples,
                                   const ArcSet& set, int n_points);

// Binned two-point correlation on a bins x bins grid over [0, 2pi)^2;
// cell value approximates R_2 averaged over the cell (integral sums to
// N(N-1) over the full square).
std::vector<std::vector<double>> empirical_pair_correlation(
    const std::vector<EigenSample>& samples, int bins);

// Two-sample chi^2 statistic over equal-count-expectation bins:
// T = sum_bins (X_i/X - Y_i/Y)^2 / ((X_i + Y_i)/(X*Y)), ~ chi^2_{bins-1}.
double two_sample_chi2(const std::vector<double>& counts_x,
                       const std::vector<double>& counts_y);

}  // namespace oscue
