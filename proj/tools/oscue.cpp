// oscue: ensembles with oscillatory potentials on the unit circle.
//
//   oscue <density|corr2|gap|count|sample|verify> --config <file>
//         [--out <path>] [--seed <u64>] [--threads <n>]
//
// Exit codes: 0 ok, 2 config error, 3 numeric failure, 4 verification failure.
// Every output embeds the resolved config, so runs are self-describing and
// identical invocations produce byte-identical files.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "oscue/correlation.hpp"
#include "oscue/fredholm.hpp"
#include "oscue/io.hpp"
#include "oscue/kernel.hpp"
#include "oscue/opuc.hpp"
#include "oscue/sampler.hpp"

namespace oscue {
namespace {

using nlohmann::json;

// ---------------------------------------------------------------------------
// shared plumbing

struct OutputTarget {
  std::ofstream file;
  std::ostream* stream = nullptr;

  explicit OutputTarget(const std::optional<std::string>& path) {
    if (path) {
      file.open(*path, std::ios::binary);
      if (!file) throw ConfigError("cannot open output file: " + *path);
      stream = &file;
    } else {
      stream = &std::cout;
    }
  }
  std::ostream& out() { return *stream; }
};

void write_json(const std::optional<std::string>& path, const json& j) {
  OutputTarget target(path);
  target.out() << j.dump(2) << '\n';
}

KernelBuildOptions build_options(const json& config) {
  KernelBuildOptions opts;
  opts.cond_cap = get_double(config, "cond_cap", opts.cond_cap);
  return opts;
}

// Size parameters are config errors when out of range, not numeric failures.
int require_count(const json& config, const std::string& key) {
  const int v = require_int(config, key);
  if (v < 1) throw ConfigError(key + " must be >= 1");
  return v;
}

// Grid of x values, endpoints included.
std::vector<double> linear_grid(double lo, double hi, int points) {
  if (points < 2) throw ConfigError("grid needs at least 2 points");
  if (!(hi > lo)) throw ConfigError("grid: x_max must exceed x_min");
  std::vector<double> xs(points);
  for (int i = 0; i < points; ++i)
    xs[i] = lo + (hi - lo) * static_cast<double>(i) / (points - 1);
  return xs;
}

// Region configs shared by gap and count.  Well regions fix Lambda = lambda*N;
// explicit arcs carry their own Lambda.
struct RegionSetup {
  ArcSet set;
  int lambda = 1;
  int n_points = 1;
  int lambda_cap = 1;
};

RegionSetup region_from_config(const json& config, const std::string& fallback) {
  const std::string region = get_string(config, "region", fallback);
  const int n = require_int(config, "N");
  if (n < 1) throw ConfigError("N must be >= 1");
  if (region == "arcs") {
    if (!config.contains("arcs") || !config.at("arcs").is_array())
      throw ConfigError("region 'arcs' needs an arcs array of [start, end] pairs");
    std::vector<Arc> arcs;
    for (const auto& a : config.at("arcs")) {
      if (!a.is_array() || a.size() != 2)
        throw ConfigError("each arc must be a [start, end] pair");
      arcs.push_back(Arc{a.at(0).get<double>(), a.at(1).get<double>()});
    }
    try {
      return RegionSetup{ArcSet(std::move(arcs)), get_int(config, "lambda", 1), n,
                         require_int(config, "Lambda")};
    } catch (const NumericError& e) {
      throw ConfigError(std::string("bad arcs: ") + e.what());
    }
  }
  const int lambda = require_int(config, "lambda");
  const double eps = require_double(config, "eps");
  if (lambda < 1) throw ConfigError("lambda must be >= 1");
  try {
    if (region == "well_complement")
      return RegionSetup{ArcSet::well_complement(lambda, n, eps), lambda, n,
                         lambda * n};
    if (region == "well_window")
      return RegionSetup{ArcSet::well_window(lambda, n, eps), lambda, n, lambda * n};
  } catch (const NumericError& e) {
    throw ConfigError(std::string("bad region parameters: ") + e.what());
  }
  throw ConfigError("unknown region: " + region +
                    " (want well_complement, well_window, or arcs)");
}

// ---------------------------------------------------------------------------
// density

int cmd_density(json config, const std::optional<std::string>& out_path) {
  PotentialSpec pot = potential_from_config(config);
  const std::string mode = get_string(config, "mode", "finite");
  config["mode"] = mode;

  if (mode == "finite") {
    const int n = require_count(config, "N");
    const int lambda_cap = require_count(config, "Lambda");
    const int per_period = get_int(config, "points_per_period", 256);
    config["points_per_period"] = per_period;
    KernelContext ctx(Weight(pot, lambda_cap), n, build_options(config));
    DensityProfile prof = density_of_states(ctx, per_period);
    OutputTarget target(out_path);
    CsvWriter csv(target.out(), config, {"theta", "rho"});
    for (std::size_t i = 0; i < prof.theta.size(); ++i)
      csv.row({prof.theta[i], prof.rho[i]});
    return 0;
  }

  if (mode == "limit") {
    // Microscopic-limit density on the well scale: k_diag is the m = 1 limit
    // of (1/L) R_1 at xi = 2 pi x, rho = k_diag / n, rho_adjusted is scaled
    // to 1 at x = 0.
    const int n = require_count(config, "n");
    const int lambda = require_count(config, "lambda");
    auto xs = linear_grid(get_double(config, "x_min", 0.0),
                          get_double(config, "x_max", 1.0),
                          get_int(config, "x_points", 201));
    config["x_min"] = xs.front();
    config["x_max"] = xs.back();
    config["x_points"] = static_cast<int>(xs.size());
    KernelContext ctx(Weight(pot, lambda), n, build_options(config));
    const double at_zero = ctx.kernel_diag(0.0);
    OutputTarget target(out_path);
    CsvWriter csv(target.out(), config, {"x", "k_diag", "rho", "rho_adjusted"});
    for (double x : xs) {
      double kd = ctx.kernel_diag(two_pi * x);
      csv.row({x, kd, kd / n, kd / at_zero});
    }
    return 0;
  }

  throw ConfigError("density: unknown mode " + mode + " (want finite or limit)");
}

// ---------------------------------------------------------------------------
// corr2

int cmd_corr2(json config, const std::optional<std::string>& out_path) {
  PotentialSpec pot = potential_from_config(config);
  const int n = require_count(config, "n");
  const int lambda = require_count(config, "lambda");
  auto xs = linear_grid(get_double(config, "x_min", 0.0),
                        get_double(config, "x_max", 4.0),
                        get_int(config, "x_points", 161));
  config["x_min"] = xs.front();
  config["x_max"] = xs.back();
  config["x_points"] = static_cast<int>(xs.size());

  // Limiting two-point function at xi_1 = 0, xi_2 = 2 pi x, plus the limiting
  // density, raw and height-adjusted (density 1 at x = 0, so the adjusted
  // R2 of the flat ensemble is exactly 1 - sinc^2(pi x)).
  KernelContext ctx(Weight(pot, lambda), n, build_options(config));
  const double rho0 = ctx.kernel_diag(0.0);
  OutputTarget target(out_path);
  CsvWriter csv(target.out(), config,
                {"x", "R2_raw", "R2_adjusted", "rho_raw", "rho_adjusted"});
  for (double x : xs) {
    const double xi[2] = {0.0, two_pi * x};
    double r2 = corr_limit_general(ctx, xi);
    double kd = ctx.kernel_diag(xi[1]);
    csv.row({x, r2, r2 / (rho0 * rho0), kd, kd / rho0});
  }
  return 0;
}

// ---------------------------------------------------------------------------
// gap / count

int cmd_gap(json config, const std::optional<std::string>& out_path) {
  PotentialSpec pot = potential_from_config(config);
  RegionSetup region = region_from_config(config, "well_complement");
  KernelContext ctx(Weight(pot, region.lambda_cap), region.n_points,
                    build_options(config));
  NystromSystem sys(ctx, region.set);
  if (!sys.converged())
    throw InsufficientResolution("gap: quadrature did not stabilize within the node cap");
  double gap = fredholm_det(sys, cplx(-1.0, 0.0)).real();
  if (gap < -1e-6 || gap > 1.0 + 1e-6)
    throw CheckFailed("gap: determinant " + std::to_string(gap) + " outside [0, 1]");
  gap = std::min(1.0, std::max(0.0, gap));

  json out;
  out["config"] = config;
  out["gap_prob"] = gap;
  out["trace"] = sys.trace();
  out["nodes_used"] = static_cast<int>(sys.nodes().size());
  out["converged"] = sys.converged();
  write_json(out_path, out);
  return 0;
}

json count_report(const KernelContext& ctx, const ArcSet& set) {
  NystromSystem sys(ctx, set);
  if (!sys.converged())
    throw InsufficientResolution("count: quadrature did not stabilize within the node cap");
  std::vector<double> counts = count_distribution(sys, ctx.n_points());
  double mean = 0;
  for (std::size_t k = 0; k < counts.size(); ++k) mean += static_cast<double>(k) * counts[k];
  json out;
  out["counts"] = counts;
  out["mean"] = mean;
  out["trace"] = sys.trace();
  out["nodes_used"] = static_cast<int>(sys.nodes().size());
  out["converged"] = sys.converged();
  return out;
}

int cmd_count(json config, const std::optional<std::string>& out_path) {
  PotentialSpec pot = potential_from_config(config);
  RegionSetup region = region_from_config(config, "well_window");

  if (config.contains("t_sweep")) {
    // Depth sweep: rebuild the cosine weight per depth, same region.
    if (pot.kind() != PotentialKind::CosineScaled)
      throw ConfigError("t_sweep requires a cosine potential");
    if (!config.at("t_sweep").is_array() || config.at("t_sweep").empty())
      throw ConfigError("t_sweep must be a nonempty array of depths");
    json out;
    out["config"] = config;
    out["sweep"] = json::array();
    for (const auto& tv : config.at("t_sweep")) {
      double t = tv.get<double>();
      KernelContext ctx(Weight(PotentialSpec::cosine(t), region.lambda_cap),
                        region.n_points, build_options(config));
      json entry = count_report(ctx, region.set);
      entry["t"] = t;
      out["sweep"].push_back(std::move(entry));
    }
    write_json(out_path, out);
    return 0;
  }

  KernelContext ctx(Weight(pot, region.lambda_cap), region.n_points,
                    build_options(config));
  json out = count_report(ctx, region.set);
  out["config"] = config;
  if (config.contains("k")) {
    int k = require_int(config, "k");
    if (k < 0 || k > ctx.n_points()) throw ConfigError("k outside [0, N]");
    out["p_k"] = out["counts"].at(k);
  }
  write_json(out_path, out);
  return 0;
}

// ---------------------------------------------------------------------------
// sample

std::string histogram_path(const std::string& out_path) {
  const std::string suffix = ".csv";
  if (out_path.size() > suffix.size() &&
      out_path.compare(out_path.size() - suffix.size(), suffix.size(), suffix) == 0)
    return out_path.substr(0, out_path.size() - suffix.size()) + ".hist.csv";
  return out_path + ".hist.csv";
}

int cmd_sample(json config, const std::optional<std::string>& out_path,
               bool have_seed, std::uint64_t seed_flag) {
  if (!out_path)
    throw ConfigError("sample: --out is required (writes samples and histogram)");
  PotentialSpec pot = potential_from_config(config);
  const int n = require_count(config, "N");
  const int lambda_cap = require_count(config, "Lambda");
  const std::string method = get_string(config, "method", "dpp");
  const int n_samples = get_int(config, "n_samples", 200);
  const int bins = get_int(config, "bins", 64);
  if (n_samples < 100) throw ConfigError("sample: need n_samples >= 100");
  std::uint64_t seed = 12345;
  if (config.contains("seed")) seed = config.at("seed").get<std::uint64_t>();
  if (have_seed) seed = seed_flag;
  config["method"] = method;
  config["n_samples"] = n_samples;
  config["bins"] = bins;
  config["seed"] = seed;

  Weight w(pot, lambda_cap);
  std::vector<EigenSample> samples(static_cast<std::size_t>(n_samples));
  if (method == "dpp") {
    KernelContext ctx(w, n, build_options(config));
    DppSampler sampler(ctx);
    // Per-sample seed: child stream i of the root key.  Independent of the
    // worker count, so outputs are identical at any --threads value.
    CounterRng root(seed);
    parallel_for(samples.size(), [&](std::size_t i) {
      samples[i] = sampler.sample(root.split(i).key());
    });
  } else if (method == "mcmc") {
    McmcDiagnostics diag;
    McmcOptions mopts;
    mopts.burn_in_sweeps = get_int(config, "burn_in", mopts.burn_in_sweeps);
    samples = sample_mcmc_chain(w, n, n_samples, seed, mopts, &diag);
    config["acceptance_rate"] = diag.acceptance_rate;
  } else {
    throw ConfigError("sample: unknown method " + method + " (want dpp or mcmc)");
  }

  // One row per configuration, N angle columns.
  std::vector<std::string> cols(n);
  for (int j = 0; j < n; ++j) cols[j] = "theta_" + std::to_string(j);
  OutputTarget target(out_path);
  CsvWriter csv(target.out(), config, cols);
  for (const auto& s : samples) csv.row(s.angles);

  Histogram hist = empirical_density(samples, bins);
  std::ofstream hist_file(histogram_path(*out_path), std::ios::binary);
  if (!hist_file)
    throw ConfigError("cannot open histogram file: " + histogram_path(*out_path));
  CsvWriter hist_csv(hist_file, config, {"bin_lo", "bin_hi", "density", "se"});
  for (std::size_t b = 0; b + 1 < hist.edges.size(); ++b)
    hist_csv.row({hist.edges[b], hist.edges[b + 1], hist.density[b], hist.se[b]});
  return 0;
}

// ---------------------------------------------------------------------------
// verify

struct CheckRunner {
  json report = json::array();
  int failures = 0;

  void run(const std::string& name, const std::function<std::string()>& body) {
    std::string detail;
    bool ok = true;
    try {
      detail = body();
    } catch (const std::exception& e) {
      ok = false;
      detail = e.what();
    }
    std::printf("%s %s: %s\n", ok ? "ok  " : "FAIL", name.c_str(), detail.c_str());
    report.push_back({{"name", name}, {"ok", ok}, {"detail", detail}});
    if (!ok) ++failures;
  }
};

void require(bool cond, const std::string& msg) {
  if (!cond) throw CheckFailed(msg);
}

std::string fmt(const char* pattern, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), pattern, a, b);
  return buf;
}

void suite_trivial(CheckRunner& r) {
  r.run("flat-kernel-closed-form", [] {
    KernelContext cue(Weight(PotentialSpec::zero(), 1), 8);
    CounterRng rng(7);
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
      double a = rng.uniform(0, two_pi), b = rng.uniform(0, two_pi);
      double d = a - b;
      double exact = std::abs(std::sin(d / 2)) < 1e-9
                         ? 8.0 / two_pi
                         : std::sin(8 * d / 2) / (two_pi * std::sin(d / 2));
      worst = std::max(worst, std::abs(cue.kernel(a, b) - exact));
    }
    require(worst <= 1e-12, fmt("closed-form residual %.3g > 1e-12", worst));
    return fmt("max residual %.3g over 40 pairs", worst);
  });
  r.run("flat-density-constant", [] {
    KernelContext cue(Weight(PotentialSpec::zero(), 1), 6);
    DensityProfile prof = density_of_states(cue, 128);
    double worst = 0;
    for (double v : prof.rho) worst = std::max(worst, std::abs(v - 1.0 / two_pi));
    require(worst <= 1e-12, fmt("density deviates from 1/2pi by %.3g", worst));
    return fmt("sup |rho - 1/2pi| = %.3g", worst);
  });
  r.run("trace-equals-point-count", [] {
    KernelContext cue(Weight(PotentialSpec::zero(), 1), 5);
    KernelContext cos(Weight(PotentialSpec::cosine(2.0), 3), 5);
    double e1 = std::abs(kernel_trace(cue) - 5);
    double e2 = std::abs(kernel_trace(cos) - 5);
    require(e1 <= 1e-10 && e2 <= 1e-8, fmt("trace errors %.3g, %.3g", e1, e2));
    return fmt("trace errors %.3g (flat), %.3g (cosine)", e1, e2);
  });
  r.run("empty-set-gap-is-one", [] {
    KernelContext cue(Weight(PotentialSpec::zero(), 1), 4);
    double g = gap_probability(cue, ArcSet({}));
    require(std::abs(g - 1.0) <= 1e-15, fmt("gap %.17g != 1", g));
    return "gap = 1 exactly";
  });
  r.run("full-circle-spectrum", [] {
    KernelContext cue(Weight(PotentialSpec::zero(), 1), 8);
    KernelContext cos(Weight(PotentialSpec::cosine(1.5), 2), 6);
    for (const KernelContext* ctx : {&cue, &cos}) {
      NystromSystem sys(*ctx, ArcSet::full_circle());
      auto counts = count_distribution(sys, ctx->n_points());
      require(std::abs(sys.trace() - ctx->n_points()) <= 1e-7, "trace != N");
      require(gap_probability(*ctx, ArcSet::full_circle()) <= 1e-9, "gap != 0");
      require(std::abs(counts[ctx->n_points()] - 1.0) <= 1e-9, "P(N) != 1");
    }
    return "gap 0, P(N) = 1, trace = N on the full circle";
  });
  r.run("count-normalization", [] {
    KernelContext ctx(Weight(PotentialSpec::cosine(3.0), 4), 4);
    NystromSystem sys(ctx, ArcSet::well_window(1, 4, 0.4));
    auto counts = count_distribution(sys, 4);
    double total = 0, mean = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) {
      total += counts[k];
      mean += static_cast<double>(k) * counts[k];
    }
    require(std::abs(total - 1.0) <= 1e-12, fmt("sum P(k) off by %.3g", total - 1.0));
    require(std::abs(mean - sys.trace()) <= 1e-7,
            fmt("mean %.12g vs trace %.12g", mean, sys.trace()));
    return fmt("sum-to-one error %.3g, mean-trace error %.3g", std::abs(total - 1.0),
               std::abs(mean - sys.trace()));
  });
}

void suite_assembly(CheckRunner& r) {
  r.run("periodized-coefficients-match-direct", [] {
    Weight w(PotentialSpec::cosine(2.0), 3);
    OpucBasis direct = opuc_direct(compute_moments(w, 9), 9);
    OpucBasis base = opuc_direct(compute_moments(w.base(), 3), 3);
    OpucBasis assembled = opuc_assemble(base, 3, 9);
    double worst_c = 0, worst_k = 0;
    for (int l = 0; l <= 9; ++l) {
      auto cd = direct.coefficients(l);
      auto ca = assembled.coefficients(l);
      for (std::size_t j = 0; j < cd.size(); ++j)
        worst_c = std::max(worst_c, std::abs(cd[j] - ca[j]));
      worst_k = std::max(worst_k, std::abs(direct.kappa(l) / assembled.kappa(l) - 1));
    }
    require(worst_c <= 1e-9 && worst_k <= 1e-9,
            fmt("coeff diff %.3g, kappa rel diff %.3g", worst_c, worst_k));
    return fmt("coeff diff %.3g, kappa rel diff %.3g", worst_c, worst_k);
  });
  r.run("monomial-regime-structure", [] {
    // With more wells than degrees every polynomial is a pure monomial.
    Weight w(PotentialSpec::cosine(2.0), 8);
    OpucBasis basis = opuc_direct(compute_moments(w, 7), 7);
    double worst = 0;
    for (int l = 0; l <= 7; ++l) {
      auto c = basis.coefficients(l);
      for (int j = 0; j < l; ++j) worst = std::max(worst, std::abs(c[j]));
    }
    require(worst <= 1e-12, fmt("sub-leading coefficient %.3g", worst));
    return fmt("largest sub-leading coefficient %.3g", worst);
  });
  r.run("rotation-covariance", [] {
    Weight w(PotentialSpec::cosine(1.0), 3);
    OpucBasis base = opuc_direct(compute_moments(w.base(), 2), 2);
    OpucBasis basis = opuc_assemble(base, 3, 6);
    double worst = 0;
    for (int l = 0; l <= 6; ++l)
      for (int k = 1; k < 3; ++k)
        worst = std::max(worst, rotation_check(basis, k, l, 32));
    require(worst <= 1e-12, fmt("rotation residual %.3g", worst));
    return fmt("max rotation residual %.3g", worst);
  });
  r.run("quotient-vs-sum-kernel", [] {
    KernelContext ctx(Weight(PotentialSpec::cosine(1.5), 2), 6);
    CounterRng rng(11);
    double worst = 0, worst_imag = 0;
    for (int i = 0; i < 40; ++i) {
      double a = rng.uniform(0, two_pi), b = rng.uniform(0, two_pi);
      if (std::abs(std::sin((a - b) / 2)) < 1e-4) continue;
      worst = std::max(worst, std::abs(ctx.kernel(a, b) - ctx.kernel_sum_form(a, b)));
      worst_imag = std::max(worst_imag, std::abs(ctx.sum_form_imag_residue(a, b)));
    }
    require(worst <= 1e-9, fmt("form disagreement %.3g", worst));
    require(worst_imag <= 1e-10, fmt("imaginary residue %.3g", worst_imag));
    return fmt("form diff %.3g, imag residue %.3g", worst, worst_imag);
  });
  r.run("hermitian-symmetry", [] {
    KernelContext ctx(Weight(PotentialSpec::cosine(1.5), 2), 6);
    CounterRng rng(13);
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
      double a = rng.uniform(0, two_pi), b = rng.uniform(0, two_pi);
      worst = std::max(worst, std::abs(ctx.kernel(a, b) - ctx.kernel(b, a)));
    }
    require(worst <= 1e-12, fmt("asymmetry %.3g", worst));
    return fmt("max asymmetry %.3g", worst);
  });
}

void suite_scaling(CheckRunner& r) {
  r.run("finite-size-scale-identity", [] {
    const int triples[3][3] = {{1, 1, 4}, {2, 1, 3}, {1, 2, 2}};
    double worst = 0;
    for (auto [n, lambda, L] : triples) {
      for (double t : {0.1, 1.0}) {
        KernelContext small(Weight(PotentialSpec::cosine(t), lambda), n);
        KernelContext big(Weight(PotentialSpec::cosine(t), lambda * L), n * L);
        CounterRng rng(17);
        for (int i = 0; i < 50; ++i) {
          double xi = rng.uniform(0, two_pi), eta = rng.uniform(0, two_pi);
          worst = std::max(worst, scaling_identity_check(big, small, L, xi, eta));
        }
      }
    }
    require(worst <= 1e-9, fmt("identity residual %.3g", worst));
    return fmt("max residual %.3g over 300 pairs", worst);
  });
  r.run("macroscopic-density-limit", [] {
    SupErrorReport rep = small_lambda_limit_check(0.5, 8, 1, 128);
    require(rep.sup_error <= 0.02, fmt("sup error %.3g > 0.02", rep.sup_error));
    return fmt("sup error %.3g at scale 8", rep.sup_error);
  });
  r.run("limit-correlation-simple-form", [] {
    Weight base(PotentialSpec::cosine(1.0), 1);
    KernelContext ctx(Weight(PotentialSpec::cosine(1.0), 2), 1);
    double worst = 0;
    CounterRng rng(19);
    for (int m = 1; m <= 3; ++m) {
      for (int rep = 0; rep < 10; ++rep) {
        std::vector<double> xi(m);
        for (double& v : xi) v = rng.uniform(0, two_pi);
        worst = std::max(worst, std::abs(corr_limit_general(ctx, xi) -
                                         corr_limit_simple(base, 2, xi)));
      }
    }
    require(worst <= 1e-10, fmt("route disagreement %.3g", worst));
    return fmt("general vs simple route diff %.3g", worst);
  });
}

void suite_closedform(CheckRunner& r) {
  r.run("single-point-kernel-closed-form", [] {
    // n = 1: the kernel collapses to sqrt(w w)/mu_0 with mu_0 from the
    // Bessel oracle (independent of the quadrature moments).
    const double t = 1.0;
    const int lambda = 3;
    KernelContext ctx(Weight(PotentialSpec::cosine(t), lambda), 1);
    const double w0 = bessel_moment_oracle(t, 0);
    CounterRng rng(23);
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
      double a = rng.uniform(0, two_pi), b = rng.uniform(0, two_pi);
      double exact =
          std::exp(t * (std::cos(lambda * a) + std::cos(lambda * b)) / 2) / w0;
      worst = std::max(worst, std::abs(ctx.kernel(a, b) - exact));
    }
    require(worst <= 1e-9, fmt("closed-form residual %.3g", worst));
    return fmt("max residual %.3g", worst);
  });
  r.run("gaussian-well-localization", [] {
    const int ell[2] = {0, 1};
    const double u[2] = {0.3, -0.4};
    WellLocalizationResult res = gaussian_well_limit(2, ell, u, 4, 60.0);
    double rel = std::abs(res.finite / res.limit - 1.0);
    require(rel <= 0.1, fmt("relative gap %.3g at depth 60", rel));
    return fmt("finite/limit - 1 = %.3g at depth 60", rel);
  });
  r.run("occupancy-sine-determinant", [] {
    const double one[1] = {0.0};
    const double pair[2] = {0.0, 1.0};
    double d1 = sine_det_factor(2, one);
    double d2 = sine_det_factor(1, pair);
    double d3 = sine_det_factor(2, pair);
    double s = sinc(pi / 2);
    require(std::abs(d1 - 1.0) <= 1e-14, "singleton determinant != 1");
    require(std::abs(d2 - 1.0) <= 1e-14, "integer-separated pair != 1");
    require(std::abs(d3 - (1.0 - s * s)) <= 1e-14, "half-integer pair mismatch");
    return fmt("pair value %.12g matches 1 - sinc^2(pi/2)", d3);
  });
}

void suite_shift(CheckRunner& r) {
  r.run("kernel-shift-covariance", [] {
    KernelContext ctx(Weight(PotentialSpec::cosine(1.2), 3), 6);
    const double s = two_pi / 3;
    CounterRng rng(29);
    double worst = 0;
    for (int i = 0; i < 40; ++i) {
      double a = rng.uniform(0, two_pi), b = rng.uniform(0, two_pi);
      worst = std::max(worst, std::abs(ctx.kernel(a + s, b + s) - ctx.kernel(a, b)));
    }
    require(worst <= 1e-10, fmt("covariance residual %.3g", worst));
    return fmt("max residual %.3g", worst);
  });
  r.run("density-periodicity", [] {
    KernelContext ctx(Weight(PotentialSpec::cosine(1.2), 3), 6);
    const double s = two_pi / 3;
    double worst = 0;
    for (int i = 0; i < 64; ++i) {
      double th = two_pi * i / 64;
      worst = std::max(worst, std::abs(ctx.kernel_diag(th + s) - ctx.kernel_diag(th)));
    }
    require(worst <= 1e-10, fmt("periodicity residual %.3g", worst));
    return fmt("max residual %.3g", worst);
  });
  r.run("window-translation-invariance", [] {
    // Occupancy of the window at well 0 (wraps through zero) vs well 1
    // (interior): same distribution.
    const int lambda = 1, n = 4;
    const double t = 30.0;
    KernelContext ctx(Weight(PotentialSpec::cosine(t), lambda * n), n);
    const double h = two_pi * 0.3 / (lambda * n);
    const double c = two_pi / (lambda * n);
    NystromSystem wrap(ctx, ArcSet::well_window(lambda, n, 0.3));
    NystromSystem interior(ctx, ArcSet({Arc{c - h, c + h}}));
    auto pw = count_distribution(wrap, n);
    auto pi_ = count_distribution(interior, n);
    double worst = 0;
    for (int k = 0; k <= n; ++k) worst = std::max(worst, std::abs(pw[k] - pi_[k]));
    require(worst <= 1e-8, fmt("occupancy shift residual %.3g", worst));
    return fmt("max P(k) difference %.3g across wells", worst);
  });
}

void suite_trace(CheckRunner& r) {
  r.run("trace-bound-holds", [] {
    struct Case { int lambda, n; double t, eps; };
    const Case cases[] = {{1, 4, 50.0, 0.5}, {2, 4, 30.0, 0.3}, {1, 6, 80.0, 1.0}};
    std::string detail;
    for (const Case& c : cases) {
      KernelContext ctx(Weight(PotentialSpec::cosine(c.t), c.lambda * c.n), c.n);
      TraceBoundReport rep = trace_bound_check(ctx, ArcSet::well_complement(c.lambda, c.n, c.eps));
      detail += fmt("tau %.3g bound %.3g; ", rep.tau, rep.bound);
    }
    return detail;
  });
  r.run("moment-power-decay", [] {
    const double ts[] = {20.0, 40.0, 80.0};
    DecayFitReport rep = laplace_decay_check(2, 0.25, ts, 2);
    require(rep.slope <= -0.8 && rep.slope >= -1.5, fmt("slope %.3g", rep.slope));
    return fmt("log-log slope %.4g", rep.slope);
  });
  r.run("determinant-vs-moment-series", [] {
    KernelContext cue(Weight(PotentialSpec::zero(), 1), 8);
    ArcSet arc({Arc{1.0, 1.15}});
    NystromSystem sys(cue, arc);
    double det = fredholm_det(sys, cplx(-1.0, 0.0)).real();
    double m1 = series_moment(cue, arc, 1);
    double m2 = series_moment(cue, arc, 2);
    double m3 = series_moment(cue, arc, 3);
    double m4 = series_moment(cue, arc, 4);
    double series = 1 - m1 + m2 / 2 - m3 / 6 + m4 / 24;
    double tol = std::max(1e-6, std::pow(sys.trace(), 5) / 120.0);
    require(std::abs(det - series) <= tol,
            fmt("det %.12g vs series %.12g", det, series));
    return fmt("route difference %.3g within %.3g", std::abs(det - series), tol);
  });
  r.run("count-mean-equals-trace", [] {
    KernelContext ctx(Weight(PotentialSpec::cosine(30.0), 12), 6);
    NystromSystem sys(ctx, ArcSet::well_window(2, 6, 0.3));
    auto counts = count_distribution(sys, 6);
    double mean = 0;
    for (std::size_t k = 0; k < counts.size(); ++k) mean += static_cast<double>(k) * counts[k];
    require(std::abs(mean - sys.trace()) <= 1e-7,
            fmt("mean %.12g vs trace %.12g", mean, sys.trace()));
    return fmt("|mean - trace| = %.3g", std::abs(mean - sys.trace()));
  });
  r.run("limit-moment-bound", [] {
    // M_m <= lambda^{-m}: sine determinant <= 1 and the window mass is at
    // most one well's share.
    double worst = 0;
    for (int lambda : {1, 2})
      for (int m = 1; m <= 3; ++m) {
        double v = series_moment_limit(lambda, 0.25, 40.0, m);
        worst = std::max(worst, v * std::pow(lambda, m) - 1.0);
      }
    require(worst <= 1e-9, fmt("bound excess %.3g", worst));
    return fmt("max lambda^m M_m - 1 = %.3g (all <= 0 required)", worst);
  });
}

int cmd_verify(const std::string& suite, const std::optional<std::string>& out_path) {
  CheckRunner r;
  bool known = false;
  auto want = [&](const char* name) {
    bool match = suite == "all" || suite == name;
    known = known || suite == name;
    return match;
  };
  if (want("trivial")) suite_trivial(r);
  if (want("assembly")) suite_assembly(r);
  if (want("scaling")) suite_scaling(r);
  if (want("closedform")) suite_closedform(r);
  if (want("shift")) suite_shift(r);
  if (want("trace")) suite_trace(r);
  if (!known && suite != "all")
    throw ConfigError("unknown suite: " + suite +
                      " (want trivial, assembly, scaling, closedform, shift, trace, all)");
  std::printf("%d check(s), %d failure(s)\n", static_cast<int>(r.report.size()),
              r.failures);
  if (out_path) {
    json out;
    out["suite"] = suite;
    out["checks"] = r.report;
    out["failures"] = r.failures;
    write_json(out_path, out);
  }
  return r.failures == 0 ? 0 : 4;
}

// ---------------------------------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{"oscillatory circular unitary ensembles"};
  app.require_subcommand(1);

  std::string config_path, out_path, suite = "all";
  std::uint64_t seed_value = 0;
  bool have_out = false, have_seed = false;
  int threads = -1;

  auto add_common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("--config", config_path, "JSON config file");
    if (config_required) c->required();
    sub->add_option("--out", out_path, "output path (default stdout)")
        ->each([&](const std::string&) { have_out = true; });
    sub->add_option("--seed", seed_value, "override the config seed")
        ->each([&](const std::string&) { have_seed = true; });
    sub->add_option("--threads", threads, "worker cap (default OSCUE_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);
  };

  CLI::App* density = app.add_subcommand("density", "density of states CSV");
  CLI::App* corr2 = app.add_subcommand("corr2", "limiting two-point function CSV");
  CLI::App* gap = app.add_subcommand("gap", "gap probability JSON");
  CLI::App* count = app.add_subcommand("count", "occupancy distribution JSON");
  CLI::App* sample = app.add_subcommand("sample", "Monte Carlo samples CSV");
  CLI::App* verify = app.add_subcommand("verify", "run a verification suite");
  for (CLI::App* sub : {density, corr2, gap, count, sample}) add_common(sub, true);
  add_common(verify, false);
  verify->add_option("--suite", suite,
                     "trivial|assembly|scaling|closedform|shift|trace|all");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (threads >= 0) {
    set_max_workers(threads);
  } else if (const char* env = std::getenv("OSCUE_THREADS")) {
    set_max_workers(std::max(0, std::atoi(env)));
  } else {
    set_max_workers(0);
  }

  std::optional<std::string> out = have_out ? std::optional<std::string>(out_path)
                                            : std::nullopt;
  try {
    if (verify->parsed()) {
      if (!config_path.empty()) {
        json config = load_config(config_path);
        if (suite == "all") suite = get_string(config, "suite", "all");
      }
      return cmd_verify(suite, out);
    }
    json config = load_config(config_path);
    if (density->parsed()) return cmd_density(std::move(config), out);
    if (corr2->parsed()) return cmd_corr2(std::move(config), out);
    if (gap->parsed()) return cmd_gap(std::move(config), out);
    if (count->parsed()) return cmd_count(std::move(config), out);
    if (sample->parsed()) return cmd_sample(std::move(config), out, have_seed, seed_value);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric failure: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 2;
}

}  // namespace
}  // namespace oscue

int main(int argc, char** argv) { return oscue::run(argc, argv); }
