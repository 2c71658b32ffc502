#include "doctest.h"

#include <cmath>
#include <complex>
#include <vector>

#include "oscue/kernel.hpp"
#include "oscue/quadrature.hpp"
#include "oscue/rng.hpp"

using namespace oscue;

namespace {

KernelContext cue(int n) { return KernelContext(Weight(PotentialSpec::zero(), 1), n); }

}  // namespace

TEST_CASE("flat weight closed form") {
  // K_N(theta, phi) = sin(N d/2) / (2 pi sin(d/2)), d = theta - phi.
  KernelContext ctx = cue(6);
  CounterRng rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    double th = rng.uniform(0, two_pi);
    double ph = rng.uniform(0, two_pi);
    double d = th - ph;
    double exact = std::sin(6 * d / 2) / (two_pi * std::sin(d / 2));
    CHECK(ctx.kernel(th, ph) == doctest::Approx(exact).epsilon(1e-12));
  }
  CHECK(ctx.kernel_diag(1.234) == doctest::Approx(6.0 / two_pi).epsilon(1e-13));
}

TEST_CASE("single point ensemble closed form") {
  // N = 1: K(theta, phi) = sqrt(w(theta) w(phi)) / mu_0 after the conjugating
  // phase, so the diagonal is w/mu_0 exactly.
  for (double t : {0.5, 2.0}) {
    Weight w(PotentialSpec::cosine(t), 1);
    KernelContext ctx(w, 1);
    double mu0 = bessel_moment_oracle(t, 0) * std::exp(-t);  // stored max-1 normalization
    CHECK(ctx.weight_mu0() == doctest::Approx(mu0).epsilon(1e-10));
    CounterRng rng(5);
    for (int rep = 0; rep < 20; ++rep) {
      double th = rng.uniform(0, two_pi);
      double ph = rng.uniform(0, two_pi);
      double exact = std::sqrt(w(th) * w(ph)) / mu0;
      CHECK(ctx.kernel(th, ph) == doctest::Approx(exact).epsilon(1e-9));
      CHECK(ctx.kernel_diag(th) == doctest::Approx(w(th) / mu0).epsilon(1e-9));
    }
  }
}

TEST_CASE("hermitian symmetry and realness") {
  Weight w(PotentialSpec::cosine(1.5), 2);
  KernelContext ctx(w, 5);
  CounterRng rng(7);
  for (int rep = 0; rep < 50; ++rep) {
    double th = rng.uniform(0, two_pi);
    double ph = rng.uniform(0, two_pi);
    CHECK(ctx.kernel(th, ph) == doctest::Approx(ctx.kernel(ph, th)).epsilon(1e-13));
    CHECK(std::abs(ctx.sum_form_imag_residue(th, ph)) <= 1e-12 * ctx.n_points());
  }
}

TEST_CASE("quotient and sum forms agree") {
  Weight w(PotentialSpec::cosine(2.0), 3);
  KernelContext ctx(w, 7);
  CounterRng rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    double th = rng.uniform(0, two_pi);
    double ph = rng.uniform(0, two_pi);
    if (std::abs(std::sin((th - ph) / 2)) < 1e-3) continue;
    CHECK(ctx.kernel(th, ph) ==
          doctest::Approx(ctx.kernel_sum_form(th, ph)).epsilon(1e-9));
  }
  // Diagonal continuity: quotient limit matches the sum form.
  for (double th : {0.0, 1.0, 4.5}) {
    CHECK(std::abs(ctx.kernel(th, th) - ctx.kernel(th, th + 1e-6)) <=
          1e-3 * ctx.n_points());
  }
}

TEST_CASE("reproducing property") {
  // int_0^{2pi} K(theta, s) K(s, phi) ds = K(theta, phi): the kernel is the
  // projector onto the degree-<N space.  Checked at both parities of N (the
  // conjugating phase is half-integer for even N).
  struct Case { PotentialSpec spec; int lambda; int n; };
  const Case cases[] = {
      {PotentialSpec::zero(), 1, 8},
      {PotentialSpec::zero(), 1, 7},
      {PotentialSpec::cosine(1.0), 2, 6},
  };
  for (const auto& c : cases) {
    KernelContext ctx(Weight(c.spec, c.lambda), c.n);
    std::vector<double> nodes, weights;
    gauss_legendre_on(256, 0.0, two_pi, nodes, weights);
    CounterRng rng(17);
    for (int rep = 0; rep < 6; ++rep) {
      double th = rng.uniform(0, two_pi);
      double ph = rng.uniform(0, two_pi);
      double acc = 0;
      for (std::size_t q = 0; q < nodes.size(); ++q)
        acc += weights[q] * ctx.kernel(th, nodes[q]) * ctx.kernel(nodes[q], ph);
      CHECK(acc == doctest::Approx(ctx.kernel(th, ph)).epsilon(1e-8).scale(1.0));
    }
  }
}

TEST_CASE("full turn parity") {
  // K(theta + 2pi, phi) = (-1)^N K(theta, phi) under the fixed-representative
  // convention; determinants and spectra are invariant because the sign flips
  // a whole row and column together.
  KernelContext even = cue(8);
  KernelContext odd = cue(7);
  CHECK(even.kernel(0.3 + two_pi, 1.1) ==
        doctest::Approx(-even.kernel(0.3, 1.1)).epsilon(1e-11));
  CHECK(odd.kernel(0.3 + two_pi, 1.1) ==
        doctest::Approx(odd.kernel(0.3, 1.1)).epsilon(1e-11));
}

TEST_CASE("kernel matrix matches pointwise evaluation") {
  Weight w(PotentialSpec::cosine(1.0), 2);
  KernelContext ctx(w, 6);
  std::vector<double> nodes = {0.1, 0.7, 2.0, 3.9, 5.5, 6.2};
  auto m = ctx.kernel_matrix(nodes);
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = 0; j < nodes.size(); ++j) {
      CHECK(m[i][j] == doctest::Approx(ctx.kernel(nodes[i], nodes[j])).epsilon(1e-11));
      CHECK(m[i][j] == doctest::Approx(m[j][i]).epsilon(1e-13));
    }
}

TEST_CASE("trace equals point count") {
  struct Case { PotentialSpec spec; int lambda; int n; };
  const Case cases[] = {
      {PotentialSpec::zero(), 1, 5},
      {PotentialSpec::cosine(0.5), 1, 4},
      {PotentialSpec::cosine(2.0), 3, 9},
      {PotentialSpec::fourier({{1, 0.4, 0.0}, {2, 0.0, 0.3}}), 2, 6},
  };
  for (const auto& c : cases) {
    KernelContext ctx(Weight(c.spec, c.lambda), c.n);
    CHECK(kernel_trace(ctx) == doctest::Approx(c.n).epsilon(1e-8));
  }
}

TEST_CASE("density periodicity and normalization") {
  Weight w(PotentialSpec::cosine(1.0), 3);
  KernelContext ctx(w, 6);
  DensityProfile prof = density_of_states(ctx, 128);
  CHECK(prof.period_multiplier == 3);
  // rho(theta + 2pi/Lambda) = rho(theta) exactly at matching sample points.
  const int per = 128;
  for (int i = 0; i < per; ++i)
    for (int s = 1; s < 3; ++s)
      CHECK(prof.rho[i] == doctest::Approx(prof.rho[i + s * per]).epsilon(1e-10));
  // One-period trapezoid of rho is 1/Lambda (total integral 1).
  double integral = 0;
  double h = prof.theta[1] - prof.theta[0];
  for (int i = 0; i < per; ++i) integral += prof.rho[i] * h;
  CHECK(integral * 3 == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("single point density is the normalized weight") {
  Weight w(PotentialSpec::cosine(2.0), 1);
  KernelContext ctx(w, 1);
  for (double th : {0.0, 0.5, 1.7, 3.14, 5.9})
    CHECK(ctx.kernel_diag(th) ==
          doctest::Approx(w(th) / ctx.weight_mu0()).epsilon(1e-9));
}

TEST_CASE("weight rescale invariance") {
  // K is invariant when w is multiplied by a constant (kappa absorbs it).
  Weight w(PotentialSpec::cosine(1.0), 2);
  KernelContext a(w, 5);
  KernelContext b(w.rescaled(0.7), 5);
  CounterRng rng(23);
  for (int rep = 0; rep < 25; ++rep) {
    double th = rng.uniform(0, two_pi);
    double ph = rng.uniform(0, two_pi);
    CHECK(a.kernel(th, ph) == doctest::Approx(b.kernel(th, ph)).epsilon(1e-10));
  }
}

TEST_CASE("finite size scale identity") {
  struct Triple { int n, lambda, L; };
  const Triple triples[] = {{1, 1, 4}, {2, 1, 3}, {1, 2, 2}};
  for (double t : {0.1, 1.0}) {
    for (const auto& tr : triples) {
      Weight small_w(PotentialSpec::cosine(t), tr.lambda);
      Weight big_w(PotentialSpec::cosine(t), tr.lambda * tr.L);
      KernelContext small(small_w, tr.n * tr.lambda);
      KernelContext big(big_w, tr.n * tr.lambda * tr.L);
      CounterRng rng(31);
      double worst = 0;
      for (int rep = 0; rep < 50; ++rep) {
        double xi = rng.uniform(0, two_pi);
        double eta = rng.uniform(0, two_pi);
        worst = std::max(worst, scaling_identity_check(big, small, tr.L, xi, eta));
      }
      CHECK(worst <= 1e-9);
    }
  }
}

TEST_CASE("assembled and direct routes give the same kernel") {
  Weight w(PotentialSpec::cosine(1.0), 3);
  KernelBuildOptions direct_only;
  direct_only.force_direct = true;
  KernelContext assembled(w, 6);
  KernelContext direct(w, 6, direct_only);
  CHECK(assembled.basis().path() == OpucPath::Assembled);
  CHECK(direct.basis().path() == OpucPath::Direct);
  CounterRng rng(41);
  for (int rep = 0; rep < 25; ++rep) {
    double th = rng.uniform(0, two_pi);
    double ph = rng.uniform(0, two_pi);
    CHECK(assembled.kernel(th, ph) ==
          doctest::Approx(direct.kernel(th, ph)).epsilon(1e-9).scale(1.0));
  }
}

TEST_CASE("equilibrium density validity window") {
  CHECK(equilibrium_density_cosine(0.5, 0.0) ==
        doctest::Approx(1.5 / two_pi).epsilon(1e-14));
  CHECK(equilibrium_density_cosine(0.0, 2.0) ==
        doctest::Approx(1.0 / two_pi).epsilon(1e-14));
  CHECK_THROWS_AS(equilibrium_density_cosine(1.2, 0.0), OutOfRegime);
  CHECK_THROWS_AS(equilibrium_density_cosine(-0.1, 0.0), OutOfRegime);
}

TEST_CASE("macroscopic density approaches the equilibrium profile") {
  // Fixed t, growing n: sup error over the rescaled period should fall well
  // below the n = 8 level by n = 32.
  SupErrorReport r8 = small_lambda_limit_check(0.5, 8, 1, 64);
  SupErrorReport r32 = small_lambda_limit_check(0.5, 32, 1, 64);
  CHECK(r32.sup_error < r8.sup_error);
  CHECK(r32.sup_error <= 0.02 / two_pi);
}
