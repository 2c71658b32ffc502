#include "doctest.h"

#include <cmath>

#include "oscue/potential.hpp"

using namespace oscue;

TEST_CASE("potential evaluation") {
  PotentialSpec z = PotentialSpec::zero();
  CHECK(z(0.3) == 0.0);
  CHECK(z.min_value() == 0.0);
  CHECK(z.bandwidth() == 0);

  PotentialSpec c = PotentialSpec::cosine(2.0);
  CHECK(c(0.0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(c(pi) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(c.min_value() == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(c.bandwidth() == 1);
  CHECK_THROWS_AS(PotentialSpec::cosine(-1.0), OutOfRegime);
  CHECK_THROWS_AS(PotentialSpec::cosine(201.0), OutOfRegime);

  PotentialSpec f = PotentialSpec::fourier({{1, 0.5, 0.0}, {3, 0.0, -0.25}});
  CHECK(f(0.7) == doctest::Approx(0.5 * std::cos(0.7) - 0.25 * std::sin(3 * 0.7))
                      .epsilon(1e-15));
  CHECK(f.bandwidth() == 3);

  PotentialSpec p = PotentialSpec::piecewise({0.0, pi}, {1.0, -1.0});
  CHECK(p(0.5) == 1.0);
  CHECK(p(4.0) == -1.0);
  CHECK(p(0.5 + two_pi) == 1.0);
  CHECK(p.min_value() == -1.0);
  CHECK_FALSE(p.band_limited());
}

TEST_CASE("potential json round trip") {
  for (const PotentialSpec& spec :
       {PotentialSpec::zero(), PotentialSpec::cosine(1.5),
        PotentialSpec::fourier({{1, 0.5, 0.0}, {2, -0.3, 0.7}}),
        PotentialSpec::piecewise({0.0, 1.0, 4.0}, {0.5, -0.5, 0.0})}) {
    PotentialSpec back = PotentialSpec::from_json(spec.to_json());
    for (double th : {0.0, 0.9, 2.7, 5.5})
      CHECK(back(th) == doctest::Approx(spec(th)).epsilon(1e-15));
  }
}

TEST_CASE("weight normalization and periodization") {
  Weight w(PotentialSpec::cosine(3.0), 4);
  // Stored max is exactly 1, reached at the well centers 2 pi j / Lambda.
  CHECK(w(0.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w(two_pi / 4) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(w(pi / 4) == doctest::Approx(std::exp(-3.0 * (1 - std::cos(pi)))).epsilon(1e-13));
  CHECK(w.log_eval_x(0.0) == doctest::Approx(0.0));
  CHECK(w.period_multiplier() == 4);
  CHECK(w.base().period_multiplier() == 1);
  CHECK_THROWS_AS(Weight(PotentialSpec::zero(), 0), OutOfRegime);
  CHECK_THROWS_AS(Weight(PotentialSpec::zero(), 65), OutOfRegime);

  Weight r = w.rescaled(0.7);
  CHECK(r(1.3) == doctest::Approx(w(1.3) * std::exp(-0.7)).epsilon(1e-14));
}

TEST_CASE("moments match the bessel oracle") {
  // exp(t cos) moments are 2 pi I_k(t); the stored weight adds the
  // normalization factor e^{-t}.  Relative 1e-12 down to the arithmetic
  // floor: a tiny Fourier coefficient of an O(1) integrand cannot come out
  // of any fixed-precision quadrature below ~1 ulp of mu_0 absolute, so the
  // tolerance carries that floor (observed error stays within a few ulp).
  for (double t : {0.1, 1.0, 5.0, 20.0}) {
    Weight w(PotentialSpec::cosine(t), 1);
    MomentTable mom = compute_moments(w, 16);
    for (int k = 0; k <= 16; ++k) {
      double oracle = bessel_moment_oracle(t, k) * std::exp(-t);
      double tol = std::max(1e-12 * std::abs(oracle), 1e-16 * mom.mu0());
      CHECK(std::abs(mom.mu(k).real() - oracle) <= tol);
      CHECK(std::abs(mom.mu(k).imag()) <= 1e-13 * mom.mu0());
      // Hermitian symmetry of the table.
      CHECK(mom.mu(-k) == std::conj(mom.mu(k)));
    }
  }
}

TEST_CASE("periodized moments vanish off the lattice") {
  Weight w(PotentialSpec::cosine(2.0), 5);
  MomentTable mom = compute_moments(w, 12);
  MomentTable fast = compute_moments_periodized(w, 12);
  Weight base(PotentialSpec::cosine(2.0), 1);
  MomentTable bm = compute_moments(base, 2);
  for (int k = 0; k <= 12; ++k) {
    if (k % 5 == 0) {
      double oracle = static_cast<double>(bm.mu(k / 5).real());
      CHECK(mom.mu(k).real() == doctest::Approx(oracle).epsilon(1e-12));
      CHECK(fast.mu(k).real() == doctest::Approx(oracle).epsilon(1e-12));
    } else {
      CHECK(std::abs(mom.mu(k)) <= 1e-13 * mom.mu0());
      CHECK(std::abs(fast.mu(k)) == 0.0);
    }
  }
}

TEST_CASE("piecewise weight moments") {
  // Indicator-style weight: moments integrate exactly arc by arc.
  Weight w(PotentialSpec::piecewise({0.0, pi}, {0.0, std::log(2.0)}), 1);
  MomentTable mom = compute_moments(w, 6);
  // w = 1 on [0, pi), 1/2 on [pi, 2 pi): mu_0 = 3 pi / 2.
  CHECK(mom.mu0() == doctest::Approx(1.5 * pi).epsilon(1e-12));
  // mu_1 = int e^{-i th} w dth = 1 * (-2i) + 0.5 * (2i) = -i.
  CHECK(std::abs(mom.mu(1).real()) <= 1e-13);
  CHECK(mom.mu(1).imag() == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("bessel oracle basics") {
  CHECK(bessel_moment_oracle(0.0, 0) == doctest::Approx(two_pi).epsilon(1e-15));
  CHECK(bessel_moment_oracle(0.0, 3) == 0.0);
  CHECK(bessel_moment_oracle(1.0, 0) == doctest::Approx(7.954926521012844).epsilon(1e-14));
  CHECK(bessel_moment_oracle(1.0, 1) / two_pi ==
        doctest::Approx(0.5651591039924851).epsilon(1e-14));
  CHECK_THROWS_AS(bessel_moment_oracle(701.0, 0), OverflowRisk);
}
