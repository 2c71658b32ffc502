#include "doctest.h"

#include <cmath>
#include <complex>

#include "oscue/opuc.hpp"
#include "oscue/rng.hpp"

using namespace oscue;

TEST_CASE("flat weight gives monomials") {
  Weight w(PotentialSpec::zero(), 1);
  OpucBasis basis = opuc_direct(compute_moments(w, 6), 6);
  for (int l = 0; l <= 6; ++l) {
    auto c = basis.coefficients(l);
    CHECK(c[l] == cplx(1.0, 0.0));
    for (int j = 0; j < l; ++j) CHECK(std::abs(c[j]) <= 1e-15);
    // kappa_l = (2 pi)^{-1/2} for every degree.
    CHECK(basis.kappa(l) == doctest::Approx(1.0 / std::sqrt(two_pi)).epsilon(1e-14));
  }
  CHECK(basis.path() == OpucPath::Direct);
}

TEST_CASE("monomial regime below the first harmonic") {
  // All moments mu_k with 0 < |k| < Lambda vanish, so degrees below Lambda
  // are monomials with kappa = mu_0^{-1/2}.
  Weight w(PotentialSpec::cosine(2.0), 7);
  MomentTable mom = compute_moments(w, 6);
  OpucBasis basis = opuc_direct(mom, 6);
  for (int l = 0; l <= 6; ++l) {
    auto c = basis.coefficients(l);
    for (int j = 0; j < l; ++j) CHECK(std::abs(c[j]) <= 1e-14);
    CHECK(basis.kappa(l) ==
          doctest::Approx(1.0 / std::sqrt(mom.mu0())).epsilon(1e-13));
  }
}

TEST_CASE("assembled basis equals direct basis") {
  for (double t : {0.5, 2.0}) {
    for (int L : {2, 3}) {
      const int n_max = 4 * L;
      Weight w(PotentialSpec::cosine(t), L);
      OpucBasis direct = opuc_direct(compute_moments(w, n_max), n_max);
      OpucBasis base = opuc_direct(compute_moments(w.base(), 4), 4);
      OpucBasis assembled = opuc_assemble(base, L, n_max);
      CHECK(assembled.path() == OpucPath::Assembled);
      for (int l = 0; l <= n_max; ++l) {
        auto cd = direct.coefficients(l);
        auto ca = assembled.coefficients(l);
        REQUIRE(cd.size() == ca.size());
        for (std::size_t j = 0; j < cd.size(); ++j)
          CHECK(std::abs(cd[j] - ca[j]) <= 1e-9);
        CHECK(direct.kappa(l) ==
              doctest::Approx(assembled.kappa(l)).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("assembled sparsity structure") {
  // Degree nL + k keeps only coefficients on the z^k (mod z^L) lattice.
  Weight base(PotentialSpec::cosine(1.0), 1);
  OpucBasis small = opuc_direct(compute_moments(base, 3), 3);
  OpucBasis assembled = opuc_assemble(small, 3, 9);
  for (int l = 0; l <= 9; ++l) {
    auto c = assembled.coefficients(l);
    for (int j = 0; j <= l; ++j)
      if (j % 3 != l % 3) CHECK(c[j] == cplx(0.0, 0.0));
  }
}

TEST_CASE("rotation covariance") {
  Weight w(PotentialSpec::cosine(1.5), 4);
  OpucBasis base = opuc_direct(compute_moments(w.base(), 2), 2);
  OpucBasis basis = opuc_assemble(base, 4, 8);
  for (int l : {0, 3, 5, 8})
    for (int k = 1; k < 4; ++k) CHECK(rotation_check(basis, k, l, 48) <= 1e-12);
}

TEST_CASE("evaluation matches explicit horner") {
  Weight w(PotentialSpec::cosine(1.0), 1);
  OpucBasis basis = opuc_direct(compute_moments(w, 4), 4);
  CounterRng rng(3);
  for (int rep = 0; rep < 10; ++rep) {
    double th = rng.uniform(0, two_pi);
    cplx z = std::polar(1.0, th);
    auto c = basis.coefficients(3);
    cplx direct = c[0] + z * (c[1] + z * (c[2] + z * c[3]));
    CHECK(std::abs(basis.eval(3, z) - direct) <= 1e-14);
  }
}

TEST_CASE("orthonormality from the moment table") {
  // <pi_j, pi_k>_w = sum_{a,b} conj(c_j[a]) c_k[b] mu_{a-b} should vanish for
  // j != k and equal kappa^{-2} on the diagonal.
  Weight w(PotentialSpec::cosine(2.0), 2);
  const int n = 6;
  MomentTable mom = compute_moments(w, n);
  OpucBasis basis = opuc_direct(mom, n);
  for (int j = 0; j <= n; ++j) {
    for (int k = 0; k <= j; ++k) {
      auto cj = basis.coefficients(j);
      auto ck = basis.coefficients(k);
      cplx acc(0, 0);
      for (int a = 0; a <= j; ++a)
        for (int b = 0; b <= k; ++b) acc += std::conj(cj[a]) * ck[b] * mom.mu(b - a);
      if (j == k) {
        double norm = 1.0 / (basis.kappa(j) * basis.kappa(j));
        CHECK(acc.real() == doctest::Approx(norm).epsilon(1e-11));
        CHECK(std::abs(acc.imag()) <= 1e-12 * norm);
      } else {
        CHECK(std::abs(acc) <= 1e-11 / (basis.kappa(j) * basis.kappa(k)));
      }
    }
  }
}

TEST_CASE("failure paths") {
  Weight sharp(PotentialSpec::cosine(8.0), 1);
  MomentTable mom = compute_moments(sharp, 14);
  OpucOptions tight;
  tight.cond_cap = 10.0;
  CHECK_THROWS_AS(opuc_direct(mom, 14, tight), IllConditioned);

  Weight w(PotentialSpec::zero(), 1);
  MomentTable short_mom = compute_moments(w, 2);
  CHECK_THROWS_AS(opuc_direct(short_mom, 5), DegreeOutOfRange);

  OpucBasis base = opuc_direct(short_mom, 2);
  CHECK_THROWS_AS(opuc_assemble(base, 3, 12), DegreeOutOfRange);
  CHECK_THROWS_AS(base.kappa(7), DegreeOutOfRange);
}

TEST_CASE("serialization shape") {
  Weight w(PotentialSpec::cosine(1.0), 2);
  OpucBasis base = opuc_direct(compute_moments(w.base(), 2), 2);
  OpucBasis basis = opuc_assemble(base, 2, 4);
  nlohmann::json j = basis.to_json(PotentialSpec::cosine(1.0).to_json());
  CHECK(j.at("Lambda") == 2);
  CHECK(j.at("path") == "assembled");
  CHECK(j.at("degrees") == 4);
  CHECK(j.at("coeffs").size() == 5);
  CHECK(j.at("kappa").size() == 5);
  CHECK(j.at("V").at("kind") == "cosine");
}
