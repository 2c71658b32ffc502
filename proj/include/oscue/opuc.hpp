#pragma once

#include <complex>
#include <span>
#include <vector>

#include "oscue/potential.hpp"

#include "json.hpp"

namespace oscue {

enum class OpucPath { Direct, Assembled };

struct OpucOptions {
  double cond_cap = 1e12;   // refuse Toeplitz solves beyond this condition estimate
};

// Monic orthogonal polynomials pi_0..pi_n on the unit circle for a stored
// weight, plus normalizers kappa_l = (int |pi_l|^2 w dtheta)^{-1/2}.
// Coefficients are ascending (c[0] + c[1] z + ... + z^l), leading term exactly 1.
class OpucBasis {
 public:
  OpucBasis(int period_multiplier, OpucPath path,
            std::vector<std::vector<xcplx>> coeffs, std::vector<xreal> kappa);

  int max_degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  int period_multiplier() const { return lambda_cap_; }
  OpucPath path() const { return path_; }

  double kappa(int l) const;
  xreal kappa_x(int l) const;
  // Coefficient view in double (serialization / inspection).
  std::vector<cplx> coefficients(int l) const;
  std::span<const xcplx> coefficients_x(int l) const;

  // Horner evaluation of pi_l at z (meant for |z| = 1).
  cplx eval(int l, cplx z) const;
  xcplx eval_x(int l, xcplx z) const;

  // {"V": <potential json>, "Lambda":…, "degrees":…, "coeffs":…, "kappa":…,
  //  "path":"direct"|"assembled"}; the potential is supplied by the caller
  // (the basis itself only knows the moments it was built from).
  nlohmann::json to_json(const nlohmann::json& potential = nlohmann::json()) const;

 private:
  void check_degree(int l) const;
  int lambda_cap_;
  OpucPath path_;
  std::vector<std::vector<xcplx>> coeffs_;
  std::vector<xreal> kappa_;
};

// Toeplitz route: for each l solve T y = e_l with T_{jk} = mu_{j-k}
// (Hermitian positive definite, Cholesky), monic coefficients y/y_l and
// kappa_l = sqrt(Re y_l).  Throws NotPositiveDefinite / IllConditioned
// (condition estimate vs opts.cond_cap) / DegreeOutOfRange when the moment
// table is too short (needs max_order >= n_max).
OpucBasis opuc_direct(const MomentTable& moments, int n_max, const OpucOptions& opts = {});

// Sparsity route for periodized weights: the degree-(n*L + k) polynomial for
// the L-fold periodization of the base weight is z^k * pi_n(z^L), with the
// same kappa_n.  Requires base.max_degree() >= n_max / L.
OpucBasis opuc_assemble(const OpucBasis& base, int L, int n_max);

// Max residual over sample points of the rotation covariance
// pi_l(z e^{2pi i k/Lambda}) = e^{2pi i l k/Lambda} pi_l(z), |z| = 1.
double rotation_check(const OpucBasis& basis, int k, int l, int n_samples);

}  // namespace oscue
