#include "oscue/opuc.hpp"

#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <Eigen/Eigenvalues>

namespace oscue {

using MatX = Eigen::Matrix<xcplx, Eigen::Dynamic, Eigen::Dynamic>;
using VecX = Eigen::Matrix<xcplx, Eigen::Dynamic, 1>;

OpucBasis::OpucBasis(int period_multiplier, OpucPath path,
                     std::vector<std::vector<xcplx>> coeffs, std::vector<xreal> kappa)
    : lambda_cap_(period_multiplier), path_(path),
      coeffs_(std::move(coeffs)), kappa_(std::move(kappa)) {
  if (coeffs_.empty() || coeffs_.size() != kappa_.size())
    throw NumericError("opuc basis: inconsistent construction");
  for (std::size_t l = 0; l < coeffs_.size(); ++l) {
    if (coeffs_[l].size() != l + 1 || coeffs_[l].back() != xcplx(1, 0))
      throw NumericError("opuc basis: coefficient vector not monic");
    if (!(kappa_[l] > 0)) throw NotPositiveDefinite("opuc basis: kappa must be positive");
  }
}

void OpucBasis::check_degree(int l) const {
  if (l < 0 || l > max_degree())
    throw DegreeOutOfRange("opuc degree " + std::to_string(l) + " beyond basis");
}

double OpucBasis::kappa(int l) const { return static_cast<double>(kappa_x(l)); }

xreal OpucBasis::kappa_x(int l) const {
  check_degree(l);
  return kappa_[l];
}

std::span<const xcplx> OpucBasis::coefficients_x(int l) const {
  check_degree(l);
  return coeffs_[l];
}

std::vector<cplx> OpucBasis::coefficients(int l) const {
  check_degree(l);
  std::vector<cplx> out(coeffs_[l].size());
  for (std::size_t j = 0; j < out.size(); ++j)
    out[j] = cplx(static_cast<double>(coeffs_[l][j].real()),
                  static_cast<double>(coeffs_[l][j].imag()));
  return out;
}

xcplx OpucBasis::eval_x(int l, xcplx z) const {
  check_degree(l);
  const auto& c = coeffs_[l];
  xcplx acc = c.back();
  for (int j = l - 1; j >= 0; --j) acc = acc * z + c[j];
  return acc;
}

cplx OpucBasis::eval(int l, cplx z) const {
  xcplx v = eval_x(l, xcplx(z.real(), z.imag()));
  return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

nlohmann::json OpucBasis::to_json(const nlohmann::json& potential) const {
  nlohmann::json j;
  if (!potential.is_null()) j["V"] = potential;
  j["Lambda"] = lambda_cap_;
  j["degrees"] = max_degree();
  j["path"] = path_ == OpucPath::Direct ? "direct" : "assembled";
  nlohmann::json coeffs = nlohmann::json::array();
  for (int l = 0; l <= max_degree(); ++l) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& c : coeffs_[l])
      row.push_back({static_cast<double>(c.real()), static_cast<double>(c.imag())});
    coeffs.push_back(row);
  }
  j["coeffs"] = coeffs;
  std::vector<double> kap(kappa_.size());
  for (std::size_t l = 0; l < kappa_.size(); ++l) kap[l] = static_cast<double>(kappa_[l]);
  j["kappa"] = kap;
  return j;
}

OpucBasis opuc_direct(const MomentTable& moments, int n_max, const OpucOptions& opts) {
  if (n_max < 0) throw DegreeOutOfRange("opuc_direct: negative degree");
  if (moments.max_order() < n_max)
    throw DegreeOutOfRange("opuc_direct: moment table shorter than requested degree");

  std::vector<std::vector<xcplx>> coeffs(n_max + 1);
  std::vector<xreal> kappa(n_max + 1);

  for (int l = 0; l <= n_max; ++l) {
    MatX T(l + 1, l + 1);
    for (int j = 0; j <= l; ++j)
      for (int k = 0; k <= l; ++k) T(j, k) = moments.mu_x(j - k);

    // Condition estimate before committing to this degree; the moment matrix
    // nests, so the estimate is monotone in l and the first failure is the
    // honest cutoff.
    Eigen::SelfAdjointEigenSolver<MatX> es(T, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
      throw NumericError("opuc_direct: eigenvalue estimate failed");
    xreal emin = es.eigenvalues()(0);
    xreal emax = es.eigenvalues()(l);
    if (!(emin > 0))
      throw NotPositiveDefinite("opuc_direct: moment matrix not positive definite at degree " +
                                std::to_string(l));
    if (static_cast<double>(emax / emin) > opts.cond_cap)
      throw IllConditioned("opuc_direct: moment matrix condition " +
                           std::to_string(static_cast<double>(emax / emin)) +
                           " exceeds cap at degree " + std::to_string(l));

    Eigen::LLT<MatX> llt(T);
    if (llt.info() != Eigen::Success)
      throw NotPositiveDefinite("opuc_direct: Cholesky failed at degree " + std::to_string(l));
    VecX e = VecX::Zero(l + 1);
    e(l) = xcplx(1, 0);
    VecX y = llt.solve(e);
    // T c = ||pi_l||^2 e_l for the monic coefficients c, so c = y / y_l and
    // ||pi_l||^{-2} = Re y_l.
    xreal yl = y(l).real();
    if (!(yl > 0))
      throw NotPositiveDefinite("opuc_direct: nonpositive norm at degree " + std::to_string(l));
    kappa[l] = std::sqrt(yl);
    std::vector<xcplx> c(l + 1);
    for (int j = 0; j < l; ++j) c[j] = y(j) / y(l);
    c[l] = xcplx(1, 0);
    coeffs[l] = std::move(c);
  }
  return OpucBasis(moments.period_multiplier(), OpucPath::Direct,
                   std::move(coeffs), std::move(kappa));
}

OpucBasis opuc_assemble(const OpucBasis& base, int L, int n_max) {
  if (L < 1) throw DegreeOutOfRange("opuc_assemble: L must be >= 1");
  if (n_max < 0) throw DegreeOutOfRange("opuc_assemble: negative degree");
  if (base.max_degree() < n_max / L)
    throw DegreeOutOfRange("opuc_assemble: base basis shorter than n_max/L");

  std::vector<std::vector<xcplx>> coeffs(n_max + 1);
  std::vector<xreal> kappa(n_max + 1);
  for (int l = 0; l <= n_max; ++l) {
    int n = l / L, k = l % L;
    // Degree nL+k polynomial for the L-fold periodization: z^k pi_n(z^L).
    auto b = base.coefficients_x(n);
    std::vector<xcplx> c(l + 1, xcplx(0, 0));
    for (int j = 0; j <= n; ++j) c[j * L + k] = b[j];
    kappa[l] = base.kappa_x(n);
    coeffs[l] = std::move(c);
  }
  return OpucBasis(base.period_multiplier() * L, OpucPath::Assembled,
                   std::move(coeffs), std::move(kappa));
}

double rotation_check(const OpucBasis& basis, int k, int l, int n_samples) {
  basis.coefficients_x(l);  // degree check
  int lam = basis.period_multiplier();
  xreal step = two_pi_x * k / lam;
  xcplx rot = std::polar<xreal>(1, step);
  xcplx phase = std::polar<xreal>(1, -step * l);
  xreal worst = 0;
  for (int s = 0; s < n_samples; ++s) {
    // Irrational-offset samples avoid hitting only symmetry points.
    xreal theta = two_pi_x * (s + 0.381966011250105L) / n_samples;
    xcplx z = std::polar<xreal>(1, theta);
    xcplx lhs = phase * basis.eval_x(l, z * rot);
    xcplx rhs = basis.eval_x(l, z);
    worst = std::max(worst, std::abs(lhs - rhs));
  }
  return static_cast<double>(worst);
}

}  // namespace oscue
