#include "oscue/potential.hpp"

#include <algorithm>
#include <cmath>

#include "oscue/quadrature.hpp"

namespace oscue {

// ---------------------------------------------------------------------------
// PotentialSpec

PotentialSpec PotentialSpec::zero() { return PotentialSpec(); }

PotentialSpec PotentialSpec::cosine(double t) {
  if (!(t >= 0.0) || t > 200.0)
    throw OutOfRegime("cosine potential: depth t must lie in [0, 200]");
  PotentialSpec p;
  p.kind_ = PotentialKind::CosineScaled;
  p.t_ = t;
  return p;
}

PotentialSpec PotentialSpec::fourier(std::vector<FourierTerm> terms) {
  for (const auto& term : terms) {
    if (term.k < 1) throw OutOfRegime("fourier potential: harmonic index k must be >= 1");
    if (!std::isfinite(term.a) || !std::isfinite(term.b))
      throw OutOfRegime("fourier potential: non-finite coefficient");
  }
  PotentialSpec p;
  p.kind_ = PotentialKind::FourierSeries;
  p.terms_ = std::move(terms);
  return p;
}

PotentialSpec PotentialSpec::piecewise(std::vector<double> breaks,
                                       std::vector<double> values) {
  if (breaks.empty() || breaks.size() != values.size())
    throw OutOfRegime("piecewise potential: breaks/values size mismatch");
  if (breaks.front() != 0.0)
    throw OutOfRegime("piecewise potential: first break must be 0");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (breaks[i] < 0.0 || breaks[i] >= two_pi)
      throw OutOfRegime("piecewise potential: breaks must lie in [0, 2pi)");
    if (i > 0 && breaks[i] <= breaks[i - 1])
      throw OutOfRegime("piecewise potential: breaks must be strictly ascending");
    if (!std::isfinite(values[i]))
      throw OutOfRegime("piecewise potential: non-finite value");
  }
  PotentialSpec p;
  p.kind_ = PotentialKind::PiecewiseConstant;
  p.breaks_ = std::move(breaks);
  p.values_ = std::move(values);
  return p;
}

double PotentialSpec::cosine_t() const {
  if (kind_ != PotentialKind::CosineScaled)
    throw NumericError("cosine_t on a non-cosine potential");
  return t_;
}

xreal PotentialSpec::eval_x(xreal theta) const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0;
    case PotentialKind::CosineScaled:
      return -static_cast<xreal>(t_) * std::cos(theta);
    case PotentialKind::FourierSeries: {
      xreal v = 0;
      for (const auto& term : terms_)
        v += static_cast<xreal>(term.a) * std::cos(term.k * theta) +
             static_cast<xreal>(term.b) * std::sin(term.k * theta);
      return v;
    }
    case PotentialKind::PiecewiseConstant: {
      double th = wrap_angle(static_cast<double>(theta));
      auto it = std::upper_bound(breaks_.begin(), breaks_.end(), th);
      std::size_t idx = static_cast<std::size_t>(it - breaks_.begin()) - 1;
      return static_cast<xreal>(values_[idx]);
    }
  }
  return 0;
}

double PotentialSpec::operator()(double theta) const {
  return static_cast<double>(eval_x(static_cast<xreal>(theta)));
}

double PotentialSpec::min_value() const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0.0;
    case PotentialKind::CosineScaled:
      return -t_;
    case PotentialKind::PiecewiseConstant:
      return *std::min_element(values_.begin(), values_.end());
    case PotentialKind::FourierSeries: {
      // Dense scan then local golden-section polish; deterministic.
      int bw = bandwidth();
      int n = std::max(4096, 512 * std::max(1, bw));
      double best = eval_x(0), best_th = 0.0;
      for (int i = 1; i < n; ++i) {
        double th = two_pi * i / n;
        double v = operator()(th);
        if (v < best) { best = v; best_th = th; }
      }
      double a = best_th - two_pi / n, b = best_th + two_pi / n;
      const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
      double c = b - gr * (b - a), d = a + gr * (b - a);
      for (int iter = 0; iter < 200 && (b - a) > 1e-14; ++iter) {
        if (operator()(c) < operator()(d)) { b = d; d = c; c = b - gr * (b - a); }
        else { a = c; c = d; d = a + gr * (b - a); }
      }
      return std::min(best, operator()((a + b) / 2));
    }
  }
  return 0.0;
}

int PotentialSpec::bandwidth() const {
  switch (kind_) {
    case PotentialKind::Zero:
      return 0;
    case PotentialKind::CosineScaled:
      return 1;
    case PotentialKind::FourierSeries: {
      int bw = 0;
      for (const auto& term : terms_) bw = std::max(bw, term.k);
      return bw;
    }
    case PotentialKind::PiecewiseConstant:
      return -1;
  }
  return 0;
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json j;
  switch (kind_) {
    case PotentialKind::Zero:
      j["kind"] = "zero";
      break;
    case PotentialKind::CosineScaled:
      j["kind"] = "cosine";
      j["t"] = t_;
      break;
    case PotentialKind::FourierSeries: {
      j["kind"] = "fourier";
      nlohmann::json terms = nlohmann::json::array();
      for (const auto& term : terms_)
        terms.push_back({term.k, term.a, term.b});
      j["terms"] = terms;
      break;
    }
    case PotentialKind::PiecewiseConstant:
      j["kind"] = "piecewise";
      j["breaks"] = breaks_;
      j["values"] = values_;
      break;
  }
  return j;
}

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "zero") return zero();
  if (kind == "cosine") return cosine(j.at("t").get<double>());
  if (kind == "fourier") {
    std::vector<FourierTerm> terms;
    for (const auto& tj : j.at("terms")) {
      if (!tj.is_array() || tj.size() < 2 || tj.size() > 3)
        throw NumericError("fourier potential: each term must be [k, a] or [k, a, b]");
      FourierTerm term;
      term.k = tj.at(0).get<int>();
      term.a = tj.at(1).get<double>();
      term.b = tj.size() > 2 ? tj.at(2).get<double>() : 0.0;
      terms.push_back(term);
    }
    return fourier(std::move(terms));
  }
  if (kind == "piecewise")
    return piecewise(j.at("breaks").get<std::vector<double>>(),
                     j.at("values").get<std::vector<double>>());
  throw NumericError("unknown potential kind: " + kind);
}

// ---------------------------------------------------------------------------
// Weight

Weight::Weight(PotentialSpec spec, int period_multiplier)
    : spec_(std::move(spec)), lambda_cap_(period_multiplier) {
  if (lambda_cap_ < 1 || lambda_cap_ > 64)
    throw OutOfRegime("weight: period multiplier must lie in [1, 64]");
  offset_ = static_cast<xreal>(spec_.min_value());
}

xreal Weight::log_eval_x(xreal theta) const {
  return -(spec_.eval_x(lambda_cap_ * theta) - offset_);
}

xreal Weight::eval_x(xreal theta) const { return std::exp(log_eval_x(theta)); }

double Weight::operator()(double theta) const {
  return static_cast<double>(eval_x(static_cast<xreal>(theta)));
}

Weight Weight::rescaled(double delta) const {
  Weight w = *this;
  w.offset_ -= static_cast<xreal>(delta);
  return w;
}

// ---------------------------------------------------------------------------
// MomentTable

MomentTable::MomentTable(int period_multiplier, std::vector<xcplx> mu_nonneg,
                         double claimed_error)
    : lambda_cap_(period_multiplier),
      mu_(std::move(mu_nonneg)),
      claimed_error_(claimed_error) {
  if (mu_.empty()) throw NumericError("moment table: empty");
  if (!(mu_[0].real() > 0))
    throw NotPositiveDefinite("moment table: mu_0 must be positive");
  mu_[0] = xcplx(mu_[0].real(), 0);  // Hermitian symmetry pins mu_0 real
}

xcplx MomentTable::mu_x(int k) const {
  int a = std::abs(k);
  if (a > max_order()) throw DegreeOutOfRange("moment index beyond table");
  return k >= 0 ? mu_[a] : std::conj(mu_[a]);
}

cplx MomentTable::mu(int k) const {
  xcplx v = mu_x(k);
  return cplx(static_cast<double>(v.real()), static_cast<double>(v.imag()));
}

// ---------------------------------------------------------------------------
// Moments by quadrature

namespace {

// Trapezoid moments with n equispaced nodes; exact up to aliasing for smooth
// periodic integrands.
std::vector<xcplx> trapezoid_moments(const Weight& w, int max_order, int n) {
  std::vector<xreal> wv(n);
  for (int i = 0; i < n; ++i) wv[i] = w.eval_x(two_pi_x * i / n);
  std::vector<xcplx> mu(max_order + 1);
  xreal h = two_pi_x / n;
  for (int k = 0; k <= max_order; ++k) {
    // One phase recurrence per k keeps trig error at the e^{-ik h} level.
    xcplx rot = std::polar<xreal>(1, -k * static_cast<xreal>(h));
    xcplx phase(1, 0);
    xcplx acc(0, 0), comp(0, 0);  // Kahan
    for (int i = 0; i < n; ++i) {
      xcplx term = wv[i] * phase;
      xcplx y = term - comp;
      xcplx s = acc + y;
      comp = (s - acc) - y;
      acc = s;
      phase *= rot;
    }
    mu[k] = acc * h;
  }
  return mu;
}

std::vector<xcplx> piecewise_moments(const Weight& w, int max_order, int pts_per_panel) {
  // Constant potential on each arc: the weight restricted to a panel is a
  // constant, so per-panel Gauss-Legendre is exact for each e^{-ik theta}
  // once the panel count resolves the oscillation; panels are split to keep
  // k*length below ~pts_per_panel.
  const auto& breaks = w.spec().breaks();
  int lam = w.period_multiplier();
  std::vector<xreal> edges;
  for (int p = 0; p < lam; ++p)
    for (double b : breaks)
      edges.push_back((two_pi_x * p + static_cast<xreal>(b)) / lam);
  edges.push_back(two_pi_x);
  std::sort(edges.begin(), edges.end());
  std::vector<xcplx> mu(max_order + 1, xcplx(0, 0));
  std::vector<xreal> nodes, weights;
  for (std::size_t e = 0; e + 1 < edges.size(); ++e) {
    xreal a = edges[e], b = edges[e + 1];
    if (b - a < 1e-18L) continue;
    int split = std::max(1, static_cast<int>(std::ceil(
        static_cast<double>(max_order * (b - a)) / pts_per_panel)));
    for (int s = 0; s < split; ++s) {
      xreal pa = a + (b - a) * s / split, pb = a + (b - a) * (s + 1) / split;
      gauss_legendre_on(pts_per_panel, pa, pb, nodes, weights);
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        xreal wv = w.eval_x(nodes[i]) * weights[i];
        for (int k = 0; k <= max_order; ++k)
          mu[k] += wv * std::polar<xreal>(1, -k * nodes[i]);
      }
    }
  }
  return mu;
}

double table_diff(const std::vector<xcplx>& a, const std::vector<xcplx>& b) {
  xreal d = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    d = std::max(d, std::abs(a[i] - b[i]));
  return static_cast<double>(d);
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

}  // namespace

MomentTable compute_moments(const Weight& w, int max_order, int n_nodes_hint) {
  if (max_order < 0) throw DegreeOutOfRange("compute_moments: max_order < 0");
  const double rel_tol = 1e-13;

  if (w.spec().kind() == PotentialKind::PiecewiseConstant) {
    auto coarse = piecewise_moments(w, max_order, 64);
    auto fine = piecewise_moments(w, max_order, 96);
    double err = table_diff(coarse, fine);
    double mu0 = static_cast<double>(fine[0].real());
    if (err > rel_tol * mu0)
      throw InsufficientResolution("piecewise moments did not stabilize");
    return MomentTable(w.period_multiplier(), std::move(fine), err);
  }

  int bw = w.spec().bandwidth();
  int floor_nodes = 4 * (max_order + w.period_multiplier() * bw) + 32;
  if (n_nodes_hint > 0 && n_nodes_hint < floor_nodes)
    throw InsufficientResolution("compute_moments: node hint below sampling floor");
  int n = next_pow2(std::max(floor_nodes, std::max(n_nodes_hint, 64)));
  const int cap = 1 << 20;

  auto cur = trapezoid_moments(w, max_order, n);
  while (true) {
    if (2 * n > cap)
      throw InsufficientResolution("compute_moments: node cap reached before convergence");
    auto fine = trapezoid_moments(w, max_order, 2 * n);
    double err = table_diff(cur, fine);
    double mu0 = static_cast<double>(fine[0].real());
    cur = std::move(fine);
    n *= 2;
    if (err <= rel_tol * mu0)
      return MomentTable(w.period_multiplier(), std::move(cur), err);
  }
}

MomentTable compute_moments_periodized(const Weight& w, int max_order) {
  int lam = w.period_multiplier();
  if (lam == 1) return compute_moments(w, max_order);
  // mu_k of w(theta) = w_base(Lambda theta) vanishes off the Lambda lattice
  // and equals the base moment at k/Lambda on it (the substitution
  // phi = Lambda theta traverses the base circle Lambda times).
  MomentTable base = compute_moments(w.base(), max_order / lam);
  std::vector<xcplx> mu(max_order + 1, xcplx(0, 0));
  for (int k = 0; k <= max_order; ++k)
    if (k % lam == 0) mu[k] = base.mu_x(k / lam);
  return MomentTable(lam, std::move(mu), base.claimed_error());
}

// ---------------------------------------------------------------------------
// Bessel oracle

xreal bessel_moment_oracle_x(xreal t, int k) {
  if (t < 0) throw OutOfRegime("bessel oracle: t >= 0 required");
  if (t > 700) throw OverflowRisk("bessel oracle: e^t overflows for t > 700");
  k = std::abs(k);
  // I_k(t) = sum_j (t/2)^{k+2j} / (j! (k+j)!), compensated accumulation.
  xreal half = t / 2;
  xreal term = 1;
  for (int j = 1; j <= k; ++j) term *= half / j;  // (t/2)^k / k!
  xreal sum = term, comp = 0;
  for (int j = 1; j < 4000; ++j) {
    term *= half * half / (static_cast<xreal>(j) * (j + k));
    xreal y = term - comp;
    xreal s = sum + y;
    comp = (s - sum) - y;
    sum = s;
    if (term < 1e-25L * sum) break;
  }
  return two_pi_x * sum;
}

double bessel_moment_oracle(double t, int k) {
  return static_cast<double>(bessel_moment_oracle_x(static_cast<xreal>(t), k));
}

}  // namespace oscue
