#include "oscue/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

namespace oscue {

namespace {

GaussLegendreRule build_rule(int n) {
  // Newton on P_n with the three-term recurrence; roots seeded by the
  // Chebyshev-like estimate, symmetric pair filled together.
  GaussLegendreRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    xreal x = std::cos(pi_x * (i + 0.75L) / (n + 0.5L));
    xreal dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      xreal p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        xreal p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      xreal dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-19L) break;
    }
    xreal w = 2.0L / ((1 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0;
  return rule;
}

std::mutex g_rule_mutex;
std::map<int, GaussLegendreRule> g_rules;

}  // namespace

const GaussLegendreRule& gauss_legendre(int n) {
  if (n < 1) throw NumericError("gauss_legendre: need n >= 1");
  std::lock_guard<std::mutex> lock(g_rule_mutex);
  auto it = g_rules.find(n);
  if (it == g_rules.end()) it = g_rules.emplace(n, build_rule(n)).first;
  return it->second;
}

void gauss_legendre_on(int n, xreal a, xreal b,
                       std::vector<xreal>& nodes, std::vector<xreal>& weights) {
  const auto& rule = gauss_legendre(n);
  xreal mid = (a + b) / 2, rad = (b - a) / 2;
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = mid + rad * rule.nodes[i];
    weights[i] = rad * rule.weights[i];
  }
}

void gauss_legendre_on(int n, double a, double b,
                       std::vector<double>& nodes, std::vector<double>& weights) {
  const auto& rule = gauss_legendre(n);
  xreal mid = (static_cast<xreal>(a) + b) / 2, rad = (static_cast<xreal>(b) - a) / 2;
  nodes.resize(n);
  weights.resize(n);
  for (int i = 0; i < n; ++i) {
    nodes[i] = static_cast<double>(mid + rad * rule.nodes[i]);
    weights[i] = static_cast<double>(rad * rule.weights[i]);
  }
}

std::vector<xreal> graded_breakpoints(xreal a, xreal b, xreal center, xreal sigma) {
  if (!(a < b)) throw NumericError("graded_breakpoints: empty interval");
  if (sigma <= 0 || sigma >= (b - a)) return {a, b};
  // Dyadic shells 2*sigma, 4*sigma, ... outward from the center, clipped to
  // the interval.
  std::vector<xreal> pts;
  if (center > a && center < b) pts.push_back(center);
  for (xreal sign : {xreal(1), xreal(-1)}) {
    xreal r = 2 * sigma;
    for (int shell = 0; shell < 64; ++shell) {
      xreal p = center + sign * r;
      if (sign > 0 && p >= b) break;
      if (sign < 0 && p <= a) break;
      if (p > a && p < b) pts.push_back(p);
      r *= 2;
    }
  }
  pts.push_back(a);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

}  // namespace oscue
