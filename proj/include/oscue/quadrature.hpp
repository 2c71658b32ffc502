#pragma once

#include <vector>

#include "oscue/common.hpp"

namespace oscue {

struct GaussLegendreRule {
  std::vector<xreal> nodes;    // on (-1, 1)
  std::vector<xreal> weights;  // sum to 2
};

// n-point rule; Newton iteration on the Legendre recurrence, cached per n.
const GaussLegendreRule& gauss_legendre(int n);

// Nodes/weights of the n-point rule mapped to [a, b].
void gauss_legendre_on(int n, xreal a, xreal b,
                       std::vector<xreal>& nodes, std::vector<xreal>& weights);
void gauss_legendre_on(int n, double a, double b,
                       std::vector<double>& nodes, std::vector<double>& weights);

// Panels for integrating a function whose mass concentrates around `center`
// with scale `sigma`: dyadically graded from the center out to each end of
// [a, b].  Returns panel breakpoints (ascending, first = a, last = b).
std::vector<xreal> graded_breakpoints(xreal a, xreal b, xreal center, xreal sigma);

}  // namespace oscue
