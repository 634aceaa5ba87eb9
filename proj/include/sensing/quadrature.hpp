#pragma once

#include <functional>
#include <vector>

namespace sensing {

// Nodes and weights for integrals against the weight e^{-x} on [0, inf).
struct QuadratureRule {
  enum class Kind { GaussLaguerre, AdaptiveTruncated };

  std::vector<double> nodes;    // strictly increasing, > 0
  std::vector<double> weights;  // positive
  Kind kind = Kind::GaussLaguerre;

  std::size_t size() const { return nodes.size(); }
};

// Gauss-Laguerre rule (Golub-Welsch on the Jacobi matrix). Exact for
// polynomials up to degree 2n-1 against e^{-x}. Nodes whose weights
// underflow to zero are dropped.
QuadratureRule gauss_laguerre(int n);

// Composite Gauss-Legendre panels on [0, upper] with the e^{-x} weight
// folded into the weights. Resolves integrands with features much narrower
// than the exponential scale, where a practical-size Laguerre rule cannot;
// the truncation tail is bounded by e^{-upper} for |f| <= 1.
QuadratureRule truncated_exp_rule(double upper, int panels, int points_per_panel);

// E[f(gamma)] for gamma exponential with mean `scale`:
// integral of f(gamma) (1/scale) e^{-gamma/scale} dgamma, via substitution
// u = gamma/scale. Exact value lies in [inf f, sup f] for bounded f.
double rayleigh_expectation(const std::function<double(double)>& integrand,
                            double scale, const QuadratureRule& rule);

// Shared default rules, built once.
const QuadratureRule& default_laguerre_rule();   // 96 nodes
const QuadratureRule& default_truncated_rule();  // [0, 60], 240 x 12 points

}  // namespace sensing
