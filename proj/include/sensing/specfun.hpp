#pragma once

#include <span>

#include "sensing/errors.hpp"

namespace sensing {

// Convergence control for series and root finding.
struct Tolerance {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  long max_terms = 1000000;
};

// P(Poisson(u) < m) = e^{-u} sum_{n=0}^{m-1} u^n/n!, the regularized upper
// incomplete gamma Q(m, u) at integer order. Summed outward from the largest
// term; all terms positive, no cancellation.
double poisson_cdf_below(long m, double u);

// log P(Poisson(u) >= m), the complementary tail in log space. Stable for
// tails far below double underflow.
double log_poisson_tail_ge(long m, double u);

// Survival function of a chi-square with 2*dof_half degrees of freedom:
// P(X > t) = e^{-t/2} sum_{n<dof_half} (t/2)^n/n!.
double central_chi2_sf(int dof_half, double t);

// Generalized Marcum Q-function Q_N(a, b) = P(X > b^2) where X is noncentral
// chi-square with 2N degrees of freedom and noncentrality a^2.
//
// Evaluated as the Poisson mixture sum_j pois(j; a^2/2) S_{N+j}(b^2/2) with
// S_m(u) = e^{-u} sum_{n<m} u^n/n!. The summation starts at the Poisson mode
// and expands in both directions with term recurrences; the unaccounted
// Poisson mass bounds the truncation error (S <= 1). Stays stable for large
// noncentralities where the naive series underflows at j = 0.
//
// Throws NumericalError (with partial value and bound) if the mass criterion
// is not met within tol.max_terms.
double marcum_q(int order, double a, double b, const Tolerance& tol = {});

// Solves Q_N(sqrt(lambda), sqrt(t)) = delta for t, by geometric bracket
// growth followed by bisection on the strictly decreasing tail probability.
double inv_marcum_q_threshold(int order, double lambda, double delta,
                              const Tolerance& tol = {});

// log sum_i e^{v_i} via max shift. Throws std::invalid_argument on empty
// input.
double log_sum_exp(std::span<const double> values);

}  // namespace sensing
