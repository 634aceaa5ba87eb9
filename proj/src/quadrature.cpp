#include "sensing/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace sensing {

namespace {

struct LaguerreValues {
  double l_n;     // L_n(x)
  double l_prev;  // L_{n-1}(x)
  double l_next;  // L_{n+1}(x)
};

LaguerreValues laguerre_recurrence(int n, double x) {
  double prev = 0.0, cur = 1.0;  // L_{-1}, L_0
  for (int k = 1; k <= n; ++k) {
    const double next = ((2.0 * k - 1.0 - x) * cur - (k - 1.0) * prev) / k;
    prev = cur;
    cur = next;
  }
  LaguerreValues v;
  v.l_n = cur;
  v.l_prev = prev;
  v.l_next = ((2.0 * n + 1.0 - x) * cur - n * prev) / (n + 1.0);
  return v;
}

}  // namespace

QuadratureRule gauss_laguerre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_laguerre: need at least one node");

  // Node estimates from the Jacobi matrix of the Laguerre recurrence
  // (diag 2k+1, off-diag k+1), Newton-polished. Weights come from the
  // derivative formula x / ((n+1) L_{n+1}(x))^2, which keeps the tiny
  // high-node weights relatively accurate where eigenvector components
  // cannot.
  Eigen::VectorXd diag(n), subdiag(n - 1 > 0 ? n - 1 : 0);
  for (int k = 0; k < n; ++k) diag[k] = 2.0 * k + 1.0;
  for (int k = 0; k + 1 < n; ++k) subdiag[k] = static_cast<double>(k + 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("gauss_laguerre: eigensolver failed");
  }

  QuadratureRule rule;
  rule.kind = QuadratureRule::Kind::GaussLaguerre;
  rule.nodes.reserve(n);
  rule.weights.reserve(n);
  for (int i = 0; i < n; ++i) {
    double x = solver.eigenvalues()[i];
    for (int iter = 0; iter < 8; ++iter) {
      const LaguerreValues v = laguerre_recurrence(n, x);
      const double deriv = n * (v.l_n - v.l_prev) / x;  // L_n'(x)
      const double step = v.l_n / deriv;
      x -= step;
      if (std::abs(step) <= 1e-14 * x) break;
    }
    const LaguerreValues v = laguerre_recurrence(n, x);
    const double denom = (n + 1.0) * v.l_next;
    const double w = x / (denom * denom);
    if (std::isfinite(w) && w > 0.0) {
      rule.nodes.push_back(x);
      rule.weights.push_back(w);
    }
  }
  return rule;
}

QuadratureRule truncated_exp_rule(double upper, int panels, int points_per_panel) {
  if (!(upper > 0.0)) throw std::invalid_argument("truncated_exp_rule: upper must be > 0");
  if (panels < 1 || points_per_panel < 1) {
    throw std::invalid_argument("truncated_exp_rule: need at least one panel and point");
  }

  // Gauss-Legendre nodes/weights on [-1, 1] for the panel order, via the
  // Jacobi matrix of the Legendre recurrence.
  const int m = points_per_panel;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m);
  Eigen::VectorXd subdiag(m - 1 > 0 ? m - 1 : 0);
  for (int k = 1; k < m; ++k) {
    subdiag[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, subdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("truncated_exp_rule: eigensolver failed");
  }

  QuadratureRule rule;
  rule.kind = QuadratureRule::Kind::AdaptiveTruncated;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * m);
  rule.weights.reserve(static_cast<std::size_t>(panels) * m);
  // Quadratically graded panel boundaries: panel width grows like sqrt(x),
  // tracking how the width of a noncentral-tail transition scales with the
  // channel power it sits at.
  for (int p = 0; p < panels; ++p) {
    const double lo = upper * std::pow(static_cast<double>(p) / panels, 2.0);
    const double hi = upper * std::pow(static_cast<double>(p + 1) / panels, 2.0);
    const double mid = 0.5 * (lo + hi);
    const double h = hi - lo;
    for (int i = 0; i < m; ++i) {
      const double x = mid + 0.5 * h * solver.eigenvalues()[i];
      const double v = solver.eigenvectors()(0, i);
      const double gl_w = 2.0 * v * v;  // mu_0 = 2 on [-1, 1]
      const double w = 0.5 * h * gl_w * std::exp(-x);
      if (w > 0.0) {
        rule.nodes.push_back(x);
        rule.weights.push_back(w);
      }
    }
  }
  return rule;
}

double rayleigh_expectation(const std::function<double(double)>& integrand,
                            double scale, const QuadratureRule& rule) {
  if (!(scale > 0.0)) throw std::invalid_argument("rayleigh_expectation: scale must be > 0");
  if (rule.nodes.empty() || rule.nodes.size() != rule.weights.size()) {
    throw std::invalid_argument("rayleigh_expectation: malformed quadrature rule");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    acc += rule.weights[i] * integrand(scale * rule.nodes[i]);
  }
  return acc;
}

const QuadratureRule& default_laguerre_rule() {
  static const QuadratureRule rule = gauss_laguerre(96);
  return rule;
}

const QuadratureRule& default_truncated_rule() {
  static const QuadratureRule rule = truncated_exp_rule(60.0, 240, 12);
  return rule;
}

}  // namespace sensing
