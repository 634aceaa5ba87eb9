#include "sensing/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sensing {

namespace {

// Default and coarser-companion rules; the companions back the reported
// error estimates.
const QuadratureRule& default_outer_rule() {
  static const QuadratureRule rule = truncated_exp_rule(60.0, 64, 6);
  return rule;
}
const QuadratureRule& default_inner_rule() {
  static const QuadratureRule rule = truncated_exp_rule(60.0, 120, 8);
  return rule;
}
const QuadratureRule& coarse_single() {
  static const QuadratureRule rule = truncated_exp_rule(60.0, 120, 10);
  return rule;
}
const QuadratureRule& coarse_outer() {
  static const QuadratureRule rule = truncated_exp_rule(60.0, 44, 5);
  return rule;
}
const QuadratureRule& coarse_inner() {
  static const QuadratureRule rule = truncated_exp_rule(60.0, 80, 6);
  return rule;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

// Signal-power factor of the noncentrality: lambda = energy_slope * gamma.
double energy_slope(const SensingScenario& sc) {
  return 2.0 * sc.n_samples * sc.symbol_energy / sc.sigma_n_sq;
}

double conditional_tail(const SensingScenario& sc, double lambda, double threshold) {
  return marcum_q(sc.n_samples, std::sqrt(lambda), std::sqrt(std::max(threshold, 0.0)));
}

AnalyticResult quadrature_result(
    const std::function<double(const AnalysisRules&)>& eval,
    const AnalysisRules& rules) {
  AnalyticResult r;
  r.method = AnalyticResult::Method::Quadrature;
  const double fine = eval(rules);
  const AnalysisRules coarse{&coarse_single(), &coarse_outer(), &coarse_inner()};
  r.value = clamp01(fine);
  r.est_abs_error = std::abs(fine - eval(coarse));
  return r;
}

// Density of the sum of independent exponentials with means a >= b, expressed
// relative to the e^{-s/a}/a weight the quadrature applies: extra(s) such
// that rho(s) = extra(s) * e^{-s/a} / a.
double hypoexp_density_ratio(double s, double a, double b) {
  if (a == b) return s / b;
  const double d = (a - b) / (a * b);
  return a * (-std::expm1(-s * d)) / (a - b);
}

}  // namespace

const QuadratureRule& AnalysisRules::single_rule() const {
  return single ? *single : default_truncated_rule();
}

const QuadratureRule& AnalysisRules::outer_rule() const {
  return outer ? *outer : default_outer_rule();
}

const QuadratureRule& AnalysisRules::inner_rule() const {
  return inner ? *inner : default_inner_rule();
}

AnalyticResult pf_ed1_closed(double t1, const SensingScenario& sc) {
  if (!(t1 >= 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("pf_ed1_closed: t1 must be finite and >= 0");
  }
  const int n = sc.n_samples;
  const double p2 = sc.sigma_n_sq / (n * sc.symbol_energy * sc.sigma1_sq);
  const double u = 0.5 * t1;
  const double v = u / (1.0 + p2);

  // e^{-u} sum_{k<N-1} u^k/k!  +  (1+p2)^{N-1} e^{-u} [e^v - sum_{k<N-1} v^k/k!]
  // The bracket equals e^v P(Poisson(v) >= N-1); its scale factor is kept in
  // log space, where the (1+p2)^{N-1} growth and the e^{-u+v} decay cancel.
  const double head = n >= 2 ? poisson_cdf_below(n - 1, u) : 0.0;
  const double log_scale = (n - 1) * std::log1p(p2) - u * (p2 / (1.0 + p2));
  const double bracket = std::exp(log_scale + log_poisson_tail_ge(n - 1, v));

  AnalyticResult r;
  r.method = AnalyticResult::Method::ClosedForm;
  r.value = clamp01(head + bracket);
  r.est_abs_error = 1e-14;
  return r;
}

AnalyticResult pf_ed1_quadrature(double t1, const SensingScenario& sc,
                                 const AnalysisRules& rules) {
  if (!(t1 >= 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("pf_ed1_quadrature: t1 must be finite and >= 0");
  }
  const double slope = energy_slope(sc);
  return quadrature_result(
      [&](const AnalysisRules& r) {
        return rayleigh_expectation(
            [&](double g1) { return conditional_tail(sc, slope * g1, t1); },
            sc.sigma1_sq, r.single_rule());
      },
      rules);
}

AnalyticResult pd_ed1(double t1, const SensingScenario& sc,
                      const AnalysisRules& rules) {
  if (!(t1 >= 0.0) || !std::isfinite(t1)) {
    throw std::invalid_argument("pd_ed1: t1 must be finite and >= 0");
  }
  // The integrand depends on the channel powers only through their sum, so
  // the double average collapses to one integral against the density of
  // gamma1 + gamma2 (a hypoexponential).
  const double a = std::max(sc.sigma1_sq, sc.sigma2_sq);
  const double b = std::min(sc.sigma1_sq, sc.sigma2_sq);
  const double slope = energy_slope(sc);
  return quadrature_result(
      [&](const AnalysisRules& r) {
        return rayleigh_expectation(
            [&](double s) {
              return hypoexp_density_ratio(s, a, b) *
                     conditional_tail(sc, slope * s, t1);
            },
            a, r.single_rule());
      },
      rules);
}

AnalyticResult pd_ed2_exact(double delta, const SensingScenario& sc,
                            const AnalysisRules& rules, const Tolerance& tol) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("pd_ed2_exact: delta must be in (0,1)");
  }
  const double slope = energy_slope(sc);
  return quadrature_result(
      [&](const AnalysisRules& r) {
        const QuadratureRule& outer = r.outer_rule();
        // Threshold inversion is the expensive inner step; do it once per
        // serving-power node.
        std::vector<double> thresholds(outer.size());
        for (std::size_t i = 0; i < outer.size(); ++i) {
          const double g1 = sc.sigma1_sq * outer.nodes[i];
          thresholds[i] =
              inv_marcum_q_threshold(sc.n_samples, slope * g1, delta, tol);
        }
        double acc = 0.0;
        for (std::size_t i = 0; i < outer.size(); ++i) {
          const double g1 = sc.sigma1_sq * outer.nodes[i];
          const double inner = rayleigh_expectation(
              [&](double g2) {
                return conditional_tail(sc, slope * (g1 + g2), thresholds[i]);
              },
              sc.sigma2_sq, r.inner_rule());
          acc += outer.weights[i] * inner;
        }
        return acc;
      },
      rules);
}

namespace {

double ed2_linear_threshold_at(const SensingScenario& sc, double g1, double t2) {
  return t2 + energy_slope(sc) * g1 + 2.0 * sc.n_samples;
}

}  // namespace

AnalyticResult pf_ed2_linear(double t2, const SensingScenario& sc,
                             const AnalysisRules& rules) {
  if (!std::isfinite(t2)) throw std::invalid_argument("pf_ed2_linear: t2 must be finite");
  const double slope = energy_slope(sc);
  return quadrature_result(
      [&](const AnalysisRules& r) {
        return rayleigh_expectation(
            [&](double g1) {
              return conditional_tail(sc, slope * g1,
                                      ed2_linear_threshold_at(sc, g1, t2));
            },
            sc.sigma1_sq, r.inner_rule());
      },
      rules);
}

AnalyticResult pd_ed2_linear(double t2, const SensingScenario& sc,
                             const AnalysisRules& rules) {
  if (!std::isfinite(t2)) throw std::invalid_argument("pd_ed2_linear: t2 must be finite");
  const double slope = energy_slope(sc);
  return quadrature_result(
      [&](const AnalysisRules& r) {
        const QuadratureRule& outer = r.outer_rule();
        double acc = 0.0;
        for (std::size_t i = 0; i < outer.size(); ++i) {
          const double g1 = sc.sigma1_sq * outer.nodes[i];
          const double threshold = ed2_linear_threshold_at(sc, g1, t2);
          const double inner = rayleigh_expectation(
              [&](double g2) {
                return conditional_tail(sc, slope * (g1 + g2), threshold);
              },
              sc.sigma2_sq, r.inner_rule());
          acc += outer.weights[i] * inner;
        }
        return acc;
      },
      rules);
}

AnalyticResult pd_type1_ed(double delta, const SensingScenario& sc,
                           const AnalysisRules& rules, const Tolerance& tol) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("pd_type1_ed: delta must be in (0,1)");
  }
  const double t = type1_threshold(sc, delta, tol);
  const double slope = energy_slope(sc);
  return quadrature_result(
      [&](const AnalysisRules& r) {
        return rayleigh_expectation(
            [&](double g2) { return conditional_tail(sc, slope * g2, t); },
            sc.sigma2_sq, r.single_rule());
      },
      rules);
}

namespace {

// Bisection on a monotone-decreasing false-alarm function.
double calibrate_decreasing(const std::function<double(double)>& pf, double lo,
                            double hi_start, double target, const char* what) {
  double hi = hi_start;
  while (pf(hi) > target) {
    hi *= 2.0;
    if (hi > 1e15) throw CalibrationError(std::string(what) + ": target false alarm too small");
  }
  if (pf(lo) < target) {
    throw CalibrationError(std::string(what) + ": target false alarm not reachable");
  }
  const double tol = std::max(1e-11, 1e-7 * target);
  double mid = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    mid = 0.5 * (lo + hi);
    const double p = pf(mid);
    if (std::abs(p - target) <= tol) return mid;
    if (p > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (std::abs(pf(mid) - target) > 1e-6) {
    throw CalibrationError(std::string(what) + ": bisection did not converge");
  }
  return mid;
}

}  // namespace

double calibrate_threshold(DetectorVariant variant, double target_pf,
                           const SensingScenario& sc, const AnalysisRules& rules) {
  if (!(target_pf > 0.0 && target_pf < 1.0)) {
    throw std::invalid_argument("calibrate_threshold: target_pf must be in (0,1)");
  }
  switch (variant) {
    case DetectorVariant::ED2Exact:
    case DetectorVariant::Type1Ed:
      // The threshold adapts to meet the target by construction.
      return target_pf;
    case DetectorVariant::ED1:
      return calibrate_decreasing(
          [&](double t1) { return pf_ed1_closed(t1, sc).value; }, 0.0,
          4.0 * sc.n_samples, target_pf, "calibrate ed1");
    case DetectorVariant::ED2Linear: {
      // pf is 1 for offsets far below zero (all thresholds clamp) and falls
      // monotonically; find a bracketing low end first.
      double lo = -2.0 * sc.n_samples;
      while (pf_ed2_linear(lo, sc, rules).value < target_pf) {
        lo *= 2.0;
        if (lo < -1e15) throw CalibrationError("calibrate ed2_linear: target not reachable");
      }
      return calibrate_decreasing(
          [&](double t2) { return pf_ed2_linear(t2, sc, rules).value; }, lo,
          4.0 * sc.n_samples, target_pf, "calibrate ed2_linear");
    }
    case DetectorVariant::MPT:
      throw std::invalid_argument(
          "calibrate_threshold: no analytical false alarm for mpt");
  }
  throw std::invalid_argument("calibrate_threshold: unknown variant");
}

}  // namespace sensing
