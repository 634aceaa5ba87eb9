#pragma once

#include "sensing/detectors.hpp"
#include "sensing/quadrature.hpp"
#include "sensing/scenario.hpp"
#include "sensing/specfun.hpp"

namespace sensing {

// A probability computed analytically, with an internal error estimate
// (difference against a coarser evaluation for quadrature results).
struct AnalyticResult {
  enum class Method { ClosedForm, Quadrature };
  double value = 0.0;
  Method method = Method::ClosedForm;
  double est_abs_error = 0.0;
};

// Quadrature resolutions used by the integral-form probabilities. All three
// default to graded truncated panel rules, whose near-zero refinement
// tracks how sharply the conditional tail moves with small channel powers;
// a practical-size Laguerre rule cannot resolve those transitions.
struct AnalysisRules {
  const QuadratureRule* single = nullptr;  // one-dimensional averages
  const QuadratureRule* outer = nullptr;   // first axis of double averages
  const QuadratureRule* inner = nullptr;   // second axis of double averages

  const QuadratureRule& single_rule() const;
  const QuadratureRule& outer_rule() const;
  const QuadratureRule& inner_rule() const;
};

// False alarm of the fixed-threshold in-band energy detector, closed form.
AnalyticResult pf_ed1_closed(double t1, const SensingScenario& scenario);

// Same quantity by numerically averaging the conditional tail over the
// serving channel power; mutual oracle of the closed form.
AnalyticResult pf_ed1_quadrature(double t1, const SensingScenario& scenario,
                                 const AnalysisRules& rules = {});

// Detection probability of the fixed-threshold detector: double average over
// both channel powers (no closed form exists).
AnalyticResult pd_ed1(double t1, const SensingScenario& scenario,
                      const AnalysisRules& rules = {});

// Detection probability of the exact-threshold channel-aware detector at
// per-realization false alarm delta. The threshold is inverted once per
// quadrature node of the serving channel power.
AnalyticResult pd_ed2_exact(double delta, const SensingScenario& scenario,
                            const AnalysisRules& rules = {},
                            const Tolerance& tol = {});

// False alarm / detection of the linear-threshold channel-aware detector as
// functions of the offset t2. Thresholds that go negative inside the average
// clamp to zero (certain alarm).
AnalyticResult pf_ed2_linear(double t2, const SensingScenario& scenario,
                             const AnalysisRules& rules = {});
AnalyticResult pd_ed2_linear(double t2, const SensingScenario& scenario,
                             const AnalysisRules& rules = {});

// Detection probability of the idle-spectrum energy detector at false alarm
// delta (its false alarm is delta by construction).
AnalyticResult pd_type1_ed(double delta, const SensingScenario& scenario,
                           const AnalysisRules& rules = {},
                           const Tolerance& tol = {});

// Threshold parameter achieving the target average false alarm: t1 for ED1,
// t2 for ED2Linear, and the target itself for ED2Exact/Type1Ed. Throws
// CalibrationError if the target cannot be met, std::invalid_argument for
// MPT (no analytical false alarm exists).
double calibrate_threshold(DetectorVariant variant, double target_pf,
                           const SensingScenario& scenario,
                           const AnalysisRules& rules = {});

}  // namespace sensing
