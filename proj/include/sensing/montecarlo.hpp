#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sensing/analysis.hpp"
#include "sensing/detectors.hpp"
#include "sensing/scenario.hpp"

namespace sensing {

// One seeded experiment: which hypotheses are synthesized, which detector
// decides, and how the serving-channel estimate is degraded.
struct TrialPlan {
  SensingScenario scenario;
  DetectorConfig detector;
  long trials = 10000;
  std::uint64_t seed = 1;

  enum class Estimation { Ideal, NmseModel } estimation = Estimation::Ideal;
  enum class HypothesisPair { Type1, Type2 } pair = HypothesisPair::Type2;

  // SymbolLevel synthesizes full blocks (data symbols, noise) and runs the
  // detector on them. ConditionalLaw draws the energy statistic from its
  // per-channel-realization law with the mean-energy noncentrality, which is
  // the model behind the analytic averages; use it to validate those
  // formulas without the symbol cross-term spread (not available for the
  // mixture-ratio detector).
  enum class Sampling { SymbolLevel, ConditionalLaw } sampling = Sampling::SymbolLevel;

  // Worker threads; 0 picks the hardware concurrency. Results never depend
  // on this.
  int n_threads = 0;

  // Test hook: forces the estimation-error variance under NmseModel instead
  // of deriving it from the operating SINR. Negative means "derive".
  double nmse_override = -1.0;
};

void validate(const TrialPlan& plan);

// Empirical rate with a 95% Wilson interval.
struct RateEstimate {
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  long trials = 0;
};

RateEstimate wilson_interval(long successes, long trials);

struct RatePair {
  RateEstimate pf;
  RateEstimate pd;
};

// Runs the plan at its single configured threshold parameter.
RatePair estimate_rates(const TrialPlan& plan);

struct RocPoint {
  double threshold_param = 0.0;
  RateEstimate pf_mc;
  RateEstimate pd_mc;
  std::optional<double> pf_analytic;
  std::optional<double> pd_analytic;
};

struct RocCurve {
  enum class Source { MonteCarlo, Analytic, Both };
  std::vector<RocPoint> points;  // ordered so pf is non-increasing
  Source source = Source::MonteCarlo;
};

// Sweeps thresholds over one set of trials: per-trial statistics are cached
// once and every threshold is applied to the same statistics, so the curve
// is monotone by construction. `thresholds` must be non-empty and sorted
// ascending; points are emitted in order of decreasing false alarm.
RocCurve roc_sweep(const TrialPlan& plan, const std::vector<double>& thresholds,
                   bool with_analytic = true);

// Detection probability at the given false alarm, linearly interpolated
// along the curve's Monte-Carlo points. Throws if the curve does not span
// the requested false alarm.
double pd_at_pf(const RocCurve& curve, double target_pf);

// Threshold parameters whose empirical false alarm on this plan's null leg
// lands on the targets (taken from null-statistic quantiles). Useful when
// model mismatch (estimation error, non-constant-modulus data) shifts the
// realized false alarm away from any analytic calibration.
std::vector<double> thresholds_for_pf_targets(const TrialPlan& plan,
                                              const std::vector<double>& targets);

// Channel-estimation-error study: the same detector swept under ideal
// estimation, under the SINR-derived error model, and under the error model
// with a reduced sample count.
struct EstimationErrorStudy {
  RocCurve ideal;
  RocCurve nmse;
  RocCurve nmse_small_n;
  int small_n = 100;
  double at_pf = 0.05;
  double pd_ideal = 0.0;
  double pd_nmse = 0.0;
  double pd_nmse_small_n = 0.0;
};

EstimationErrorStudy estimation_error_study(const SensingScenario& scenario,
                                            const DetectorConfig& detector,
                                            long trials, std::uint64_t seed);

}  // namespace sensing
