#pragma once

#include <complex>
#include <span>

#include "sensing/scenario.hpp"
#include "sensing/specfun.hpp"

namespace sensing {

enum class DetectorVariant { ED1, ED2Exact, ED2Linear, MPT, Type1Ed };

const char* to_string(DetectorVariant v);

// A detector and its threshold parameter. The parameter means:
//   ED1       raw statistic threshold t1
//   ED2Exact  target per-realization false-alarm delta in (0,1)
//   ED2Linear offset t2 added to the expected in-band energy
//   MPT       log likelihood-ratio threshold
//   Type1Ed   target false-alarm delta in (0,1)
struct DetectorConfig {
  DetectorVariant variant = DetectorVariant::ED1;
  double threshold_param = 0.0;
};

// Throws std::invalid_argument if the parameter is out of range for the
// variant.
void validate(const DetectorConfig& config);

// Alarm decision: HighHypothesis means "interferer present" (H2 for the
// in-band pair, H1 for the idle pair). Ties decide the low hypothesis.
enum class Decision { LowHypothesis, HighHypothesis };

struct TestStatistic {
  double value = 0.0;
  double threshold_used = 0.0;
  Decision decision = Decision::LowHypothesis;
};

// Normalized block energy (2/sigma_n^2) sum |y_i|^2.
double energy_statistic(std::span<const std::complex<double>> samples,
                        double sigma_n_sq);
double energy_statistic(const ObservationBlock& block, double sigma_n_sq);

// Fixed-threshold energy detector.
TestStatistic ed1_decide(double statistic, double t1);

// Channel-aware threshold meeting false-alarm delta exactly at the estimated
// channel: inverts the noncentral tail at lambda1 = (2N/sigma_n^2)|h1_est|^2 Ex.
double ed2_exact_threshold(const SensingScenario& scenario,
                           std::complex<double> h1_est, double delta,
                           const Tolerance& tol = {});

// Linear approximation: t2 plus the expected statistic under the in-band
// null, t2 + (2N/sigma_n^2)(|h1_est|^2 Ex + sigma_n^2).
double ed2_linear_threshold(const SensingScenario& scenario,
                            std::complex<double> h1_est, double t2);

// Threshold for the idle-spectrum detector: central chi-square quantile with
// survival delta.
double type1_threshold(const SensingScenario& scenario, double delta,
                       const Tolerance& tol = {});

// Log joint densities of a block under the in-band hypotheses, with the
// modulation format averaged over the given alphabets. All per-sample
// mixtures and per-block products are evaluated in log domain.
struct MptLogDensities {
  double logp_h1prime = 0.0;
  double logp_h2 = 0.0;
};
MptLogDensities mpt_log_densities(const ObservationBlock& block,
                                  std::complex<double> h1,
                                  std::complex<double> h2,
                                  const SensingScenario& scenario,
                                  std::span<const ModulationAlphabet> formats);

// Likelihood-ratio decision on the log scale.
TestStatistic mpt_decide(double logp_h1prime, double logp_h2, double log_threshold);

}  // namespace sensing
