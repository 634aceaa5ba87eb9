#include "sensing/detectors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace sensing {

namespace {

// Terms more than this far below the running maximum contribute less than
// ~1e-22 each to a log-sum-exp and are skipped.
constexpr double kLseCutoff = 50.0;

double noncentrality(const SensingScenario& sc, double channel_power) {
  return (2.0 * sc.n_samples / sc.sigma_n_sq) * channel_power * sc.symbol_energy;
}

}  // namespace

const char* to_string(DetectorVariant v) {
  switch (v) {
    case DetectorVariant::ED1: return "ed1";
    case DetectorVariant::ED2Exact: return "ed2_exact";
    case DetectorVariant::ED2Linear: return "ed2_linear";
    case DetectorVariant::MPT: return "mpt";
    case DetectorVariant::Type1Ed: return "type1_ed";
  }
  return "?";
}

void validate(const DetectorConfig& config) {
  if (config.variant == DetectorVariant::ED2Exact ||
      config.variant == DetectorVariant::Type1Ed) {
    if (!(config.threshold_param > 0.0 && config.threshold_param < 1.0)) {
      throw std::invalid_argument(
          std::string(to_string(config.variant)) +
          " requires a false-alarm parameter in (0,1)");
    }
  }
  if (!std::isfinite(config.threshold_param)) {
    throw std::invalid_argument("threshold_param must be finite");
  }
}

double energy_statistic(std::span<const std::complex<double>> samples,
                        double sigma_n_sq) {
  if (!(sigma_n_sq > 0.0)) throw std::invalid_argument("sigma_n_sq must be > 0");
  double acc = 0.0;
  for (const auto& y : samples) acc += std::norm(y);
  return 2.0 / sigma_n_sq * acc;
}

double energy_statistic(const ObservationBlock& block, double sigma_n_sq) {
  return energy_statistic(std::span<const std::complex<double>>(block.samples),
                          sigma_n_sq);
}

TestStatistic ed1_decide(double statistic, double t1) {
  TestStatistic r;
  r.value = statistic;
  r.threshold_used = t1;
  r.decision = statistic > t1 ? Decision::HighHypothesis : Decision::LowHypothesis;
  return r;
}

double ed2_exact_threshold(const SensingScenario& scenario,
                           std::complex<double> h1_est, double delta,
                           const Tolerance& tol) {
  const double lambda1 = noncentrality(scenario, std::norm(h1_est));
  return inv_marcum_q_threshold(scenario.n_samples, lambda1, delta, tol);
}

double ed2_linear_threshold(const SensingScenario& scenario,
                            std::complex<double> h1_est, double t2) {
  const double n2 = 2.0 * scenario.n_samples;
  return t2 + n2 / scenario.sigma_n_sq *
                  (std::norm(h1_est) * scenario.symbol_energy + scenario.sigma_n_sq);
}

double type1_threshold(const SensingScenario& scenario, double delta,
                       const Tolerance& tol) {
  return inv_marcum_q_threshold(scenario.n_samples, 0.0, delta, tol);
}

MptLogDensities mpt_log_densities(const ObservationBlock& block,
                                  std::complex<double> h1,
                                  std::complex<double> h2,
                                  const SensingScenario& scenario,
                                  std::span<const ModulationAlphabet> formats) {
  if (block.samples.empty()) throw std::invalid_argument("mpt_log_densities: empty block");
  if (formats.empty()) throw std::invalid_argument("mpt_log_densities: no formats");

  const double sig = scenario.sigma_n_sq;
  const double amp = std::sqrt(scenario.symbol_energy);
  const std::size_t n = block.samples.size();
  const std::size_t m = formats.size();
  const double log_gauss_norm = -std::log(std::numbers::pi * sig);

  // Per-sample mixture in log domain over a fixed set of mean offsets:
  // log (1/|offsets|) sum_j f_n(y - offset_j), accumulated over the block.
  std::vector<double> scratch;
  const auto block_log_density =
      [&](const std::vector<std::complex<double>>& offsets) {
        const double log_card = std::log(static_cast<double>(offsets.size()));
        scratch.resize(offsets.size());
        double total = 0.0;
        for (const auto& y : block.samples) {
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t j = 0; j < offsets.size(); ++j) {
            const double e = -std::norm(y - offsets[j]) / sig;
            scratch[j] = e;
            if (e > best) best = e;
          }
          double sum = 0.0;
          for (double e : scratch) {
            const double d = best - e;
            if (d < kLseCutoff) sum += std::exp(-d);
          }
          total += best + std::log(sum);
        }
        return total + static_cast<double>(n) * (log_gauss_norm - log_card);
      };

  // Scaled constellation means per format for each transmitter.
  std::vector<std::vector<std::complex<double>>> means1(m), means2(m);
  for (std::size_t k = 0; k < m; ++k) {
    means1[k].reserve(formats[k].points.size());
    means2[k].reserve(formats[k].points.size());
    for (const auto& x : formats[k].points) {
      means1[k].push_back(h1 * (amp * x));
      means2[k].push_back(h2 * (amp * x));
    }
  }

  std::vector<double> per_format(m);
  for (std::size_t k = 0; k < m; ++k) {
    per_format[k] = block_log_density(means1[k]);
  }
  const double log_m = std::log(static_cast<double>(m));
  MptLogDensities out;
  out.logp_h1prime = log_sum_exp(per_format) - log_m;

  std::vector<double> per_pair;
  per_pair.reserve(m * m);
  std::vector<std::complex<double>> combined;
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t l = 0; l < m; ++l) {
      combined.clear();
      combined.reserve(means1[k].size() * means2[l].size());
      for (const auto& a : means1[k]) {
        for (const auto& b : means2[l]) {
          combined.push_back(a + b);
        }
      }
      per_pair.push_back(block_log_density(combined));
    }
  }
  out.logp_h2 = log_sum_exp(per_pair) - 2.0 * log_m;
  return out;
}

TestStatistic mpt_decide(double logp_h1prime, double logp_h2, double log_threshold) {
  TestStatistic r;
  r.value = logp_h2 - logp_h1prime;
  r.threshold_used = log_threshold;
  r.decision = r.value > log_threshold ? Decision::HighHypothesis
                                       : Decision::LowHypothesis;
  return r;
}

}  // namespace sensing
