#include "sensing/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>

namespace sensing {

namespace {

// Cached per-trial decision statistics for the null and alternative legs.
// The meaning depends on the detector:
//   ED1/Type1Ed  block energy (alarm: energy > threshold)
//   ED2Exact     tail probability of the energy at the estimated
//                noncentrality (alarm: tail < delta)
//   ED2Linear    energy minus the estimate-dependent offset (alarm: > t2)
//   MPT          log likelihood ratio (alarm: > log threshold)
struct TrialStats {
  double null_stat = 0.0;
  double alt_stat = 0.0;
};

struct PairHypotheses {
  Hypothesis null_hyp;
  Hypothesis alt_hyp;
};

PairHypotheses hypotheses_of(TrialPlan::HypothesisPair pair) {
  if (pair == TrialPlan::HypothesisPair::Type1) {
    return {Hypothesis::H0, Hypothesis::H1};
  }
  return {Hypothesis::H1Prime, Hypothesis::H2};
}

double noncentrality_of(const SensingScenario& sc, double channel_power) {
  return 2.0 * sc.n_samples / sc.sigma_n_sq * channel_power * sc.symbol_energy;
}

// Always-on reference resource elements per 168-RE block (the 15% overhead
// that also sets N = 142). The count is fixed by the downlink configuration,
// not by how many of the remaining elements carry data.
constexpr int kReferenceResPerPrb = 26;

// Estimation-error variance of the per-block serving-channel estimate: the
// per-reference-element error at the operating SNR, averaged over the
// block's reference elements. One variance serves both legs of a trial.
double trial_nmse(const TrialPlan& plan) {
  if (plan.estimation == TrialPlan::Estimation::Ideal) return 0.0;
  if (plan.nmse_override >= 0.0) return plan.nmse_override;
  const double snr_db = 10.0 * std::log10(plan.scenario.snr());
  return nmse_from_sinr(snr_db).value / kReferenceResPerPrb;
}

// Sample of a noncentral chi-square with 2*dof_half degrees of freedom.
double noncentral_chi2_draw(int dof_half, double ncp, RandomStream& rng) {
  const double shift = std::sqrt(ncp);
  double x = 0.0;
  for (int k = 0; k < 2 * dof_half; ++k) {
    const double g = rng.gaussian() + (k == 0 ? shift : 0.0);
    x += g * g;
  }
  return x;
}

TrialStats run_one_trial(const TrialPlan& plan, std::uint64_t trial_index,
                         const PairHypotheses& pair) {
  const SensingScenario& sc = plan.scenario;
  RandomStream rng = RandomStream::for_trial(plan.seed, trial_index);
  const FadingDraw fading = draw_fading(sc, rng);

  // The estimate-error deviates are always drawn (with zero variance under
  // ideal estimation) so that ideal and error-model runs share the rest of
  // the stream and differ only in the estimate.
  FadingDraw fading_null = fading;
  FadingDraw fading_alt = fading;
  if (pair.null_hyp == Hypothesis::H1Prime) {
    const double nmse = trial_nmse(plan);
    fading_null = corrupt_channel_estimate(fading, nmse, sc.sigma1_sq, rng);
    fading_alt = corrupt_channel_estimate(fading, nmse, sc.sigma1_sq, rng);
  }

  double e_null = 0.0, e_alt = 0.0;
  ObservationBlock null_block, alt_block;
  if (plan.sampling == TrialPlan::Sampling::ConditionalLaw) {
    const bool type2 = pair.null_hyp == Hypothesis::H1Prime;
    const double lam_null = type2 ? noncentrality_of(sc, std::norm(fading.h1)) : 0.0;
    const double lam_alt =
        type2 ? noncentrality_of(sc, std::norm(fading.h1) + std::norm(fading.h2))
              : noncentrality_of(sc, std::norm(fading.h2));
    e_null = noncentral_chi2_draw(sc.n_samples, lam_null, rng);
    e_alt = noncentral_chi2_draw(sc.n_samples, lam_alt, rng);
  } else {
    null_block = synthesize_block(sc, fading_null, pair.null_hyp, rng);
    alt_block = synthesize_block(sc, fading_alt, pair.alt_hyp, rng);
    if (plan.detector.variant != DetectorVariant::MPT) {
      e_null = energy_statistic(null_block, sc.sigma_n_sq);
      e_alt = energy_statistic(alt_block, sc.sigma_n_sq);
    }
  }

  TrialStats out;
  switch (plan.detector.variant) {
    case DetectorVariant::ED1:
    case DetectorVariant::Type1Ed:
      out.null_stat = e_null;
      out.alt_stat = e_alt;
      break;
    case DetectorVariant::ED2Exact: {
      // Tail probability at the estimated noncentrality; comparing it to
      // delta is the same decision as comparing the energy to the inverted
      // threshold, and it sweeps over delta without re-inverting.
      const double lam_null = noncentrality_of(sc, std::norm(fading_null.h1_est));
      const double lam_alt = noncentrality_of(sc, std::norm(fading_alt.h1_est));
      out.null_stat = marcum_q(sc.n_samples, std::sqrt(lam_null), std::sqrt(e_null));
      out.alt_stat = marcum_q(sc.n_samples, std::sqrt(lam_alt), std::sqrt(e_alt));
      break;
    }
    case DetectorVariant::ED2Linear:
      out.null_stat = e_null - ed2_linear_threshold(sc, fading_null.h1_est, 0.0);
      out.alt_stat = e_alt - ed2_linear_threshold(sc, fading_alt.h1_est, 0.0);
      break;
    case DetectorVariant::MPT: {
      // Genie-aided benchmark: true channels, never the estimates.
      const auto formats = policy_formats(sc.modulation_policy);
      const MptLogDensities null_d =
          mpt_log_densities(null_block, fading.h1, fading.h2, sc, formats);
      const MptLogDensities alt_d =
          mpt_log_densities(alt_block, fading.h1, fading.h2, sc, formats);
      out.null_stat = null_d.logp_h2 - null_d.logp_h1prime;
      out.alt_stat = alt_d.logp_h2 - alt_d.logp_h1prime;
      break;
    }
  }
  return out;
}

std::vector<TrialStats> run_trials(const TrialPlan& plan) {
  const PairHypotheses pair = hypotheses_of(plan.pair);
  std::vector<TrialStats> stats(static_cast<std::size_t>(plan.trials));

  int n_threads = plan.n_threads;
  if (n_threads <= 0) {
    n_threads = static_cast<int>(std::thread::hardware_concurrency());
    if (n_threads < 1) n_threads = 1;
    n_threads = std::min<int>(n_threads, 8);
  }
  n_threads = static_cast<int>(
      std::min<long>(n_threads, std::max<long>(1, plan.trials / 64)));

  if (n_threads == 1) {
    for (long i = 0; i < plan.trials; ++i) {
      stats[static_cast<std::size_t>(i)] =
          run_one_trial(plan, static_cast<std::uint64_t>(i), pair);
    }
    return stats;
  }

  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_threads));
  std::vector<long> error_trial(static_cast<std::size_t>(n_threads), -1);
  const long chunk = (plan.trials + n_threads - 1) / n_threads;
  for (int w = 0; w < n_threads; ++w) {
    const long begin = w * chunk;
    const long end = std::min<long>(begin + chunk, plan.trials);
    workers.emplace_back([&, w, begin, end]() {
      for (long i = begin; i < end; ++i) {
        try {
          stats[static_cast<std::size_t>(i)] =
              run_one_trial(plan, static_cast<std::uint64_t>(i), pair);
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          error_trial[static_cast<std::size_t>(w)] = i;
          return;
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  for (std::size_t w = 0; w < errors.size(); ++w) {
    if (errors[w]) {
      try {
        std::rethrow_exception(errors[w]);
      } catch (const std::exception& e) {
        throw std::runtime_error("trial " + std::to_string(error_trial[w]) +
                                 ": " + e.what());
      }
    }
  }
  return stats;
}

bool alarms(DetectorVariant variant, double stat, double threshold_param) {
  if (variant == DetectorVariant::ED2Exact) return stat < threshold_param;
  return stat > threshold_param;
}

// Maps the swept parameter to the cached-statistic threshold. Only Type1Ed
// needs a transform (delta to the fixed central quantile).
double effective_threshold(const TrialPlan& plan, double threshold_param) {
  if (plan.detector.variant == DetectorVariant::Type1Ed) {
    return type1_threshold(plan.scenario, threshold_param);
  }
  return threshold_param;
}

void analytic_rates(const TrialPlan& plan, double threshold_param,
                    std::optional<double>& pf, std::optional<double>& pd) {
  const SensingScenario& sc = plan.scenario;
  switch (plan.detector.variant) {
    case DetectorVariant::ED1:
      pf = pf_ed1_closed(threshold_param, sc).value;
      pd = pd_ed1(threshold_param, sc).value;
      break;
    case DetectorVariant::ED2Exact:
      pf = threshold_param;
      pd = pd_ed2_exact(threshold_param, sc).value;
      break;
    case DetectorVariant::ED2Linear:
      pf = pf_ed2_linear(threshold_param, sc).value;
      pd = pd_ed2_linear(threshold_param, sc).value;
      break;
    case DetectorVariant::Type1Ed:
      pf = threshold_param;
      pd = pd_type1_ed(threshold_param, sc).value;
      break;
    case DetectorVariant::MPT:
      break;  // no analytical rates
  }
}

}  // namespace

void validate(const TrialPlan& plan) {
  if (plan.trials < 100) {
    throw std::invalid_argument("trials must be >= 100 for interval estimates");
  }
  validate(plan.detector);
  if (plan.detector.variant == DetectorVariant::Type1Ed) {
    if (plan.pair != TrialPlan::HypothesisPair::Type1) {
      throw std::invalid_argument("type1_ed senses the (H0, H1) pair");
    }
  } else if (plan.pair != TrialPlan::HypothesisPair::Type2) {
    throw std::invalid_argument(
        std::string(to_string(plan.detector.variant)) +
        " senses the (H1', H2) pair");
  }
  if (plan.detector.variant == DetectorVariant::MPT &&
      plan.sampling == TrialPlan::Sampling::ConditionalLaw) {
    throw std::invalid_argument(
        "the mixture-ratio detector needs symbol-level samples");
  }
}

RateEstimate wilson_interval(long successes, long trials) {
  if (trials < 1 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: bad counts");
  }
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  RateEstimate r;
  r.p_hat = p;
  r.ci_low = successes == 0 ? 0.0 : std::max(0.0, center - half);
  r.ci_high = successes == trials ? 1.0 : std::min(1.0, center + half);
  r.trials = trials;
  return r;
}

RatePair estimate_rates(const TrialPlan& plan) {
  validate(plan);
  const std::vector<TrialStats> stats = run_trials(plan);
  const double thr = effective_threshold(plan, plan.detector.threshold_param);
  long false_alarms = 0, detections = 0;
  for (const TrialStats& s : stats) {
    if (alarms(plan.detector.variant, s.null_stat, thr)) ++false_alarms;
    if (alarms(plan.detector.variant, s.alt_stat, thr)) ++detections;
  }
  return {wilson_interval(false_alarms, plan.trials),
          wilson_interval(detections, plan.trials)};
}

RocCurve roc_sweep(const TrialPlan& plan, const std::vector<double>& thresholds,
                   bool with_analytic) {
  validate(plan);
  if (thresholds.empty()) throw std::invalid_argument("roc_sweep: empty threshold list");
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw std::invalid_argument("roc_sweep: thresholds must be sorted ascending");
  }
  for (double t : thresholds) {
    DetectorConfig probe = plan.detector;
    probe.threshold_param = t;
    validate(probe);
  }

  const std::vector<TrialStats> stats = run_trials(plan);

  // Emit points in order of falling false alarm. For the delta-parametrized
  // detectors the alarm rate grows with the parameter, so those sweep from
  // the top down.
  const bool delta_param = plan.detector.variant == DetectorVariant::ED2Exact ||
                           plan.detector.variant == DetectorVariant::Type1Ed;

  RocCurve curve;
  curve.source = with_analytic && plan.detector.variant != DetectorVariant::MPT
                     ? RocCurve::Source::Both
                     : RocCurve::Source::MonteCarlo;
  curve.points.reserve(thresholds.size());
  for (std::size_t idx = 0; idx < thresholds.size(); ++idx) {
    const double param =
        delta_param ? thresholds[thresholds.size() - 1 - idx] : thresholds[idx];
    const double thr = effective_threshold(plan, param);
    long false_alarms = 0, detections = 0;
    for (const TrialStats& s : stats) {
      if (alarms(plan.detector.variant, s.null_stat, thr)) ++false_alarms;
      if (alarms(plan.detector.variant, s.alt_stat, thr)) ++detections;
    }
    RocPoint point;
    point.threshold_param = param;
    point.pf_mc = wilson_interval(false_alarms, plan.trials);
    point.pd_mc = wilson_interval(detections, plan.trials);
    if (with_analytic) {
      analytic_rates(plan, param, point.pf_analytic, point.pd_analytic);
    }
    curve.points.push_back(point);
  }
  return curve;
}

double pd_at_pf(const RocCurve& curve, double target_pf) {
  // Collect (pf, pd) ascending in pf.
  std::vector<std::pair<double, double>> pts;
  pts.reserve(curve.points.size());
  for (const RocPoint& p : curve.points) {
    pts.emplace_back(p.pf_mc.p_hat, p.pd_mc.p_hat);
  }
  std::sort(pts.begin(), pts.end());
  if (pts.empty() || target_pf < pts.front().first || target_pf > pts.back().first) {
    throw std::invalid_argument(
        "pd_at_pf: curve does not span the requested false alarm");
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& [pf0, pd0] = pts[i];
    const auto& [pf1, pd1] = pts[i + 1];
    if (target_pf >= pf0 && target_pf <= pf1) {
      if (pf1 == pf0) return 0.5 * (pd0 + pd1);
      const double w = (target_pf - pf0) / (pf1 - pf0);
      return pd0 + w * (pd1 - pd0);
    }
  }
  return pts.back().second;
}

std::vector<double> thresholds_for_pf_targets(const TrialPlan& plan,
                                              const std::vector<double>& targets) {
  validate(plan);
  if (targets.empty()) throw std::invalid_argument("no false-alarm targets");
  const std::vector<TrialStats> stats = run_trials(plan);
  std::vector<double> null_stats(stats.size());
  for (std::size_t i = 0; i < stats.size(); ++i) null_stats[i] = stats[i].null_stat;
  std::sort(null_stats.begin(), null_stats.end());

  const DetectorVariant variant = plan.detector.variant;
  const bool delta_param = variant == DetectorVariant::ED2Exact;
  std::vector<double> thresholds;
  thresholds.reserve(targets.size());
  for (double target : targets) {
    if (!(target > 0.0 && target < 1.0)) {
      throw std::invalid_argument("false-alarm targets must be in (0,1)");
    }
    // alarm iff stat > thr (or stat < delta): pick the matching quantile.
    const double level = delta_param ? target : 1.0 - target;
    const auto idx = static_cast<std::size_t>(
        std::min<double>(std::max(0.0, level * (null_stats.size() - 1)),
                         static_cast<double>(null_stats.size() - 1)));
    double t = null_stats[idx];
    if (variant == DetectorVariant::Type1Ed) {
      // the swept parameter is the survival level of the energy quantile
      t = central_chi2_sf(plan.scenario.n_samples, t);
    }
    if (delta_param || variant == DetectorVariant::Type1Ed) {
      t = std::clamp(t, 1e-12, 1.0 - 1e-12);
    }
    thresholds.push_back(t);
  }
  std::sort(thresholds.begin(), thresholds.end());
  return thresholds;
}

EstimationErrorStudy estimation_error_study(const SensingScenario& scenario,
                                            const DetectorConfig& detector,
                                            long trials, std::uint64_t seed) {
  if (detector.variant != DetectorVariant::ED2Exact &&
      detector.variant != DetectorVariant::ED2Linear) {
    throw std::invalid_argument(
        "estimation_error_study: detector must be a channel-aware energy detector");
  }

  EstimationErrorStudy study;
  const std::vector<double> pf_targets = {0.005, 0.01, 0.02, 0.035, 0.05,
                                          0.075, 0.11,  0.16, 0.25,  0.4};

  TrialPlan plan;
  plan.scenario = scenario;
  plan.detector = detector;
  plan.trials = trials;
  plan.seed = seed;
  plan.pair = TrialPlan::HypothesisPair::Type2;

  // Estimation error (and data-modulation spread) moves the realized false
  // alarm away from any fixed calibration, so each configuration gets
  // thresholds placed on its own null quantiles before the sweep.
  const auto sweep = [&]() {
    return roc_sweep(plan, thresholds_for_pf_targets(plan, pf_targets), false);
  };

  plan.estimation = TrialPlan::Estimation::Ideal;
  study.ideal = sweep();
  plan.estimation = TrialPlan::Estimation::NmseModel;
  study.nmse = sweep();
  plan.scenario.n_samples = study.small_n;
  study.nmse_small_n = sweep();

  study.pd_ideal = pd_at_pf(study.ideal, study.at_pf);
  study.pd_nmse = pd_at_pf(study.nmse, study.at_pf);
  study.pd_nmse_small_n = pd_at_pf(study.nmse_small_n, study.at_pf);
  return study;
}

}  // namespace sensing
