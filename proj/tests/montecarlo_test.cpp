#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sensing/montecarlo.hpp"

using namespace sensing;

namespace {

SensingScenario scenario1() {
  ScenarioParams p;
  p.sir_db = 0.0;
  p.snr_db = 6.0;
  p.n_samples = 142;
  return build_scenario(p);
}

TrialPlan base_plan(DetectorVariant variant, double param, long trials,
                    std::uint64_t seed) {
  TrialPlan plan;
  plan.scenario = scenario1();
  plan.detector = {variant, param};
  plan.trials = trials;
  plan.seed = seed;
  plan.pair = variant == DetectorVariant::Type1Ed ? TrialPlan::HypothesisPair::Type1
                                                  : TrialPlan::HypothesisPair::Type2;
  return plan;
}

bool same_estimate(const RateEstimate& a, const RateEstimate& b) {
  return a.p_hat == b.p_hat && a.ci_low == b.ci_low && a.ci_high == b.ci_high &&
         a.trials == b.trials;
}

}  // namespace

TEST_CASE("wilson interval") {
  const RateEstimate zero = wilson_interval(0, 100);
  CHECK(zero.p_hat == 0.0);
  CHECK(zero.ci_low == 0.0);
  // closed form for zero successes: z^2 / (n + z^2)
  const double z2 = 1.959963984540054 * 1.959963984540054;
  CHECK(zero.ci_high == doctest::Approx(z2 / (100.0 + z2)).epsilon(1e-12));

  const RateEstimate mid = wilson_interval(50, 1000);
  CHECK(mid.ci_low <= mid.p_hat);
  CHECK(mid.p_hat <= mid.ci_high);
  CHECK(mid.ci_low >= 0.0);
  CHECK(mid.ci_high <= 1.0);

  const RateEstimate all = wilson_interval(100, 100);
  CHECK(all.ci_high == 1.0);
  CHECK(all.ci_low < 1.0);

  CHECK_THROWS_AS(wilson_interval(5, 0), std::invalid_argument);
  CHECK_THROWS_AS(wilson_interval(-1, 10), std::invalid_argument);
}

TEST_CASE("plan validation") {
  TrialPlan plan = base_plan(DetectorVariant::ED1, 100.0, 50, 1);
  CHECK_THROWS_AS(validate(plan), std::invalid_argument);
  plan.trials = 100;
  CHECK_NOTHROW(validate(plan));

  plan = base_plan(DetectorVariant::Type1Ed, 0.05, 1000, 1);
  plan.pair = TrialPlan::HypothesisPair::Type2;
  CHECK_THROWS_AS(validate(plan), std::invalid_argument);

  plan = base_plan(DetectorVariant::ED1, 100.0, 1000, 1);
  plan.pair = TrialPlan::HypothesisPair::Type1;
  CHECK_THROWS_AS(validate(plan), std::invalid_argument);
}

TEST_CASE("calibrated fixed threshold hits its false alarm") {
  const SensingScenario sc = scenario1();
  const double t1 = calibrate_threshold(DetectorVariant::ED1, 0.05, sc);
  const RatePair rates = estimate_rates(base_plan(DetectorVariant::ED1, t1, 10000, 21));
  CHECK(std::abs(rates.pf.p_hat - 0.05) <= oracle::binomial_3sigma(0.05, 10000));
  CHECK(rates.pd.p_hat > rates.pf.p_hat);
}

TEST_CASE("an absurd threshold alarms never") {
  const RatePair rates =
      estimate_rates(base_plan(DetectorVariant::ED1, 1e9, 500, 3));
  CHECK(rates.pf.p_hat == 0.0);
  CHECK(rates.pd.p_hat == 0.0);
}

TEST_CASE("exact-threshold detector at the headline operating point") {
  const RatePair rates =
      estimate_rates(base_plan(DetectorVariant::ED2Exact, 0.05, 10000, 5));
  CHECK(std::abs(rates.pf.p_hat - 0.05) <= oracle::binomial_3sigma(0.05, 10000));
  CHECK(rates.pd.p_hat > 0.87);
  CHECK(rates.pd.p_hat < 0.93);
}

TEST_CASE("idle-pair detector false alarm") {
  const RatePair rates =
      estimate_rates(base_plan(DetectorVariant::Type1Ed, 0.1, 10000, 6));
  CHECK(std::abs(rates.pf.p_hat - 0.1) <= oracle::binomial_3sigma(0.1, 10000));
  CHECK(rates.pd.p_hat > rates.pf.p_hat);
}

TEST_CASE("results are deterministic and thread-count independent") {
  TrialPlan plan = base_plan(DetectorVariant::ED2Exact, 0.05, 1000, 77);
  plan.n_threads = 1;
  const RatePair serial = estimate_rates(plan);
  const RatePair serial2 = estimate_rates(plan);
  CHECK(same_estimate(serial.pf, serial2.pf));
  CHECK(same_estimate(serial.pd, serial2.pd));
  plan.n_threads = 2;
  const RatePair parallel = estimate_rates(plan);
  CHECK(same_estimate(serial.pf, parallel.pf));
  CHECK(same_estimate(serial.pd, parallel.pd));
  plan.n_threads = 5;
  const RatePair lopsided = estimate_rates(plan);
  CHECK(same_estimate(serial.pf, lopsided.pf));
  CHECK(same_estimate(serial.pd, lopsided.pd));
}

TEST_CASE("zero estimation error reproduces the ideal path bit for bit") {
  TrialPlan ideal = base_plan(DetectorVariant::ED2Linear, 50.0, 2000, 31);
  ideal.estimation = TrialPlan::Estimation::Ideal;
  TrialPlan zeroed = ideal;
  zeroed.estimation = TrialPlan::Estimation::NmseModel;
  zeroed.nmse_override = 0.0;
  const RatePair a = estimate_rates(ideal);
  const RatePair b = estimate_rates(zeroed);
  CHECK(same_estimate(a.pf, b.pf));
  CHECK(same_estimate(a.pd, b.pd));
}

TEST_CASE("roc sweep input validation") {
  const TrialPlan plan = base_plan(DetectorVariant::ED1, 100.0, 200, 9);
  CHECK_THROWS_AS(roc_sweep(plan, {}, false), std::invalid_argument);
  CHECK_THROWS_AS(roc_sweep(plan, {3.0, 2.0, 5.0}, false), std::invalid_argument);
  const TrialPlan bad = base_plan(DetectorVariant::ED2Exact, 0.05, 200, 9);
  CHECK_THROWS_AS(roc_sweep(bad, {0.05, 1.5}, false), std::invalid_argument);
}

TEST_CASE("roc curves are monotone because statistics are shared") {
  for (auto variant : {DetectorVariant::ED1, DetectorVariant::ED2Exact,
                       DetectorVariant::ED2Linear}) {
    std::vector<double> thresholds;
    if (variant == DetectorVariant::ED1) {
      for (double t = 200.0; t <= 6000.0; t += 400.0) thresholds.push_back(t);
    } else if (variant == DetectorVariant::ED2Exact) {
      thresholds = {0.01, 0.03, 0.05, 0.1, 0.2, 0.4};
    } else {
      for (double t = -200.0; t <= 600.0; t += 80.0) thresholds.push_back(t);
    }
    const TrialPlan plan = base_plan(
        variant, variant == DetectorVariant::ED2Exact ? 0.05 : thresholds.front(),
        2000, 13);
    const RocCurve curve = roc_sweep(plan, thresholds, false);
    REQUIRE(curve.points.size() == thresholds.size());
    for (std::size_t i = 1; i < curve.points.size(); ++i) {
      CHECK(curve.points[i].pf_mc.p_hat <= curve.points[i - 1].pf_mc.p_hat);
      CHECK(curve.points[i].pd_mc.p_hat <= curve.points[i - 1].pd_mc.p_hat);
    }
  }
}

TEST_CASE("analytic columns ride along the sweep") {
  const SensingScenario sc = scenario1();
  const double t1 = calibrate_threshold(DetectorVariant::ED1, 0.2, sc);
  const TrialPlan plan = base_plan(DetectorVariant::ED1, t1, 4000, 15);
  const RocCurve curve = roc_sweep(plan, {t1}, true);
  CHECK(curve.source == RocCurve::Source::Both);
  REQUIRE(curve.points.size() == 1);
  REQUIRE(curve.points[0].pf_analytic.has_value());
  REQUIRE(curve.points[0].pd_analytic.has_value());
  CHECK(*curve.points[0].pf_analytic == doctest::Approx(0.2).epsilon(1e-4));
  // empirical rate consistent with the analytic column
  CHECK(std::abs(curve.points[0].pf_mc.p_hat - 0.2) <=
        oracle::binomial_3sigma(0.2, 4000));
}

TEST_CASE("interpolated operating point") {
  RocCurve curve;
  for (double pf : {0.4, 0.2, 0.1, 0.02}) {
    RocPoint p;
    p.threshold_param = 1.0 - pf;
    p.pf_mc = wilson_interval(static_cast<long>(pf * 1000), 1000);
    p.pd_mc = wilson_interval(static_cast<long>(pf * 2000), 1000);
    curve.points.push_back(p);
  }
  CHECK(pd_at_pf(curve, 0.1) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(pd_at_pf(curve, 0.15) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(pd_at_pf(curve, 0.01), std::invalid_argument);
  CHECK_THROWS_AS(pd_at_pf(curve, 0.5), std::invalid_argument);
}

TEST_CASE("quantile-derived thresholds land on their targets") {
  const std::vector<double> targets = {0.05, 0.2};
  for (auto variant : {DetectorVariant::ED1, DetectorVariant::ED2Exact,
                       DetectorVariant::Type1Ed}) {
    TrialPlan plan =
        base_plan(variant, variant == DetectorVariant::ED1 ? 100.0 : 0.05, 10000,
                  17 + static_cast<int>(variant));
    const std::vector<double> thresholds = thresholds_for_pf_targets(plan, targets);
    REQUIRE(thresholds.size() == 2);
    const RocCurve curve = roc_sweep(plan, thresholds, false);
    // points come out in decreasing-pf order
    CHECK(std::abs(curve.points[0].pf_mc.p_hat - 0.2) < 0.015);
    CHECK(std::abs(curve.points[1].pf_mc.p_hat - 0.05) < 0.015);
  }
}

TEST_CASE("mixture-ratio detector runs end to end on a small block") {
  SensingScenario sc = scenario1();
  sc.n_samples = 16;
  TrialPlan plan;
  plan.scenario = sc;
  plan.detector = {DetectorVariant::MPT, 0.0};
  plan.trials = 300;
  plan.seed = 19;
  const RatePair rates = estimate_rates(plan);
  CHECK(rates.pf.p_hat < rates.pd.p_hat);
  CHECK(rates.pf.p_hat < 0.5);
}

TEST_CASE("conditional-law sampling reproduces the analytic averages") {
  // Scenario 2 has the sharpest statistics; the law-level draws must agree
  // with the channel-averaged analytics on both legs.
  ScenarioParams p;
  p.sir_db = 6.0;
  p.snr_db = 12.0;
  p.n_samples = 142;
  const SensingScenario sc = build_scenario(p);

  TrialPlan plan;
  plan.scenario = sc;
  plan.detector = {DetectorVariant::ED2Linear, 0.0};
  plan.trials = 10000;
  plan.seed = 29;
  plan.sampling = TrialPlan::Sampling::ConditionalLaw;

  for (double target : {0.5, 0.05}) {
    const double t2 = calibrate_threshold(DetectorVariant::ED2Linear, target, sc);
    plan.detector.threshold_param = t2;
    const RatePair rates = estimate_rates(plan);
    CHECK(std::abs(rates.pf.p_hat - target) <=
          oracle::binomial_3sigma(target, plan.trials));
    const double pd_ref = pd_ed2_linear(t2, sc).value;
    CHECK(std::abs(rates.pd.p_hat - pd_ref) <=
          oracle::binomial_3sigma(pd_ref, plan.trials));
  }

  TrialPlan mpt = plan;
  mpt.detector = {DetectorVariant::MPT, 0.0};
  CHECK_THROWS_AS(validate(mpt), std::invalid_argument);
}

TEST_CASE("symbol-level alternative rates sit below the averaged-law value") {
  // Under H2 the per-block symbol cross term widens the statistic beyond
  // the mean-energy noncentral law, which drags the detection rate below
  // the analytic average in its concave region. This pins the measured gap
  // direction and size so the deviation stays a known quantity.
  ScenarioParams p;
  p.sir_db = 6.0;
  p.snr_db = 12.0;
  p.n_samples = 142;
  const SensingScenario sc = build_scenario(p);
  const double t2 = calibrate_threshold(DetectorVariant::ED2Linear, 0.05, sc);

  TrialPlan plan;
  plan.scenario = sc;
  plan.detector = {DetectorVariant::ED2Linear, t2};
  plan.trials = 20000;
  plan.seed = 37;
  const RatePair rates = estimate_rates(plan);

  const double pd_ref = pd_ed2_linear(t2, sc).value;
  CHECK(rates.pd.p_hat < pd_ref);             // one-sided gap
  CHECK(pd_ref - rates.pd.p_hat < 0.04);      // bounded
  // the null leg has no cross term for the unit-modulus alphabet
  CHECK(std::abs(rates.pf.p_hat - 0.05) <=
        oracle::binomial_3sigma(0.05, plan.trials));
}

TEST_CASE("estimation error study structure") {
  SensingScenario sc = scenario1();
  const DetectorConfig det{DetectorVariant::ED2Linear, 0.05};
  const EstimationErrorStudy study = estimation_error_study(sc, det, 3000, 23);
  CHECK(study.small_n == 100);
  CHECK(study.ideal.points.size() == study.nmse.points.size());
  CHECK_FALSE(study.nmse_small_n.points.empty());
  CHECK(study.pd_ideal > study.pd_nmse);
  CHECK(study.pd_ideal > 0.5);

  DetectorConfig bad{DetectorVariant::ED1, 100.0};
  CHECK_THROWS_AS(estimation_error_study(sc, bad, 3000, 23), std::invalid_argument);
}
