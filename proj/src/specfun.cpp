#include "sensing/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace sensing {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log Gamma(x) for x > 0. lgamma_r avoids the signgam global of lgamma.
double log_gamma(double x) {
#ifdef __GLIBC__
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

// log(u^n e^{-u} / n!), the log Poisson pmf at n.
//
// For large n the naive n log u - u - lgamma(n+1) cancels ~n log n sized
// terms and loses ~eps*n*log(n) absolutely, which is fatal near the mode
// where the pmf anchors a whole series. Folding Stirling's expansion in
// analytically leaves only n(log1p(d) - d) with d = (u-n)/n.
double log_poisson_pmf(long n, double u) {
  if (u == 0.0) return n == 0 ? 0.0 : kNegInf;
  const double nd = static_cast<double>(n);
  if (n < 20) {
    return nd * std::log(u) - u - log_gamma(nd + 1.0);
  }
  const double d = (u - nd) / nd;
  const double n2 = nd * nd;
  const double stirling =
      (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - 1.0 / (1680.0 * n2)) / n2) / n2) / nd;
  return nd * (std::log1p(d) - d) - 0.5 * std::log(2.0 * std::numbers::pi * nd) -
         stirling;
}

}  // namespace

double poisson_cdf_below(long m, double u) {
  if (m < 1) throw std::invalid_argument("poisson_cdf_below: order must be >= 1");
  if (u < 0.0 || !std::isfinite(u)) {
    throw std::invalid_argument("poisson_cdf_below: argument must be finite and >= 0");
  }
  if (u == 0.0) return 1.0;

  // Largest term of the sum, then expand outward; the ratios n/u and u/n
  // shrink monotonically away from the peak.
  const long peak = std::min(m - 1, static_cast<long>(u));
  const double peak_term = std::exp(log_poisson_pmf(peak, u));
  double sum = peak_term;
  double term = peak_term;
  for (long n = peak; n >= 1; --n) {
    term *= static_cast<double>(n) / u;
    sum += term;
    if (term <= sum * 1e-18) break;
  }
  term = peak_term;
  for (long n = peak + 1; n <= m - 1; ++n) {
    term *= u / static_cast<double>(n);
    sum += term;
    if (term <= sum * 1e-18) break;
  }
  return std::min(1.0, sum);
}

double log_poisson_tail_ge(long m, double u) {
  if (m < 0) throw std::invalid_argument("log_poisson_tail_ge: order must be >= 0");
  if (u < 0.0 || !std::isfinite(u)) {
    throw std::invalid_argument("log_poisson_tail_ge: argument must be finite and >= 0");
  }
  if (m == 0) return 0.0;
  if (u == 0.0) return kNegInf;

  if (u >= static_cast<double>(m)) {
    // Complement is at most ~0.5 here, so 1 - cdf does not cancel.
    const double cdf = poisson_cdf_below(m, u);
    return cdf < 1.0 ? std::log1p(-cdf) : kNegInf;
  }
  // u < m: sum the tail from its largest term at n = m.
  // P = pmf(m) * (1 + u/(m+1) + u^2/((m+1)(m+2)) + ...), ratio < 1.
  double factor = 1.0;
  double term = 1.0;
  for (long k = 1; k < 10000; ++k) {
    term *= u / static_cast<double>(m + k);
    factor += term;
    if (term <= factor * 1e-18) break;
  }
  return log_poisson_pmf(m, u) + std::log(factor);
}

double central_chi2_sf(int dof_half, double t) {
  if (dof_half < 1) throw std::invalid_argument("central_chi2_sf: order must be >= 1");
  if (t < 0.0 || !std::isfinite(t)) {
    throw std::invalid_argument("central_chi2_sf: argument must be finite and >= 0");
  }
  return poisson_cdf_below(dof_half, 0.5 * t);
}

double marcum_q(int order, double a, double b, const Tolerance& tol) {
  if (order < 1) throw std::invalid_argument("marcum_q: order must be >= 1");
  if (!(a >= 0.0) || !(b >= 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
    throw std::invalid_argument("marcum_q: arguments must be finite and >= 0");
  }
  if (b == 0.0) return 1.0;
  const double u = 0.5 * b * b;
  const double half_ncp = 0.5 * a * a;
  if (half_ncp == 0.0) return poisson_cdf_below(order, u);

  // Saturation shortcut via the Laurent-Massart deviation bounds for a
  // noncentral chi-square: both tails are below e^{-kDev} outside
  // mean -+ 2 sqrt((k+2*ncp) kDev) (+ 2 kDev above), which certifies the
  // result to ~9e-27, far beyond any usable tolerance. Skipping the series
  // there keeps saturated quadrature nodes cheap.
  if (tol.abs_tol > 1e-24) {
    constexpr double kDev = 60.0;
    const double dof = 2.0 * order;
    const double ncp = a * a;
    const double mean = dof + ncp;
    const double spread = 2.0 * std::sqrt((dof + 2.0 * ncp) * kDev);
    const double x = b * b;
    if (x <= mean - spread) return 1.0;
    if (x >= mean + spread + 2.0 * kDev) return 0.0;
  }

  // Start at the Poisson mode: weights there never underflow.
  const long j0 = static_cast<long>(half_ncp);
  const double pois0 = std::exp(log_poisson_pmf(j0, half_ncp));
  const long m0 = order + j0;
  const double s0 = poisson_cdf_below(m0, u);
  const double t0 = std::exp(log_poisson_pmf(m0, u));  // increment S_{m+1} = S_m + T_m

  double acc = pois0 * s0;

  // Upward state: (j, pois_j, S_{order+j}, T_{order+j}).
  long ju = j0;
  double pois_u = pois0, s_u = s0, t_u = t0;
  // Downward state: (j, pois_j, S_{order+j}, T_{order+j-1}).
  long jd = j0;
  double pois_d = pois0, s_d = s0;
  double t_d = std::exp(log_poisson_pmf(m0 - 1, u));

  // Truncation bound: past the visited range the Poisson weights decay at
  // least geometrically and every S factor is <= 1, so each side is bounded
  // by its edge weight times a geometric sum.
  const auto tail_bound = [&]() {
    double up = 1.0;
    const double r_up = half_ncp / static_cast<double>(ju + 2);
    if (r_up < 1.0) up = pois_u * (half_ncp / (ju + 1)) / (1.0 - r_up);
    double down = 0.0;
    if (jd > 0) {
      down = 1.0;
      const double r_down = static_cast<double>(jd - 1) / half_ncp;
      if (r_down < 1.0) down = pois_d * (static_cast<double>(jd) / half_ncp) / (1.0 - r_down);
    }
    return up + down;
  };

  long steps = 1;
  double bound = tail_bound();
  while (bound > tol.abs_tol) {
    if (steps >= tol.max_terms) {
      throw NumericalError("marcum_q", std::clamp(acc, 0.0, 1.0), bound);
    }
    // Upward step.
    {
      s_u += t_u;
      t_u *= u / static_cast<double>(order + ju + 1);
      pois_u *= half_ncp / static_cast<double>(ju + 1);
      ++ju;
      s_u = std::min(s_u, 1.0);
      acc += pois_u * s_u;
      ++steps;
    }
    // Downward step while terms remain.
    if (jd > 0) {
      pois_d *= static_cast<double>(jd) / half_ncp;
      s_d = std::max(s_d - t_d, 0.0);
      t_d *= static_cast<double>(order + jd - 1) / u;
      --jd;
      acc += pois_d * s_d;
      ++steps;
    }
    bound = tail_bound();
  }
  return std::clamp(acc, 0.0, 1.0);
}

double inv_marcum_q_threshold(int order, double lambda, double delta,
                              const Tolerance& tol) {
  if (order < 1) throw std::invalid_argument("inv_marcum_q_threshold: order must be >= 1");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("inv_marcum_q_threshold: lambda must be finite and >= 0");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("inv_marcum_q_threshold: delta must be in (0,1)");
  }
  const double a = std::sqrt(lambda);
  // Series tolerance one notch below the target probability tolerance.
  Tolerance inner = tol;
  inner.abs_tol = std::max(tol.abs_tol * 1e-2, 1e-15);

  // Q_N(a, sqrt(t)) decreases from 1 at t=0; grow the bracket until it is
  // below delta.
  double hi = 2.0 * order + lambda + 1.0;
  while (marcum_q(order, a, std::sqrt(hi), inner) > delta) {
    hi *= 2.0;
    if (hi > 1e300) {
      throw NumericalError("inv_marcum_q_threshold bracket", hi, delta);
    }
  }
  double lo = 0.0;
  double mid = 0.5 * hi;
  for (int iter = 0; iter < 300; ++iter) {
    mid = 0.5 * (lo + hi);
    const double q = marcum_q(order, a, std::sqrt(mid), inner);
    if (std::abs(q - delta) <= tol.abs_tol) return mid;
    if (q > delta) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= mid * 1e-15) break;
  }
  return mid;
}

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("log_sum_exp: empty input");
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;  // all -inf, or a +inf/nan dominates
  double sum = 0.0;
  for (double v : values) sum += std::exp(v - m);
  return m + std::log(sum);
}

}  // namespace sensing
