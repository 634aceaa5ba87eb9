#include "sensing/scenario.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

namespace sensing {

namespace {

// Square QAM grid with side `side`, normalized to unit mean power.
std::vector<std::complex<double>> square_qam(int side) {
  std::vector<std::complex<double>> pts;
  pts.reserve(static_cast<std::size_t>(side) * side);
  // Mean power of levels {-(side-1), ..., -1, 1, ..., side-1} per axis is
  // (side^2 - 1)/3, so the complex mean power is 2(side^2 - 1)/3.
  const double norm = 1.0 / std::sqrt(2.0 * (side * side - 1) / 3.0);
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      pts.emplace_back((2 * i - side + 1) * norm, (2 * q - side + 1) * norm);
    }
  }
  return pts;
}

std::array<ModulationAlphabet, 3> make_alphabets() {
  // QAM4 as unit-modulus points so |x|^2 equals the mean power exactly per
  // symbol; the constellation is the usual one rotated by 45 degrees, which
  // is statistically equivalent under circularly symmetric channels.
  ModulationAlphabet qam4{ModulationName::QAM4,
                          {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}}};
  ModulationAlphabet qam16{ModulationName::QAM16, square_qam(4)};
  ModulationAlphabet qam64{ModulationName::QAM64, square_qam(8)};
  return {std::move(qam4), std::move(qam16), std::move(qam64)};
}

const std::array<ModulationAlphabet, 3>& alphabets() {
  static const std::array<ModulationAlphabet, 3> table = make_alphabets();
  return table;
}

void require_positive(double value, const char* field) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw std::invalid_argument(std::string(field) + " must be finite and > 0");
  }
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace

const char* to_string(ModulationName name) {
  switch (name) {
    case ModulationName::QAM4: return "qam4";
    case ModulationName::QAM16: return "qam16";
    case ModulationName::QAM64: return "qam64";
  }
  return "?";
}

const char* to_string(Hypothesis h) {
  switch (h) {
    case Hypothesis::H0: return "H0";
    case Hypothesis::H1: return "H1";
    case Hypothesis::H1Prime: return "H1'";
    case Hypothesis::H2: return "H2";
  }
  return "?";
}

const ModulationAlphabet& standard_alphabet(ModulationName name) {
  return alphabets()[static_cast<std::size_t>(name)];
}

std::span<const ModulationAlphabet> all_alphabets() {
  return {alphabets().data(), alphabets().size()};
}

std::span<const ModulationAlphabet> policy_formats(const ModulationPolicy& policy) {
  if (policy.kind == ModulationPolicy::Kind::UniformOverFormats) {
    return all_alphabets();
  }
  return {&standard_alphabet(policy.fixed_name), 1};
}

SensingScenario build_scenario(const ScenarioParams& params) {
  SensingScenario sc;
  sc.symbol_energy = params.symbol_energy;
  sc.n_samples = params.n_samples;
  sc.modulation_policy = params.modulation_policy;

  sc.sigma1_sq = params.sigma1_sq.value_or(1.0);
  require_positive(sc.sigma1_sq, "sigma1_sq");

  if (params.sigma2_sq) {
    sc.sigma2_sq = *params.sigma2_sq;
  } else if (params.sir_db) {
    if (!std::isfinite(*params.sir_db)) throw std::invalid_argument("sir_db must be finite");
    sc.sigma2_sq = sc.sigma1_sq / db_to_linear(*params.sir_db);
  } else {
    throw std::invalid_argument("sigma2_sq or sir_db is required");
  }
  require_positive(sc.sigma2_sq, "sigma2_sq");

  if (params.sigma_n_sq) {
    sc.sigma_n_sq = *params.sigma_n_sq;
  } else if (params.snr_db) {
    if (!std::isfinite(*params.snr_db)) throw std::invalid_argument("snr_db must be finite");
    sc.sigma_n_sq = sc.sigma1_sq / db_to_linear(*params.snr_db);
  } else {
    throw std::invalid_argument("sigma_n_sq or snr_db is required");
  }
  require_positive(sc.sigma_n_sq, "sigma_n_sq");

  require_positive(sc.symbol_energy, "symbol_energy");
  if (sc.n_samples < 1) throw std::invalid_argument("n_samples must be >= 1");
  if (!std::isfinite(sc.sir()) || !std::isfinite(sc.snr())) {
    throw std::invalid_argument("sir/snr must be finite");
  }
  return sc;
}

FadingDraw draw_fading(const SensingScenario& scenario, RandomStream& rng) {
  FadingDraw fd;
  fd.h1 = rng.complex_gaussian(scenario.sigma1_sq);
  fd.h2 = rng.complex_gaussian(scenario.sigma2_sq);
  fd.h1_est = fd.h1;
  return fd;
}

std::vector<std::complex<double>> draw_symbols(const ModulationAlphabet& alphabet,
                                               int n, RandomStream& rng) {
  if (n < 1) throw std::invalid_argument("draw_symbols: n must be >= 1");
  const auto m = static_cast<std::uint32_t>(alphabet.points.size());
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n));
  for (auto& x : out) x = alphabet.points[rng.uniform_index(m)];
  return out;
}

ObservationBlock synthesize_block(const SensingScenario& scenario,
                                  const FadingDraw& fading, Hypothesis truth,
                                  RandomStream& rng) {
  const bool has_serving = truth == Hypothesis::H1Prime || truth == Hypothesis::H2;
  const bool has_interferer = truth == Hypothesis::H1 || truth == Hypothesis::H2;
  const auto formats = policy_formats(scenario.modulation_policy);
  const auto pick_format = [&]() -> const ModulationAlphabet& {
    if (formats.size() == 1) return formats[0];
    return formats[rng.uniform_index(static_cast<std::uint32_t>(formats.size()))];
  };

  ObservationBlock block;
  block.truth = truth;
  block.fading = fading;

  const int n = scenario.n_samples;
  std::vector<std::complex<double>> x1, x2;
  if (has_serving) {
    const ModulationAlphabet& fmt = pick_format();
    block.formats_used.push_back(fmt.name);
    x1 = draw_symbols(fmt, n, rng);
  }
  if (has_interferer) {
    const ModulationAlphabet& fmt = pick_format();
    block.formats_used.push_back(fmt.name);
    x2 = draw_symbols(fmt, n, rng);
  }

  const double amp = std::sqrt(scenario.symbol_energy);
  block.samples.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    std::complex<double> y = rng.complex_gaussian(scenario.sigma_n_sq);
    if (has_serving) y += fading.h1 * (amp * x1[static_cast<std::size_t>(i)]);
    if (has_interferer) y += fading.h2 * (amp * x2[static_cast<std::size_t>(i)]);
    block.samples[static_cast<std::size_t>(i)] = y;
  }
  return block;
}

NmseResult nmse_from_sinr(double sinr_db) {
  NmseResult r;
  double s = sinr_db;
  if (s < 0.0) {
    s = 0.0;
    r.clamped = true;
  } else if (s > 30.0) {
    s = 30.0;
    r.clamped = true;
  }
  r.value = std::pow(10.0, -s / 10.0 - 0.26);
  return r;
}

FadingDraw corrupt_channel_estimate(const FadingDraw& fading, double nmse,
                                    double sigma1_sq, RandomStream& rng) {
  if (!(nmse >= 0.0)) throw std::invalid_argument("nmse must be >= 0");
  FadingDraw out = fading;
  out.h1_est = fading.h1 + rng.complex_gaussian(nmse * sigma1_sq);
  return out;
}

}  // namespace sensing
