#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "sensing/rng.hpp"

namespace sensing {

// Ground-truth label of a synthesized block. H1Prime/H2 are the in-band pair
// (serving signal present); H0/H1 are the idle-spectrum pair.
enum class Hypothesis { H0, H1, H1Prime, H2 };

enum class ModulationName { QAM4, QAM16, QAM64 };

const char* to_string(ModulationName name);
const char* to_string(Hypothesis h);

// Unit-mean-power constellation; the per-symbol energy is applied at
// synthesis time.
struct ModulationAlphabet {
  ModulationName name;
  std::vector<std::complex<double>> points;
};

// The three standard alphabets, in QAM4, QAM16, QAM64 order.
const ModulationAlphabet& standard_alphabet(ModulationName name);
std::span<const ModulationAlphabet> all_alphabets();

// Which alphabets a transmitter may use; one format is drawn per block per
// transmitter.
struct ModulationPolicy {
  enum class Kind { Fixed, UniformOverFormats };
  Kind kind = Kind::Fixed;
  ModulationName fixed_name = ModulationName::QAM4;

  static ModulationPolicy fixed(ModulationName name) { return {Kind::Fixed, name}; }
  static ModulationPolicy uniform_over_formats() {
    return {Kind::UniformOverFormats, ModulationName::QAM4};
  }
};

// The format set visible under a policy (a single alphabet, or all three).
std::span<const ModulationAlphabet> policy_formats(const ModulationPolicy& policy);

// Statistical model of one resource block: channel variances, noise variance,
// symbol energy and the usable sample count.
struct SensingScenario {
  double sigma1_sq = 1.0;   // serving-cell channel variance
  double sigma2_sq = 1.0;   // interfering-cell channel variance
  double sigma_n_sq = 1.0;  // noise variance
  double symbol_energy = 1.0;
  int n_samples = 142;
  ModulationPolicy modulation_policy;

  double sir() const { return sigma1_sq / sigma2_sq; }
  double snr() const { return sigma1_sq / sigma_n_sq; }
};

// Raw inputs for a scenario; ratios may be given in dB (linear value
// 10^(dB/10), sigma1_sq normalized to 1 unless given explicitly).
struct ScenarioParams {
  std::optional<double> sir_db;
  std::optional<double> snr_db;
  std::optional<double> sigma1_sq;
  std::optional<double> sigma2_sq;
  std::optional<double> sigma_n_sq;
  double symbol_energy = 1.0;
  int n_samples = 142;
  ModulationPolicy modulation_policy;
};

// Validates and resolves the parameter set. Throws std::invalid_argument
// naming the offending field.
SensingScenario build_scenario(const ScenarioParams& params);

// One Rayleigh realization. h1_est is what channel-aware detectors consume;
// it equals h1 until an estimation error is injected.
struct FadingDraw {
  std::complex<double> h1;
  std::complex<double> h2;
  std::complex<double> h1_est;
};

FadingDraw draw_fading(const SensingScenario& scenario, RandomStream& rng);

// n i.i.d. uniform draws from the (unit-energy) alphabet.
std::vector<std::complex<double>> draw_symbols(const ModulationAlphabet& alphabet,
                                               int n, RandomStream& rng);

// N received subcarrier samples with their ground truth.
struct ObservationBlock {
  std::vector<std::complex<double>> samples;
  Hypothesis truth = Hypothesis::H0;
  FadingDraw fading;
  std::vector<ModulationName> formats_used;  // serving first, then interferer
};

// Synthesizes one block under the given hypothesis:
//   H0:  n_i          H1:  h2 x2 + n_i
//   H1': h1 x1 + n_i  H2:  h1 x1 + h2 x2 + n_i
// with symbols scaled so E|x|^2 = symbol_energy and noise CN(0, sigma_n_sq).
ObservationBlock synthesize_block(const SensingScenario& scenario,
                                  const FadingDraw& fading, Hypothesis truth,
                                  RandomStream& rng);

// Channel-estimation error variance (normalized by the channel variance) as
// a function of the estimator's operating SINR. The fit holds on [0, 30] dB;
// outside, the input is clamped and flagged.
struct NmseResult {
  double value = 0.0;
  bool clamped = false;
};
NmseResult nmse_from_sinr(double sinr_db);

// Returns a copy with h1_est = h1 + e, e ~ CN(0, nmse * sigma1_sq).
// h1 and h2 are never touched.
FadingDraw corrupt_channel_estimate(const FadingDraw& fading, double nmse,
                                    double sigma1_sq, RandomStream& rng);

}  // namespace sensing
