#include "gaitsom/synth.hpp"

#include "gaitsom/error.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace gaitsom {
namespace {

constexpr double kStanceEnd = 60.0;
constexpr double kTaperHalfWidth = 2.5;
constexpr int kHfCount = kHfLastHarmonic - kHfFirstHarmonic + 1;

double side_weight(Side side, double gain) {
  // Left/right weights keep their mean at 1 and their ratio at `gain`.
  return side == Side::Left ? 2.0 * gain / (1.0 + gain) : 2.0 / (1.0 + gain);
}

std::mt19937_64 subject_rng(std::uint64_t seed, std::size_t class_index, std::size_t subject_index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(class_index), static_cast<std::uint32_t>(subject_index)};
  return std::mt19937_64(seq);
}

}  // namespace

void PerturbationSpec::validate() const {
  if (!(hf_amplitude >= 0.0) || !(jitter_sd >= 0.0) || !(timing_shift >= 0.0)) {
    throw ArgumentError("perturbation magnitudes must be non-negative");
  }
  if (!(asymmetry_gain > 0.0) || !std::isfinite(asymmetry_gain)) throw ArgumentError("asymmetry_gain must be positive");
}

std::map<Joint, std::vector<Harmonic>> SynthSpec::default_templates() {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  // Knee peaks in swing at ~72% of the cycle.
  constexpr double knee_peak = 0.72;
  return {
      {Joint::Hip, {{1, 30.0, 0.0}, {2, 4.0, 1.0}}},
      {Joint::Knee, {{0, 28.0, 0.0}, {1, 22.0, -two_pi * knee_peak}, {2, 10.0, -2.0 * two_pi * knee_peak}, {3, 3.0, 0.5}}},
      {Joint::Ankle, {{0, 2.0, 0.0}, {1, 6.0, -2.4}, {2, 7.0, 2.1}, {3, 3.0, -0.8}, {4, 1.5, 0.3}}},
  };
}

void SynthSpec::validate() const {
  if (n_subjects < 1) throw ArgumentError("synth: n_subjects must be at least 1");
  if (classes.empty()) throw ArgumentError("synth: at least one class is required");
  if (joints.empty()) throw ArgumentError("synth: at least one joint is required");
  if (grid_size < kMinGridSize) throw ArgumentError("synth: grid_size too small");
  for (const auto& c : classes) c.perturbation.validate();
  for (Joint j : joints) {
    auto it = templates.find(j);
    if (it == templates.end()) throw ArgumentError("synth: no template for " + std::string(to_string(j)));
    for (const auto& h : it->second) {
      if (h.index < 0 || h.index > kMaxTemplateHarmonic) throw ArgumentError("synth: template harmonic index must be in 0..15");
      if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase)) throw ArgumentError("synth: non-finite template coefficient");
    }
  }
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (classes[k].label == classes[i].label) throw ArgumentError("synth: duplicate class " + classes[i].label.str());
    }
  }
}

std::vector<double> harmonic_signal(const std::vector<Harmonic>& harmonics, std::size_t grid_size, double shift_pct) {
  std::vector<double> out(grid_size, 0.0);
  for (std::size_t k = 0; k < grid_size; ++k) {
    const double pct = static_cast<double>(k) * 100.0 / static_cast<double>(grid_size - 1) - shift_pct;
    double v = 0.0;
    for (const auto& h : harmonics) v += h.amplitude * std::cos(2.0 * std::numbers::pi * h.index * pct / 100.0 + h.phase);
    out[k] = v;
  }
  return out;
}

double phase_window(PhaseRegion region, double pct) {
  if (region == PhaseRegion::Both) return 1.0;
  double stance = 1.0;
  if (pct >= kStanceEnd + kTaperHalfWidth) {
    stance = 0.0;
  } else if (pct > kStanceEnd - kTaperHalfWidth) {
    const double u = (pct - (kStanceEnd - kTaperHalfWidth)) / (2.0 * kTaperHalfWidth);
    const double c = std::cos(0.5 * std::numbers::pi * u);
    stance = c * c;
  }
  return region == PhaseRegion::Stance ? stance : 1.0 - stance;
}

std::vector<Subject> generate(const SynthSpec& spec) {
  spec.validate();
  std::vector<Subject> subjects;
  subjects.reserve(spec.n_subjects * spec.classes.size());
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase_dist(0.0, 2.0 * std::numbers::pi);
  const std::array<Side, 2> sides = {Side::Right, Side::Left};

  for (std::size_t ci = 0; ci < spec.classes.size(); ++ci) {
    const auto& cls = spec.classes[ci];
    const auto& p = cls.perturbation;
    for (std::size_t si = 0; si < spec.n_subjects; ++si) {
      auto rng = subject_rng(spec.rng_seed, ci, si);
      // Random draws happen in a fixed order and count, independent of the
      // magnitudes, so a magnitude change never reshuffles the stream.
      std::array<double, kHfCount> hf_phase{};
      for (auto& ph : hf_phase) ph = phase_dist(rng);

      std::map<TrajectoryKey, GaitTrajectory> trajs;
      for (Joint joint : spec.joints) {
        const auto& base = spec.templates.at(joint);
        for (Side side : sides) {
          auto harmonics = base;
          for (auto& h : harmonics) h.amplitude += p.jitter_sd * gauss(rng);

          const double w = side_weight(side, p.asymmetry_gain);
          auto samples = harmonic_signal(harmonics, spec.grid_size, w * p.timing_shift);
          const double hf_amp = w * p.hf_amplitude / std::sqrt(static_cast<double>(kHfCount));
          for (std::size_t k = 0; k < samples.size(); ++k) {
            const double pct = static_cast<double>(k) * 100.0 / static_cast<double>(spec.grid_size - 1);
            double hf = 0.0;
            for (int h = 0; h < kHfCount; ++h) {
              hf += std::sin(2.0 * std::numbers::pi * (kHfFirstHarmonic + h) * pct / 100.0 + hf_phase[static_cast<std::size_t>(h)]);
            }
            samples[k] += hf_amp * phase_window(p.hf_phase_region, pct) * hf;
          }
          trajs.emplace(TrajectoryKey{joint, side}, GaitTrajectory(joint, side, std::move(samples)));
        }
      }
      char id[64];
      std::snprintf(id, sizeof id, "%s-%02zu", cls.label.str().c_str(), si + 1);
      subjects.emplace_back(id, cls.label, std::move(trajs));
    }
  }
  return subjects;
}

namespace presets {

// Amplitudes are calibrated so the classes separate on hip high-scale features
// while the within-class jitter stays clinically plausible.
constexpr double kSpasticHf = 5.0;
constexpr double kJitter = 1.5;
constexpr double kLateralGain = 8.0;
constexpr double kLateralHf = 10.0;

SynthSpec normal_vs_spastic(std::size_t n, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_subjects = n;
  spec.rng_seed = seed;
  PerturbationSpec normal;
  normal.jitter_sd = kJitter;
  PerturbationSpec spastic = normal;
  spastic.hf_amplitude = kSpasticHf;
  spastic.hf_phase_region = PhaseRegion::Stance;
  spec.classes = {{ClassLabel(ClassLabel::Kind::Normal), normal}, {ClassLabel(ClassLabel::Kind::CpDp), spastic}};
  return spec;
}

SynthSpec laterality(std::size_t n, std::uint64_t seed) {
  SynthSpec spec;
  spec.n_subjects = n;
  spec.rng_seed = seed;
  PerturbationSpec base;
  base.jitter_sd = kJitter;
  base.hf_amplitude = kLateralHf;
  base.hf_phase_region = PhaseRegion::Stance;
  auto left = base;
  left.asymmetry_gain = kLateralGain;
  auto right = base;
  right.asymmetry_gain = 1.0 / kLateralGain;
  spec.classes = {{ClassLabel(ClassLabel::Kind::CpDp), base},
                  {ClassLabel(ClassLabel::Kind::CpLh), left},
                  {ClassLabel(ClassLabel::Kind::CpRh), right}};
  return spec;
}

}  // namespace presets

}  // namespace gaitsom
