#pragma once

#include "gaitsom/gait_data.hpp"

#include <cstdint>
#include <map>
#include <vector>

namespace gaitsom {

/// amplitude * cos(2 pi * index * pct / 100 + phase); index 0 is a constant offset.
struct Harmonic {
  int index = 0;
  double amplitude = 0.0;
  double phase = 0.0;

  friend bool operator==(const Harmonic&, const Harmonic&) = default;
};

enum class PhaseRegion { Stance, Swing, Both };

/// Harmonics 10..20 carry the added high-frequency component.
inline constexpr int kHfFirstHarmonic = 10;
inline constexpr int kHfLastHarmonic = 20;
inline constexpr int kMaxTemplateHarmonic = 15;

struct PerturbationSpec {
  /// Amplitude in degrees of the high-frequency component (before left/right weighting).
  double hf_amplitude = 0.0;
  PhaseRegion hf_phase_region = PhaseRegion::Stance;
  /// Left/right ratio of the perturbation; 1 is symmetric.
  double asymmetry_gain = 1.0;
  /// Percent of cycle by which the template is delayed.
  double timing_shift = 0.0;
  /// Std-dev (degrees) of the per-subject Gaussian jitter on each template harmonic amplitude.
  double jitter_sd = 0.0;

  void validate() const;
  friend bool operator==(const PerturbationSpec&, const PerturbationSpec&) = default;
};

struct ClassSpec {
  ClassLabel label;
  PerturbationSpec perturbation;

  friend bool operator==(const ClassSpec&, const ClassSpec&) = default;
};

struct SynthSpec {
  /// Subjects generated per class.
  std::size_t n_subjects = 10;
  std::map<Joint, std::vector<Harmonic>> templates = default_templates();
  std::vector<ClassSpec> classes = {ClassSpec{ClassLabel(ClassLabel::Kind::Normal), {}}};
  std::vector<Joint> joints = {Joint::Hip, Joint::Knee, Joint::Ankle};
  std::uint64_t rng_seed = 1;
  std::size_t grid_size = kCanonicalGridSize;

  /// Hip: 30 deg first harmonic plus a small second; knee: harmonics 0..3
  /// with a ~60 deg swing flexion peak; ankle: harmonics 0..4.
  static std::map<Joint, std::vector<Harmonic>> default_templates();

  void validate() const;
  friend bool operator==(const SynthSpec&, const SynthSpec&) = default;
};

/// Sum of harmonics evaluated at pct - shift on a uniform grid.
std::vector<double> harmonic_signal(const std::vector<Harmonic>& harmonics, std::size_t grid_size, double shift_pct = 0.0);

/// Smooth 0..1 weight selecting a phase of the cycle (raised-cosine edges
/// 5% wide centred on the 60% stance/swing boundary).
double phase_window(PhaseRegion region, double pct);

/// Deterministic in `spec`: subjects are ordered by class, then index, and
/// named "<label>-<nn>". Each subject carries both sides of every joint.
std::vector<Subject> generate(const SynthSpec& spec);

namespace presets {

/// Normal subjects against CP-dp subjects carrying stance-phase high-frequency
/// content (spasticity-like), `n` per class.
SynthSpec normal_vs_spastic(std::size_t n, std::uint64_t seed);

/// Left-hemiplegic (perturbation mostly on the left), right-hemiplegic and
/// symmetric diplegic classes, `n` per class.
SynthSpec laterality(std::size_t n, std::uint64_t seed);

}  // namespace presets

}  // namespace gaitsom
