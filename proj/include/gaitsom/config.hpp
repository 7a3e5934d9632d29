#pragma once

#include "gaitsom/eval.hpp"
#include "gaitsom/features.hpp"
#include "gaitsom/som.hpp"
#include "gaitsom/synth.hpp"
#include "gaitsom/wavelet.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gaitsom {

/// Every tunable of a pipeline run. Loaded from a JSON document; missing keys
/// keep these defaults, unknown keys are rejected.
struct RunConfig {
  std::uint64_t seed = 1;
  std::optional<std::filesystem::path> input;
  std::optional<SynthSpec> synth;

  MorletParams morlet;
  double scale_min = 1.0;
  double scale_max = 25.0;
  std::size_t scale_count = 12;
  Boundary boundary = Boundary::ZeroPad;

  RegionSplit split;
  FeatureOptions features;
  std::vector<TrajectoryKey> parts = {{Joint::Hip, Side::Right}, {Joint::Hip, Side::Left}};

  MapShape map;
  TrainSchedule schedule;
  /// U-Matrix cluster threshold; the 60th height percentile when unset.
  std::optional<double> threshold;

  bool loocv = true;
  bool write_pgm = true;
  std::filesystem::path out_dir = "gaitsom-out";

  ScaleGrid scale_grid() const { return ScaleGrid::log_spaced(scale_min, scale_max, scale_count); }
  CwtOptions cwt_options() const { return {morlet, boundary}; }

  /// Applies `seed` to the synthetic generator and the training schedule.
  void apply_seed(std::uint64_t value);

  /// Checks every module's invariants; throws ArgumentError naming the field.
  void validate() const;
};

RunConfig parse_config(std::string_view json_text);
RunConfig load_config(const std::filesystem::path& path);
/// Fully resolved configuration as pretty-printed JSON.
std::string config_to_json(const RunConfig& config);

/// "hip-right" style keys.
TrajectoryKey parse_key(std::string_view text);

}  // namespace gaitsom
