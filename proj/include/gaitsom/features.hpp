#pragma once

#include "gaitsom/gait_data.hpp"
#include "gaitsom/wavelet.hpp"

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaitsom {

/// HighScale = low-frequency content, LowScale = high-frequency content.
enum class ScaleLevel { HighScale, LowScale };

std::string_view to_string(ScaleLevel level);
ScaleLevel parse_level(std::string_view text);

struct RegionSplit {
  double stance_fraction = 0.60;
  ScaleLevel level = ScaleLevel::HighScale;
  /// First row of the high-scale half when tiling into regions; rows / 2 when unset.
  std::optional<std::size_t> scale_split;

  void validate() const;
};

/// Regions are numbered (1) stance/low, (2) swing/low, (3) swing/high, (4) stance/high.
struct Region {
  int id = 0;
  std::size_t row_begin = 0, row_end = 0;
  std::size_t col_begin = 0, col_end = 0;
  Matrix values;
};

/// Tiles the scalogram into four disjoint regions. Stance holds every column
/// at or before stance_fraction * 100%; with 12 scales the low-scale rows are 0..5.
std::array<Region, 4> split_regions(const Scalogram& sc, const RegionSplit& split);

struct FeatureOptions {
  std::size_t time_samples = 20;
  double time_step_pct = 5.0;
  /// Scales per level: the largest `level_size` for HighScale, the smallest for LowScale.
  std::size_t level_size = 8;
  /// Per-vector z-scoring, applied to the final (combined) vector.
  bool normalize = false;

  void validate() const;
};

struct FeatureVector {
  std::vector<double> values;
  std::string subject_id;
  std::vector<TrajectoryKey> parts;
  ScaleLevel level = ScaleLevel::HighScale;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct LabeledFeatures {
  FeatureVector features;
  ClassLabel label;
};

/// Samples the scalogram at 0, 5, ..., 95% and at the level's scales, time-major
/// (t1 s1..s8, t2 s1..s8, ...), scales ascending within a block.
FeatureVector extract_features(const Scalogram& sc, const RegionSplit& split, const FeatureOptions& options = {});

/// Hip-right, hip-left, knee-right, knee-left, ankle-right, ankle-left.
std::vector<TrajectoryKey> declared_order();

/// Concatenates single-trajectory vectors in declared order.
FeatureVector combine_joints(std::span<const FeatureVector> parts, std::span<const TrajectoryKey> order);
FeatureVector combine_joints(std::span<const FeatureVector> parts);

/// In-place z-score; a constant vector becomes all zeros.
void zscore(FeatureVector& fv);

/// CWT + extraction + combination for one subject.
FeatureVector subject_features(const Subject& subject, std::span<const TrajectoryKey> keys, const ScaleGrid& grid,
                               const CwtOptions& cwt_options, const RegionSplit& split, const FeatureOptions& options);

/// Whole-dataset extraction; subjects are processed in parallel, output order matches input.
std::vector<LabeledFeatures> dataset_features(std::span<const Subject> subjects, std::span<const TrajectoryKey> keys,
                                              const ScaleGrid& grid, const CwtOptions& cwt_options,
                                              const RegionSplit& split, const FeatureOptions& options);

/// Feature matrix: a `# n_time=..,n_scale=..,level=..,parts=..` line, a column
/// header, then one `subject_id,label,f...` row per vector.
void write_feature_csv(std::ostream& out, std::span<const LabeledFeatures> rows, const FeatureOptions& options);
void write_feature_csv(const std::filesystem::path& path, std::span<const LabeledFeatures> rows, const FeatureOptions& options);
std::vector<LabeledFeatures> read_feature_csv(std::istream& in);
std::vector<LabeledFeatures> read_feature_csv(const std::filesystem::path& path);

}  // namespace gaitsom
