#pragma once

#include "gaitsom/config.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace gaitsom {

/// Failure inside one pipeline stage; what() is prefixed with the stage name.
class StageError : public std::runtime_error {
public:
  StageError(std::string stage, const std::string& message)
      : std::runtime_error(stage + ": " + message), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

struct ScalogramRecord {
  std::string subject_id;
  ClassLabel label;
  Scalogram scalogram;
};

/// Writes `<dir>/<subject>_<joint>-<side>.csv` (+ .pgm) for the requested
/// trajectories, an `index.csv` and the shared cone-of-influence mask.
void write_scalograms(const std::filesystem::path& dir, std::span<const Subject> subjects,
                      std::span<const TrajectoryKey> keys, const ScaleGrid& grid, const CwtOptions& options, bool pgm);

/// Reads back a directory produced by write_scalograms().
std::vector<ScalogramRecord> read_scalograms(const std::filesystem::path& dir);

/// Per-subject feature vectors assembled from stored scalograms.
std::vector<LabeledFeatures> features_from_scalograms(std::span<const ScalogramRecord> records,
                                                      std::span<const TrajectoryKey> keys, const RegionSplit& split,
                                                      const FeatureOptions& options);

struct MapArtifacts {
  SomMap map;
  UMatrix umatrix;
  AttractionField field;
  ClusterAssignment clusters;
  LabeledMap labeled;
};

/// Trains on all vectors and derives U-Matrix, attraction field and clusters.
MapArtifacts train_and_analyse(std::span<const LabeledFeatures> data, MapShape shape, const TrainSchedule& schedule,
                               std::optional<double> threshold);

/// som.json, umatrix.csv/.pgm, attraction.csv, contours.csv, clusters.csv and
/// bmu.csv (one row per training vector).
void write_map_artifacts(const std::filesystem::path& dir, const MapArtifacts& artifacts,
                         std::span<const LabeledFeatures> data, bool pgm);

void write_report(const std::filesystem::path& dir, const EvalReport& report);

struct PipelineResult {
  std::size_t subjects = 0;
  std::size_t feature_dim = 0;
  int cluster_count = 0;
  std::optional<EvalReport> report;
  std::string summary;
};

/// ingest/synth -> cwt -> features -> train -> U-Matrix/attraction/clusters
/// -> LOOCV. Validates the whole config first. On a stage failure a FAILED
/// marker naming the stage is written to the output directory and StageError
/// is thrown.
PipelineResult run_pipeline(const RunConfig& config);

}  // namespace gaitsom
