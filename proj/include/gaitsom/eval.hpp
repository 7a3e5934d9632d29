#pragma once

#include "gaitsom/features.hpp"
#include "gaitsom/gait_data.hpp"
#include "gaitsom/som.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaitsom {

struct LabeledMap {
  SomMap map;
  /// Label of every node after inheritance; empty nodes take the label of the
  /// nearest node that was hit.
  std::vector<ClassLabel> node_labels;
  /// Training vectors whose best match is the node.
  std::vector<std::size_t> hits;
  ClusterAssignment node_clusters;
  /// Majority label per non-border cluster that received training vectors.
  std::map<int, ClassLabel> cluster_labels;
};

/// Majority vote per node (ties to the lowest class), empty nodes inherit from
/// the nearest hit node in grid distance (ties to the lowest index).
LabeledMap label_map(const SomMap& map, std::span<const LabeledFeatures> training);

/// Label of the best-matching node.
ClassLabel classify(const LabeledMap& lm, std::span<const double> x);

/// Count matrix, rows = true class, columns = predicted class.
using Confusion = std::vector<std::vector<std::int64_t>>;

/// Cohen's kappa (p_o - p_e) / (1 - p_e), evaluated from integer counts so
/// that rational inputs give the correctly rounded result.
double kappa(const Confusion& confusion);

struct FoldRecord {
  std::string held_out;
  ClassLabel truth;
  ClassLabel predicted;
};

struct EvalReport {
  std::vector<ClassLabel> classes;
  Confusion confusion;
  std::size_t correct = 0;
  double recognition_rate = 0.0;
  /// Population std-dev of the per-fold 0/1 outcomes.
  double rate_dispersion = 0.0;
  /// NaN when only one class was observed (chance agreement is 1).
  double kappa = 0.0;
  std::vector<FoldRecord> folds;
};

/// Builds confusion, rate, dispersion and kappa from per-sample records.
EvalReport summarize(std::vector<FoldRecord> records);

struct MapShape {
  std::size_t rows = 10;
  std::size_t cols = 10;
};

/// Leave-one-out: fold i trains a fresh map on the other N - 1 vectors with
/// seed schedule.rng_seed + i and classifies vector i. Folds run in parallel;
/// the report does not depend on completion order.
EvalReport loocv(std::span<const LabeledFeatures> data, MapShape shape, const TrainSchedule& schedule);

/// Classifies an independent test set with an already labeled map.
EvalReport evaluate(const LabeledMap& lm, std::span<const LabeledFeatures> test);

std::string report_to_json(const EvalReport& report);
void write_report_table(std::ostream& out, const EvalReport& report);
void write_confusion_csv(std::ostream& out, const EvalReport& report);

/// Training-set vectors as plain arrays.
std::vector<std::vector<double>> feature_values(std::span<const LabeledFeatures> data);

namespace reference {

/// Serial fold loop.
EvalReport loocv(std::span<const LabeledFeatures> data, MapShape shape, const TrainSchedule& schedule);

}  // namespace reference

}  // namespace gaitsom
