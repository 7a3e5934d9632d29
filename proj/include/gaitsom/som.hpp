#pragma once

#include "gaitsom/text_io.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaitsom {

enum class Kernel { Gaussian, Bubble };
enum class InitMethod { RandomSmall, SampleInit };
enum class Metric { Euclidean, Manhattan };
enum class Decay { Linear, Constant };

/// Learning rate alpha(t) and neighbourhood radius sigma(t) over epochs
/// t = 0..epochs-1. Their product with the kernel value is the per-node
/// update factor, which shrinks toward zero as training proceeds.
struct TrainSchedule {
  std::size_t epochs = 200;
  double alpha0 = 0.5;
  Decay alpha_decay = Decay::Linear;
  /// Starting radius; max(rows, cols) / 2 when unset.
  std::optional<double> sigma0;
  double sigma_final = 0.25;
  Decay sigma_decay = Decay::Linear;
  Kernel kernel = Kernel::Gaussian;
  InitMethod init = InitMethod::RandomSmall;
  Metric metric = Metric::Euclidean;
  std::uint64_t rng_seed = 1;

  /// Linear: alpha0 * (1 - t / epochs).
  double alpha(std::size_t epoch) const;
  /// Linear: from sigma0 at t = 0 to sigma_final at t = epochs - 1.
  double sigma(std::size_t epoch, std::size_t rows, std::size_t cols) const;
  void validate(std::size_t rows, std::size_t cols) const;

  friend bool operator==(const TrainSchedule&, const TrainSchedule&) = default;
};

/// Rectangular map; node i sits at (i / cols, i % cols). At least two nodes.
class SomMap {
public:
  SomMap(std::size_t rows, std::size_t cols, std::size_t dim, TrainSchedule schedule = {});

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t nodes() const noexcept { return rows_ * cols_; }
  std::size_t dim() const noexcept { return dim_; }
  bool trained() const noexcept { return trained_; }
  const TrainSchedule& schedule() const noexcept { return schedule_; }

  std::span<const double> weight(std::size_t node) const { return weights_.row(node); }
  std::span<double> weight(std::size_t node) { return {weights_.data.data() + node * dim_, dim_}; }
  const Matrix& weights() const noexcept { return weights_; }
  Matrix& weights() noexcept { return weights_; }

  void set_trained(bool trained) noexcept { trained_ = trained; }
  double grid_distance(std::size_t a, std::size_t b) const;

  friend bool operator==(const SomMap&, const SomMap&) = default;

private:
  std::size_t rows_;
  std::size_t cols_;
  std::size_t dim_;
  Matrix weights_;
  bool trained_ = false;
  TrainSchedule schedule_;
};

/// RandomSmall: uniform in [-eps, eps] per dimension, eps = 0.01 * data range
/// (0.01 without samples). SampleInit: samples drawn without replacement, or
/// with replacement when there are fewer samples than nodes.
SomMap init_map(std::size_t rows, std::size_t cols, std::size_t dim, const TrainSchedule& schedule,
                std::span<const std::vector<double>> samples = {});

double distance(std::span<const double> a, std::span<const double> b, Metric metric = Metric::Euclidean);

struct BestMatch {
  std::size_t node = 0;
  double distance = 0.0;
};

/// Nearest node; ties go to the lowest row-major index.
BestMatch best_match(const SomMap& map, std::span<const double> x);

/// Kernel value for a node at grid distance `d` from the winner.
double neighbourhood(Kernel kernel, double d, double sigma);

/// Runs the schedule on `map`'s current weights. Each epoch presents every
/// vector once in a seeded shuffled order. The per-node work (distances and
/// updates) runs under OpenMP for large maps; presentation order is serial,
/// so the result is bit-identical to reference::train().
SomMap train(SomMap map, std::span<const std::vector<double>> data);

/// Mean distance from each vector to its best-matching weight.
double quantization_error(const SomMap& map, std::span<const std::vector<double>> data);

struct UMatrix {
  Matrix heights;
  double threshold = 0.0;
};

/// Linear-interpolated percentile (q in [0, 100]).
double percentile(std::span<const double> values, double q);

inline constexpr double kDefaultThresholdPercentile = 60.0;

/// Mean distance of every node to its 4-neighbours; the threshold defaults to
/// the 60th percentile of the heights.
UMatrix umatrix(const SomMap& map);

struct AttractionField {
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Column-direction and row-direction components, row-major per node.
  std::vector<double> dx;
  std::vector<double> dy;
  std::vector<double> contour_levels;
};

/// Negative discrete gradient of the heights (central differences, one-sided
/// at borders) plus `levels` contour heights at evenly spaced quantiles.
AttractionField attraction_field(const UMatrix& um, std::size_t levels = 10);

struct ClusterAssignment {
  static constexpr int kBorder = -1;
  std::vector<int> ids;
  int count = 0;
};

/// 4-connected components of nodes with height below `threshold`; the rest
/// are border nodes. Component ids follow row-major order of first node.
ClusterAssignment clusters(const UMatrix& um, double threshold);
ClusterAssignment clusters(const UMatrix& um);

std::string map_to_json(const SomMap& map);
SomMap map_from_json(std::string_view text);
void save_map(const std::filesystem::path& path, const SomMap& map);
SomMap load_map(const std::filesystem::path& path);

void write_matrix_csv(std::ostream& out, const Matrix& m);
void write_attraction_csv(std::ostream& out, const AttractionField& field);
void write_clusters_csv(std::ostream& out, const ClusterAssignment& assignment, std::size_t cols);

namespace reference {

/// Straight serial loops over nodes; same arithmetic as the parallel path.
SomMap train(SomMap map, std::span<const std::vector<double>> data);
BestMatch best_match(const SomMap& map, std::span<const double> x);

}  // namespace reference

}  // namespace gaitsom
