#pragma once

#include "gaitsom/gait_data.hpp"
#include "gaitsom/text_io.hpp"

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace gaitsom {

/// Morlet mother wavelet parameters. The transform is admissible for nu0 > 0.8.
struct MorletParams {
  double nu0 = 1.0;
  /// Half-width of the wavelet support, in scaled Gaussian standard deviations.
  double truncation_radius = 5.0;

  void validate() const;
};

/// Gaussian-windowed complex sinusoid:
/// (1/sqrt(2 pi)) exp(-t^2/2) (cos(2 pi nu0 t) + i sin(2 pi nu0 t)).
std::complex<double> morlet(double t, const MorletParams& params = {});

/// Scales in units of the cycle-percentage axis.
class ScaleGrid {
public:
  explicit ScaleGrid(std::vector<double> scales);

  /// `count` log-spaced scales from `min` to `max` inclusive.
  static ScaleGrid log_spaced(double min, double max, std::size_t count);
  /// 12 log-spaced scales over [1, 25].
  static ScaleGrid canonical() { return log_spaced(1.0, 25.0, 12); }

  std::span<const double> values() const noexcept { return scales_; }
  std::size_t size() const noexcept { return scales_.size(); }
  double operator[](std::size_t i) const { return scales_[i]; }

  /// Index of the grid scale nearest to `s` in log distance.
  std::size_t nearest(double s) const;

  friend bool operator==(const ScaleGrid&, const ScaleGrid&) = default;

private:
  std::vector<double> scales_;
};

/// How the signal is extended outside [0, 100]%.
enum class Boundary { ZeroPad, Periodic };

struct CwtOptions {
  MorletParams morlet;
  Boundary boundary = Boundary::ZeroPad;
};

/// |CWT| over (scale x cycle percentage). Row i belongs to scale i of the
/// grid, column j to time_axis[j].
struct Scalogram {
  Matrix values;
  std::vector<double> time_axis;
  ScaleGrid scales = ScaleGrid({1.0});
  TrajectoryKey key;

  std::size_t scale_count() const noexcept { return values.rows; }
  std::size_t time_count() const noexcept { return values.cols; }

  /// True when (row, col) lies within sqrt(2) * s of either end of the cycle,
  /// the region where boundary handling influences the coefficient.
  bool in_cone_of_influence(std::size_t row, std::size_t col) const;
  Matrix cone_of_influence_mask() const;
};

/// Direct-convolution CWT of one trajectory, rectangle rule on the trajectory
/// grid. Scales are computed in parallel (OpenMP); rows are independent, so
/// the result is bit-identical for any thread count.
Scalogram cwt(const GaitTrajectory& traj, const ScaleGrid& grid, const CwtOptions& options = {});

/// Same transform on raw uniformly sampled values spanning 0..100%.
Matrix cwt_samples(std::span<const double> signal, const ScaleGrid& grid, const CwtOptions& options = {});

/// Scale-row kernel: writes |W(s, tau_j)| for every grid point into `out`.
void cwt_row(std::span<const double> signal, double scale, const CwtOptions& options, std::span<double> out);

void write_scalogram_csv(std::ostream& out, const Scalogram& sc);
void write_scalogram_csv(const std::filesystem::path& path, const Scalogram& sc);
/// Reads the matrix written by write_scalogram_csv(); key is left default.
Scalogram read_scalogram_csv(std::istream& in);
Scalogram read_scalogram_csv(const std::filesystem::path& path);

namespace reference {

/// Serial textbook evaluation of the discretized transform, one morlet() call
/// per (scale, tau, t_k) triple. Kept for testing the parallel kernel.
Matrix cwt_samples(std::span<const double> signal, const ScaleGrid& grid, const CwtOptions& options = {});

}  // namespace reference

}  // namespace gaitsom
