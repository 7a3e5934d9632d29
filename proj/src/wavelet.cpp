#include "gaitsom/wavelet.hpp"

#include "gaitsom/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace gaitsom {
namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);

// Largest tap offset m with |m| * dt <= radius * s. The relative slack keeps
// offsets that sit exactly on the truncation edge.
std::ptrdiff_t support_half_width(double scale, double dt, double radius) {
  return static_cast<std::ptrdiff_t>(std::floor(radius * scale / dt * (1.0 + 1e-12)));
}

std::size_t wrap(std::ptrdiff_t idx, std::ptrdiff_t period) {
  const auto r = idx % period;
  return static_cast<std::size_t>(r < 0 ? r + period : r);
}

void check_signal(std::span<const double> signal) {
  if (signal.size() < 2) throw ArgumentError("cwt: signal needs at least 2 samples");
}

}  // namespace

void MorletParams::validate() const {
  if (!(nu0 > 0.8)) throw ArgumentError("morlet nu0 must exceed 0.8 (admissibility)");
  if (!(truncation_radius >= 3.0)) throw ArgumentError("morlet truncation radius must be at least 3");
}

std::complex<double> morlet(double t, const MorletParams& params) {
  const double envelope = kInvSqrt2Pi * std::exp(-0.5 * t * t);
  const double phase = 2.0 * std::numbers::pi * params.nu0 * t;
  return {envelope * std::cos(phase), envelope * std::sin(phase)};
}

ScaleGrid::ScaleGrid(std::vector<double> scales) : scales_(std::move(scales)) {
  if (scales_.empty()) throw ArgumentError("scale grid is empty");
  for (std::size_t i = 0; i < scales_.size(); ++i) {
    if (!std::isfinite(scales_[i]) || scales_[i] <= 0.0) throw ArgumentError("scales must be finite and positive");
    if (i > 0 && !(scales_[i] > scales_[i - 1])) throw ArgumentError("scales must be strictly increasing");
  }
}

ScaleGrid ScaleGrid::log_spaced(double min, double max, std::size_t count) {
  if (count == 0) throw ArgumentError("scale count must be positive");
  if (!(min > 0.0) || !(max >= min)) throw ArgumentError("scale range must satisfy 0 < min <= max");
  if (count == 1) return ScaleGrid({min});
  if (!(max > min)) throw ArgumentError("scale range is empty");
  std::vector<double> s(count);
  const double ratio = std::log(max / min);
  for (std::size_t i = 0; i < count; ++i) {
    s[i] = min * std::exp(ratio * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  s.front() = min;
  s.back() = max;
  return ScaleGrid(std::move(s));
}

std::size_t ScaleGrid::nearest(double s) const {
  std::size_t best = 0;
  double best_dist = std::abs(std::log(s / scales_[0]));
  for (std::size_t i = 1; i < scales_.size(); ++i) {
    const double d = std::abs(std::log(s / scales_[i]));
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  return best;
}

bool Scalogram::in_cone_of_influence(std::size_t row, std::size_t col) const {
  const double reach = std::numbers::sqrt2 * scales[row];
  const double t = time_axis[col];
  return t < reach || 100.0 - t < reach;
}

Matrix Scalogram::cone_of_influence_mask() const {
  Matrix mask(values.rows, values.cols);
  for (std::size_t r = 0; r < mask.rows; ++r) {
    for (std::size_t c = 0; c < mask.cols; ++c) mask(r, c) = in_cone_of_influence(r, c) ? 1.0 : 0.0;
  }
  return mask;
}

void cwt_row(std::span<const double> signal, double scale, const CwtOptions& options, std::span<double> out) {
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const double dt = 100.0 / static_cast<double>(n - 1);
  const auto half = support_half_width(scale, dt, options.morlet.truncation_radius);

  // Conjugated, scaled taps: conj(psi(m dt / s)) for m = -half..half.
  std::vector<std::complex<double>> taps(static_cast<std::size_t>(2 * half + 1));
  for (std::ptrdiff_t m = -half; m <= half; ++m) {
    taps[static_cast<std::size_t>(m + half)] = std::conj(morlet(static_cast<double>(m) * dt / scale, options.morlet));
  }
  const double norm = dt / std::sqrt(scale);
  const std::ptrdiff_t period = n - 1;

  for (std::ptrdiff_t j = 0; j < n; ++j) {
    double re = 0.0;
    double im = 0.0;
    for (std::ptrdiff_t m = -half; m <= half; ++m) {
      const std::ptrdiff_t k = j + m;
      double x = 0.0;
      if (options.boundary == Boundary::Periodic) {
        x = signal[wrap(k, period)];
      } else if (k >= 0 && k < n) {
        x = signal[static_cast<std::size_t>(k)];
      } else {
        continue;
      }
      const auto& c = taps[static_cast<std::size_t>(m + half)];
      re += x * c.real();
      im += x * c.imag();
    }
    out[static_cast<std::size_t>(j)] = norm * std::hypot(re, im);
  }
}

Matrix cwt_samples(std::span<const double> signal, const ScaleGrid& grid, const CwtOptions& options) {
  options.morlet.validate();
  check_signal(signal);
  Matrix result(grid.size(), signal.size());
  const auto rows = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t r = rows - 1; r >= 0; --r) {
    const auto row = static_cast<std::size_t>(r);
    cwt_row(signal, grid[row], options, std::span<double>(result.data.data() + row * result.cols, result.cols));
  }
  return result;
}

Scalogram cwt(const GaitTrajectory& traj, const ScaleGrid& grid, const CwtOptions& options) {
  Scalogram sc;
  sc.values = cwt_samples(traj.samples(), grid, options);
  sc.time_axis.resize(traj.grid_size());
  for (std::size_t k = 0; k < traj.grid_size(); ++k) sc.time_axis[k] = traj.pct_at(k);
  sc.scales = grid;
  sc.key = traj.key();
  return sc;
}

namespace reference {

Matrix cwt_samples(std::span<const double> signal, const ScaleGrid& grid, const CwtOptions& options) {
  options.morlet.validate();
  check_signal(signal);
  const auto n = static_cast<std::ptrdiff_t>(signal.size());
  const double dt = 100.0 / static_cast<double>(n - 1);
  Matrix result(grid.size(), signal.size());
  for (std::size_t r = 0; r < grid.size(); ++r) {
    const double s = grid[r];
    const double reach = options.morlet.truncation_radius * s * (1.0 + 1e-12);
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double tau = static_cast<double>(j) * dt;
      std::complex<double> acc = 0.0;
      // Walk every grid point whose distance to tau is inside the support,
      // including periodic images beyond the cycle ends.
      const auto first = static_cast<std::ptrdiff_t>(std::floor((tau - reach) / dt)) - 1;
      const auto last = static_cast<std::ptrdiff_t>(std::ceil((tau + reach) / dt)) + 1;
      for (std::ptrdiff_t k = first; k <= last; ++k) {
        if (static_cast<double>(std::abs(k - j)) * dt > reach) continue;
        double x = 0.0;
        if (options.boundary == Boundary::Periodic) {
          x = signal[wrap(k, n - 1)];
        } else if (k >= 0 && k < n) {
          x = signal[static_cast<std::size_t>(k)];
        } else {
          continue;
        }
        const double t = static_cast<double>(k) * dt;
        acc += x * std::conj(morlet((t - tau) / s, options.morlet));
      }
      result(r, static_cast<std::size_t>(j)) = std::abs(acc * dt / std::sqrt(s));
    }
  }
  return result;
}

}  // namespace reference

void write_scalogram_csv(std::ostream& out, const Scalogram& sc) {
  out << "scale";
  for (double t : sc.time_axis) out << ',' << format_double(t);
  out << '\n';
  for (std::size_t r = 0; r < sc.values.rows; ++r) {
    out << format_double(sc.scales[r]);
    for (std::size_t c = 0; c < sc.values.cols; ++c) out << ',' << format_double(sc.values(r, c));
    out << '\n';
  }
}

void write_scalogram_csv(const std::filesystem::path& path, const Scalogram& sc) {
  std::ostringstream ss;
  write_scalogram_csv(ss, sc);
  write_text_file(path, ss.str());
}

Scalogram read_scalogram_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("empty scalogram file");
  auto header = split_csv_line(line);
  if (header.size() < 2 || header[0] != "scale") throw ParseError("scalogram header must start with 'scale'", 1);
  Scalogram sc;
  for (std::size_t i = 1; i < header.size(); ++i) {
    auto v = parse_double(header[i]);
    if (!v) throw ParseError("bad time axis value", 1);
    sc.time_axis.push_back(*v);
  }
  std::vector<double> scales;
  std::vector<double> values;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != header.size()) throw ParseError("wrong field count", row);
    for (std::size_t i = 0; i < f.size(); ++i) {
      auto v = parse_double(f[i]);
      if (!v || !std::isfinite(*v) || (i > 0 && *v < 0.0)) throw ParseError("bad value '" + std::string(f[i]) + "'", row);
      (i == 0 ? scales : values).push_back(*v);
    }
  }
  sc.scales = ScaleGrid(std::move(scales));
  sc.values.rows = sc.scales.size();
  sc.values.cols = sc.time_axis.size();
  sc.values.data = std::move(values);
  return sc;
}

Scalogram read_scalogram_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return read_scalogram_csv(in);
}

}  // namespace gaitsom
