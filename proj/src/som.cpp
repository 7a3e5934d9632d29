#include "gaitsom/som.hpp"

#include "gaitsom/error.hpp"
#include "json_io.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>

namespace gaitsom {
namespace {

// Below this many weight entries the per-presentation work is too small to
// be worth a parallel region.
constexpr std::size_t kParallelWork = std::size_t{1} << 13;

std::mt19937_64 stream(std::uint64_t seed, std::uint32_t id) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), id};
  return std::mt19937_64(seq);
}

// Squared Euclidean or plain Manhattan; both preserve the argmin.
double match_score(std::span<const double> a, std::span<const double> b, Metric metric) {
  double acc = 0.0;
  if (metric == Metric::Euclidean) {
#pragma omp simd reduction(+ : acc)
    for (std::size_t k = 0; k < a.size(); ++k) {
      const double d = a[k] - b[k];
      acc += d * d;
    }
  } else {
#pragma omp simd reduction(+ : acc)
    for (std::size_t k = 0; k < a.size(); ++k) acc += std::abs(a[k] - b[k]);
  }
  return acc;
}

double score_to_distance(double score, Metric metric) { return metric == Metric::Euclidean ? std::sqrt(score) : score; }

void check_data(const SomMap& map, std::span<const std::vector<double>> data) {
  if (data.empty()) throw ArgumentError("train: empty training set");
  for (const auto& x : data) {
    if (x.size() != map.dim()) throw ArgumentError("train: vector dimension does not match the map");
  }
}

void update_node(std::span<double> w, std::span<const double> x, double factor) {
  // Exact at factor == 1; the clamp keeps rounding from leaving the segment [w, x].
  if (factor == 1.0) {
    std::copy(x.begin(), x.end(), w.begin());
    return;
  }
  double* __restrict wp = w.data();
  const double* __restrict xp = x.data();
#pragma omp simd
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double a = wp[k], b = xp[k];
    const double v = a + factor * (b - a);
    wp[k] = std::min(std::max(v, std::min(a, b)), std::max(a, b));
  }
}

}  // namespace

double TrainSchedule::alpha(std::size_t epoch) const {
  if (alpha_decay == Decay::Constant) return alpha0;
  return alpha0 * (1.0 - static_cast<double>(epoch) / static_cast<double>(epochs));
}

double TrainSchedule::sigma(std::size_t epoch, std::size_t rows, std::size_t cols) const {
  const double start = sigma0.value_or(static_cast<double>(std::max(rows, cols)) / 2.0);
  if (sigma_decay == Decay::Constant || epochs < 2) return start;
  const double frac = static_cast<double>(epoch) / static_cast<double>(epochs - 1);
  return start + (sigma_final - start) * frac;
}

void TrainSchedule::validate(std::size_t rows, std::size_t cols) const {
  if (epochs == 0) throw ArgumentError("schedule: epochs must be positive");
  if (!(alpha0 >= 0.0 && alpha0 <= 1.0)) throw ArgumentError("schedule: alpha0 must be in [0, 1]");
  const double s0 = sigma0.value_or(static_cast<double>(std::max(rows, cols)) / 2.0);
  const double s1 = sigma_decay == Decay::Constant ? s0 : sigma_final;
  if (!std::isfinite(s0) || !std::isfinite(s1) || s0 < 0.0 || s1 < 0.0) throw ArgumentError("schedule: sigma must be finite and non-negative");
  if (s1 > s0) throw ArgumentError("schedule: sigma must not increase");
  if (kernel == Kernel::Gaussian && !(s1 > 0.0)) throw ArgumentError("schedule: Gaussian kernel needs sigma > 0");
}

SomMap::SomMap(std::size_t rows, std::size_t cols, std::size_t dim, TrainSchedule schedule)
    : rows_(rows), cols_(cols), dim_(dim), weights_(rows * cols, dim), schedule_(std::move(schedule)) {
  if (rows == 0 || cols == 0 || rows * cols < 2) throw ArgumentError("map needs at least 2 nodes");
  if (dim == 0) throw ArgumentError("map dimension must be positive");
  schedule_.validate(rows, cols);
}

double SomMap::grid_distance(std::size_t a, std::size_t b) const {
  const double dr = static_cast<double>(a / cols_) - static_cast<double>(b / cols_);
  const double dc = static_cast<double>(a % cols_) - static_cast<double>(b % cols_);
  return std::sqrt(dr * dr + dc * dc);
}

SomMap init_map(std::size_t rows, std::size_t cols, std::size_t dim, const TrainSchedule& schedule,
                std::span<const std::vector<double>> samples) {
  SomMap map(rows, cols, dim, schedule);
  for (const auto& x : samples) {
    if (x.size() != dim) throw ArgumentError("init: sample dimension does not match the map");
  }
  auto rng = stream(schedule.rng_seed, 0);
  const std::size_t nodes = map.nodes();

  if (schedule.init == InitMethod::SampleInit) {
    if (samples.empty()) throw ArgumentError("init: SampleInit needs a non-empty sample set");
    std::vector<std::size_t> pick(nodes);
    if (samples.size() >= nodes) {
      std::vector<std::size_t> perm(samples.size());
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      std::copy_n(perm.begin(), nodes, pick.begin());
    } else {
      std::uniform_int_distribution<std::size_t> any(0, samples.size() - 1);
      for (auto& p : pick) p = any(rng);
    }
    for (std::size_t i = 0; i < nodes; ++i) std::copy(samples[pick[i]].begin(), samples[pick[i]].end(), map.weight(i).begin());
    return map;
  }

  std::vector<double> eps(dim, 0.01);
  if (!samples.empty()) {
    for (std::size_t k = 0; k < dim; ++k) {
      auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(), [k](const auto& a, const auto& b) { return a[k] < b[k]; });
      eps[k] = 0.01 * ((*hi)[k] - (*lo)[k]);
    }
  }
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (std::size_t i = 0; i < nodes; ++i) {
    auto w = map.weight(i);
    for (std::size_t k = 0; k < dim; ++k) w[k] = eps[k] * unit(rng);
  }
  return map;
}

double distance(std::span<const double> a, std::span<const double> b, Metric metric) {
  if (a.size() != b.size()) throw ArgumentError("distance: dimension mismatch");
  return score_to_distance(match_score(a, b, metric), metric);
}

double neighbourhood(Kernel kernel, double d, double sigma) {
  if (kernel == Kernel::Bubble) return d <= sigma ? 1.0 : 0.0;
  return std::exp(-(d * d) / (2.0 * sigma * sigma));
}

BestMatch best_match(const SomMap& map, std::span<const double> x) {
  if (x.size() != map.dim()) throw ArgumentError("best_match: dimension mismatch");
  const auto metric = map.schedule().metric;
  const auto nodes = static_cast<std::ptrdiff_t>(map.nodes());
  std::vector<double> score(map.nodes());
  const bool parallel = map.nodes() * map.dim() >= kParallelWork && !omp_in_parallel();
#pragma omp parallel for if (parallel)
  for (std::ptrdiff_t i = 0; i < nodes; ++i) {
    score[static_cast<std::size_t>(i)] = match_score(x, map.weight(static_cast<std::size_t>(i)), metric);
  }
  const auto best = static_cast<std::size_t>(std::min_element(score.begin(), score.end()) - score.begin());
  return {best, score_to_distance(score[best], metric)};
}

SomMap train(SomMap map, std::span<const std::vector<double>> data) {
  check_data(map, data);
  const auto& sched = map.schedule();
  auto rng = stream(sched.rng_seed, 1);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);

  const std::size_t nodes = map.nodes();
  std::vector<double> score(nodes);
  const bool parallel = nodes * map.dim() >= kParallelWork && !omp_in_parallel();

  for (std::size_t epoch = 0; epoch < sched.epochs; ++epoch) {
    const double alpha = sched.alpha(epoch);
    const double sigma = sched.sigma(epoch, map.rows(), map.cols());
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const std::span<const double> x = data[idx];
      std::size_t winner = 0;
#pragma omp parallel if (parallel)
      {
#pragma omp for
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes); ++i) {
          score[static_cast<std::size_t>(i)] = match_score(x, map.weight(static_cast<std::size_t>(i)), sched.metric);
        }
#pragma omp single
        winner = static_cast<std::size_t>(std::min_element(score.begin(), score.end()) - score.begin());
#pragma omp for
        for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(nodes); ++i) {
          const auto node = static_cast<std::size_t>(i);
          const double factor = alpha * neighbourhood(sched.kernel, map.grid_distance(node, winner), sigma);
          if (factor > 0.0) update_node(map.weight(node), x, factor);
        }
      }
    }
  }
  map.set_trained(true);
  return map;
}

namespace reference {

BestMatch best_match(const SomMap& map, std::span<const double> x) {
  if (x.size() != map.dim()) throw ArgumentError("best_match: dimension mismatch");
  const auto metric = map.schedule().metric;
  BestMatch best{0, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < map.nodes(); ++i) {
    const double s = match_score(x, map.weight(i), metric);
    if (s < best.distance) best = {i, s};
  }
  best.distance = score_to_distance(best.distance, metric);
  return best;
}

SomMap train(SomMap map, std::span<const std::vector<double>> data) {
  check_data(map, data);
  const auto& sched = map.schedule();
  auto rng = stream(sched.rng_seed, 1);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t epoch = 0; epoch < sched.epochs; ++epoch) {
    const double alpha = sched.alpha(epoch);
    const double sigma = sched.sigma(epoch, map.rows(), map.cols());
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t idx : order) {
      const auto& x = data[idx];
      const std::size_t winner = reference::best_match(map, x).node;
      for (std::size_t node = 0; node < map.nodes(); ++node) {
        const double factor = alpha * neighbourhood(sched.kernel, map.grid_distance(node, winner), sigma);
        if (factor > 0.0) update_node(map.weight(node), x, factor);
      }
    }
  }
  map.set_trained(true);
  return map;
}

}  // namespace reference

double quantization_error(const SomMap& map, std::span<const std::vector<double>> data) {
  if (data.empty()) throw ArgumentError("quantization_error: empty data");
  double total = 0.0;
  for (const auto& x : data) total += best_match(map, x).distance;
  return total / static_cast<double>(data.size());
}

double percentile(std::span<const double> values, double q) {
  if (values.empty()) throw ArgumentError("percentile of an empty set");
  if (!(q >= 0.0 && q <= 100.0)) throw ArgumentError("percentile must be in [0, 100]");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const double pos = q / 100.0 * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  return std::lerp(v[lo], v[hi], pos - static_cast<double>(lo));
}

UMatrix umatrix(const SomMap& map) {
  const std::size_t rows = map.rows();
  const std::size_t cols = map.cols();
  UMatrix um{Matrix(rows, cols), 0.0};
  const auto nodes = static_cast<std::ptrdiff_t>(map.nodes());
#pragma omp parallel for if (map.nodes() * map.dim() >= kParallelWork && !omp_in_parallel())
  for (std::ptrdiff_t i = 0; i < nodes; ++i) {
    const auto node = static_cast<std::size_t>(i);
    const std::size_t r = node / cols;
    const std::size_t c = node % cols;
    double sum = 0.0;
    int count = 0;
    auto visit = [&](std::size_t other) {
      sum += distance(map.weight(node), map.weight(other), Metric::Euclidean);
      ++count;
    };
    if (r > 0) visit(node - cols);
    if (c > 0) visit(node - 1);
    if (c + 1 < cols) visit(node + 1);
    if (r + 1 < rows) visit(node + cols);
    um.heights(r, c) = sum / count;
  }
  um.threshold = percentile(um.heights.data, kDefaultThresholdPercentile);
  return um;
}

AttractionField attraction_field(const UMatrix& um, std::size_t levels) {
  const auto& h = um.heights;
  AttractionField field;
  field.rows = h.rows;
  field.cols = h.cols;
  field.dx.resize(h.rows * h.cols);
  field.dy.resize(h.rows * h.cols);
  auto derivative = [](double before, double after, std::size_t span) { return (after - before) / static_cast<double>(span); };
  for (std::size_t r = 0; r < h.rows; ++r) {
    for (std::size_t c = 0; c < h.cols; ++c) {
      double gx = 0.0;
      double gy = 0.0;
      if (h.cols > 1) {
        const std::size_t c0 = c > 0 ? c - 1 : c;
        const std::size_t c1 = c + 1 < h.cols ? c + 1 : c;
        gx = derivative(h(r, c0), h(r, c1), c1 - c0);
      }
      if (h.rows > 1) {
        const std::size_t r0 = r > 0 ? r - 1 : r;
        const std::size_t r1 = r + 1 < h.rows ? r + 1 : r;
        gy = derivative(h(r0, c), h(r1, c), r1 - r0);
      }
      field.dx[r * h.cols + c] = gx == 0.0 ? 0.0 : -gx;
      field.dy[r * h.cols + c] = gy == 0.0 ? 0.0 : -gy;
    }
  }
  for (std::size_t k = 1; k <= levels; ++k) {
    field.contour_levels.push_back(percentile(h.data, 100.0 * static_cast<double>(k) / static_cast<double>(levels + 1)));
  }
  return field;
}

ClusterAssignment clusters(const UMatrix& um, double threshold) {
  if (!std::isfinite(threshold)) throw ArgumentError("clusters: threshold must be finite");
  const auto& h = um.heights;
  ClusterAssignment out;
  out.ids.assign(h.data.size(), ClusterAssignment::kBorder);
  std::vector<bool> seen(h.data.size(), false);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < h.data.size(); ++start) {
    if (seen[start] || !(h.data[start] < threshold)) continue;
    const int id = out.count++;
    stack.push_back(start);
    seen[start] = true;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      out.ids[node] = id;
      const std::size_t r = node / h.cols;
      const std::size_t c = node % h.cols;
      auto push = [&](std::size_t other) {
        if (!seen[other] && h.data[other] < threshold) {
          seen[other] = true;
          stack.push_back(other);
        }
      };
      if (r > 0) push(node - h.cols);
      if (c > 0) push(node - 1);
      if (c + 1 < h.cols) push(node + 1);
      if (r + 1 < h.rows) push(node + h.cols);
    }
  }
  return out;
}

ClusterAssignment clusters(const UMatrix& um) { return clusters(um, um.threshold); }

std::string map_to_json(const SomMap& map) {
  nlohmann::json j;
  j["rows"] = map.rows();
  j["cols"] = map.cols();
  j["dim"] = map.dim();
  j["trained"] = map.trained();
  j["schedule"] = schedule_to_json(map.schedule());
  auto& w = j["weights"] = nlohmann::json::array();
  for (std::size_t i = 0; i < map.nodes(); ++i) {
    auto row = map.weight(i);
    w.push_back(std::vector<double>(row.begin(), row.end()));
  }
  return j.dump(1) + "\n";
}

SomMap map_from_json(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    TrainSchedule sched;
    schedule_from_json(j.at("schedule"), sched);
    SomMap map(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), j.at("dim").get<std::size_t>(), sched);
    const auto& w = j.at("weights");
    if (w.size() != map.nodes()) throw ParseError("map JSON: weight count does not match rows * cols");
    for (std::size_t i = 0; i < map.nodes(); ++i) {
      const auto row = w[i].get<std::vector<double>>();
      if (row.size() != map.dim()) throw ParseError("map JSON: weight vector has the wrong dimension");
      std::copy(row.begin(), row.end(), map.weight(i).begin());
    }
    map.set_trained(j.at("trained").get<bool>());
    return map;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("map JSON: ") + e.what());
  }
}

void save_map(const std::filesystem::path& path, const SomMap& map) { write_text_file(path, map_to_json(map)); }

SomMap load_map(const std::filesystem::path& path) { return map_from_json(read_text_file(path)); }

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t r = 0; r < m.rows; ++r) {
    for (std::size_t c = 0; c < m.cols; ++c) out << (c ? "," : "") << format_double(m(r, c));
    out << '\n';
  }
}

void write_attraction_csv(std::ostream& out, const AttractionField& field) {
  out << "row,col,dx,dy\n";
  for (std::size_t r = 0; r < field.rows; ++r) {
    for (std::size_t c = 0; c < field.cols; ++c) {
      const std::size_t i = r * field.cols + c;
      out << r << ',' << c << ',' << format_double(field.dx[i]) << ',' << format_double(field.dy[i]) << '\n';
    }
  }
}

void write_clusters_csv(std::ostream& out, const ClusterAssignment& assignment, std::size_t cols) {
  out << "row,col,cluster\n";
  for (std::size_t i = 0; i < assignment.ids.size(); ++i) {
    out << i / cols << ',' << i % cols << ',';
    if (assignment.ids[i] == ClusterAssignment::kBorder) {
      out << "border";
    } else {
      out << assignment.ids[i];
    }
    out << '\n';
  }
}

}  // namespace gaitsom
