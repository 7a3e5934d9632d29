#include "gaitsom/features.hpp"

#include "gaitsom/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

namespace gaitsom {
namespace {

constexpr double kAxisTolerance = 1e-9;

Matrix submatrix(const Matrix& m, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
  Matrix out(r1 - r0, c1 - c0);
  for (std::size_t r = r0; r < r1; ++r) {
    for (std::size_t c = c0; c < c1; ++c) out(r - r0, c - c0) = m(r, c);
  }
  return out;
}

std::size_t find_column(const std::vector<double>& axis, double pct) {
  for (std::size_t c = 0; c < axis.size(); ++c) {
    if (std::abs(axis[c] - pct) <= kAxisTolerance) return c;
  }
  return axis.size();
}

std::string parts_string(const std::vector<TrajectoryKey>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += ';';
    s += to_string(parts[i]);
  }
  return s;
}

}  // namespace

std::string_view to_string(ScaleLevel level) { return level == ScaleLevel::HighScale ? "high" : "low"; }

ScaleLevel parse_level(std::string_view text) {
  std::string t(trim(text));
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "high" || t == "highscale") return ScaleLevel::HighScale;
  if (t == "low" || t == "lowscale") return ScaleLevel::LowScale;
  throw ArgumentError("unknown scale level '" + std::string(text) + "'");
}

void RegionSplit::validate() const {
  if (!(stance_fraction > 0.0 && stance_fraction < 1.0)) throw ArgumentError("stance_fraction must be in (0, 1)");
}

void FeatureOptions::validate() const {
  if (time_samples == 0 || level_size == 0) throw ArgumentError("feature sample counts must be positive");
  if (!(time_step_pct > 0.0)) throw ArgumentError("feature time step must be positive");
}

std::array<Region, 4> split_regions(const Scalogram& sc, const RegionSplit& split) {
  split.validate();
  const std::size_t rows = sc.scale_count();
  const std::size_t cols = sc.time_count();
  const std::size_t mid_row = split.scale_split.value_or(rows / 2);
  if (mid_row > rows) throw ArgumentError("scale split beyond the scale axis");

  const double stance_end = split.stance_fraction * 100.0;
  std::size_t swing_col = 0;
  while (swing_col < cols && sc.time_axis[swing_col] <= stance_end + kAxisTolerance) ++swing_col;

  auto make = [&](int id, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
    return Region{id, r0, r1, c0, c1, submatrix(sc.values, r0, r1, c0, c1)};
  };
  return {make(1, 0, mid_row, 0, swing_col), make(2, 0, mid_row, swing_col, cols),
          make(3, mid_row, rows, swing_col, cols), make(4, mid_row, rows, 0, swing_col)};
}

FeatureVector extract_features(const Scalogram& sc, const RegionSplit& split, const FeatureOptions& options) {
  options.validate();
  const std::size_t rows = sc.scale_count();
  if (rows < options.level_size) {
    throw ArgumentError("scalogram has " + std::to_string(rows) + " scales, level needs " + std::to_string(options.level_size));
  }
  std::vector<std::size_t> cols(options.time_samples);
  for (std::size_t t = 0; t < options.time_samples; ++t) {
    const double pct = static_cast<double>(t) * options.time_step_pct;
    cols[t] = find_column(sc.time_axis, pct);
    if (cols[t] == sc.time_axis.size()) {
      throw ArgumentError("scalogram time axis has no column at " + format_double(pct) + "%");
    }
  }
  const std::size_t first_row = split.level == ScaleLevel::HighScale ? rows - options.level_size : 0;

  FeatureVector fv;
  fv.values.reserve(options.time_samples * options.level_size);
  for (std::size_t c : cols) {
    for (std::size_t r = first_row; r < first_row + options.level_size; ++r) fv.values.push_back(sc.values(r, c));
  }
  fv.parts = {sc.key};
  fv.level = split.level;
  return fv;
}

std::vector<TrajectoryKey> declared_order() {
  std::vector<TrajectoryKey> order;
  for (Joint j : {Joint::Hip, Joint::Knee, Joint::Ankle}) {
    for (Side s : {Side::Right, Side::Left}) order.push_back({j, s});
  }
  return order;
}

FeatureVector combine_joints(std::span<const FeatureVector> parts, std::span<const TrajectoryKey> order) {
  if (parts.empty()) throw ArgumentError("combine_joints: no parts");
  auto rank = [&](const FeatureVector& fv) {
    if (fv.parts.size() != 1) throw ArgumentError("combine_joints: parts must be single-trajectory vectors");
    auto it = std::find(order.begin(), order.end(), fv.parts.front());
    if (it == order.end()) throw ArgumentError("combine_joints: " + to_string(fv.parts.front()) + " not in declared order");
    return static_cast<std::size_t>(it - order.begin());
  };
  std::vector<std::pair<std::size_t, const FeatureVector*>> ranked;
  for (const auto& p : parts) {
    if (p.subject_id != parts.front().subject_id) throw ArgumentError("combine_joints: parts from different subjects");
    if (p.level != parts.front().level) throw ArgumentError("combine_joints: parts at different levels");
    ranked.emplace_back(rank(p), &p);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < ranked.size(); ++i) {
    if (ranked[i].first == ranked[i - 1].first) throw ArgumentError("combine_joints: duplicate part");
  }
  FeatureVector out;
  out.subject_id = parts.front().subject_id;
  out.level = parts.front().level;
  for (const auto& [r, p] : ranked) {
    out.values.insert(out.values.end(), p->values.begin(), p->values.end());
    out.parts.push_back(p->parts.front());
  }
  return out;
}

FeatureVector combine_joints(std::span<const FeatureVector> parts) {
  const auto order = declared_order();
  return combine_joints(parts, order);
}

void zscore(FeatureVector& fv) {
  if (fv.values.empty()) return;
  const double n = static_cast<double>(fv.values.size());
  const double mean = std::accumulate(fv.values.begin(), fv.values.end(), 0.0) / n;
  double var = 0.0;
  for (double v : fv.values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / n);
  for (double& v : fv.values) v = sd > 0.0 ? (v - mean) / sd : 0.0;
}

FeatureVector subject_features(const Subject& subject, std::span<const TrajectoryKey> keys, const ScaleGrid& grid,
                               const CwtOptions& cwt_options, const RegionSplit& split, const FeatureOptions& options) {
  std::vector<FeatureVector> parts;
  for (const auto& key : keys) {
    auto fv = extract_features(cwt(subject.at(key), grid, cwt_options), split, options);
    fv.subject_id = subject.id();
    parts.push_back(std::move(fv));
  }
  auto out = combine_joints(parts);
  if (options.normalize) zscore(out);
  return out;
}

std::vector<LabeledFeatures> dataset_features(std::span<const Subject> subjects, std::span<const TrajectoryKey> keys,
                                              const ScaleGrid& grid, const CwtOptions& cwt_options,
                                              const RegionSplit& split, const FeatureOptions& options) {
  split.validate();
  options.validate();
  cwt_options.morlet.validate();
  std::vector<LabeledFeatures> out(subjects.size());
  std::vector<std::string> errors(subjects.size());
  const auto n = static_cast<std::ptrdiff_t>(subjects.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto& s = subjects[static_cast<std::size_t>(i)];
    try {
      out[static_cast<std::size_t>(i)] = {subject_features(s, keys, grid, cwt_options, split, options), s.label()};
    } catch (const std::exception& e) {
      errors[static_cast<std::size_t>(i)] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ArgumentError(e);
  }
  return out;
}

void write_feature_csv(std::ostream& out, std::span<const LabeledFeatures> rows, const FeatureOptions& options) {
  if (rows.empty()) throw ArgumentError("no feature vectors to write");
  const auto& first = rows.front().features;
  out << "# n_time=" << options.time_samples << ",n_scale=" << options.level_size << ",level=" << to_string(first.level)
      << ",parts=" << parts_string(first.parts) << '\n';
  out << "subject_id,label";
  for (std::size_t i = 0; i < first.size(); ++i) out << ",f" << i;
  out << '\n';
  for (const auto& row : rows) {
    if (row.features.size() != first.size()) throw ArgumentError("feature vectors differ in length");
    out << row.features.subject_id << ',' << row.label.str();
    for (double v : row.features.values) out << ',' << format_double(v);
    out << '\n';
  }
}

void write_feature_csv(const std::filesystem::path& path, std::span<const LabeledFeatures> rows, const FeatureOptions& options) {
  std::ostringstream ss;
  write_feature_csv(ss, rows, options);
  write_text_file(path, ss.str());
}

std::vector<LabeledFeatures> read_feature_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# ", 0) != 0) throw ParseError("feature file must start with a layout line", 1);
  ScaleLevel level = ScaleLevel::HighScale;
  std::vector<TrajectoryKey> parts;
  for (auto field : split_csv_line(std::string_view(line).substr(2))) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) continue;
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "level") level = parse_level(value);
    if (key == "parts") {
      std::size_t start = 0;
      while (start <= value.size()) {
        auto end = value.find(';', start);
        if (end == std::string_view::npos) end = value.size();
        const auto item = value.substr(start, end - start);
        const auto dash = item.find('-');
        if (dash == std::string_view::npos) throw ParseError("bad parts entry in layout line", 1);
        parts.push_back({parse_joint(item.substr(0, dash)), parse_side(item.substr(dash + 1))});
        start = end + 1;
      }
    }
  }
  if (!std::getline(in, line)) throw ParseError("missing column header", 2);
  const std::size_t width = split_csv_line(line).size();
  if (width < 3) throw ParseError("feature header has no feature columns", 2);

  std::vector<LabeledFeatures> rows;
  std::size_t row = 2;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != width) throw ParseError("wrong field count", row);
    LabeledFeatures lf;
    lf.features.subject_id = std::string(f[0]);
    lf.label = ClassLabel::parse(f[1]);
    lf.features.level = level;
    lf.features.parts = parts;
    for (std::size_t i = 2; i < f.size(); ++i) {
      auto v = parse_double(f[i]);
      if (!v || !std::isfinite(*v)) throw ParseError("bad feature value '" + std::string(f[i]) + "'", row);
      lf.features.values.push_back(*v);
    }
    rows.push_back(std::move(lf));
  }
  if (rows.empty()) throw ParseError("feature file has no rows");
  return rows;
}

std::vector<LabeledFeatures> read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return read_feature_csv(in);
}

}  // namespace gaitsom
