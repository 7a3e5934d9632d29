#include "gaitsom/eval.hpp"

#include "gaitsom/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <set>

namespace gaitsom {
namespace {

ClassLabel majority(const std::map<ClassLabel, std::size_t>& votes) {
  // std::map iterates in class order, so the first maximum is the lowest class.
  auto best = votes.begin();
  for (auto it = votes.begin(); it != votes.end(); ++it) {
    if (it->second > best->second) best = it;
  }
  return best->first;
}

void check_loocv_input(std::span<const LabeledFeatures> data) {
  if (data.size() < 2) throw ArgumentError("loocv: need at least 2 samples");
  std::set<ClassLabel> classes;
  for (const auto& d : data) {
    classes.insert(d.label);
    if (d.features.size() != data.front().features.size()) throw ArgumentError("loocv: feature vectors differ in length");
  }
  if (classes.size() < 2) throw ArgumentError("loocv: need at least 2 classes (kappa is undefined otherwise)");
}

FoldRecord run_fold(std::span<const LabeledFeatures> data, std::size_t fold, MapShape shape, const TrainSchedule& schedule) {
  std::vector<LabeledFeatures> training;
  training.reserve(data.size() - 1);
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (i != fold) training.push_back(data[i]);
  }
  TrainSchedule fold_schedule = schedule;
  fold_schedule.rng_seed = schedule.rng_seed + fold;
  const auto values = feature_values(training);
  auto map = init_map(shape.rows, shape.cols, data.front().features.size(), fold_schedule, values);
  map = train(std::move(map), values);
  const auto lm = label_map(map, training);
  return {data[fold].features.subject_id, data[fold].label, classify(lm, data[fold].features.values)};
}

}  // namespace

std::vector<std::vector<double>> feature_values(std::span<const LabeledFeatures> data) {
  std::vector<std::vector<double>> out;
  out.reserve(data.size());
  for (const auto& d : data) out.push_back(d.features.values);
  return out;
}

LabeledMap label_map(const SomMap& map, std::span<const LabeledFeatures> training) {
  if (!map.trained()) throw StateError("label_map: map is not trained");
  if (training.empty()) throw ArgumentError("label_map: no training vectors");

  const std::size_t nodes = map.nodes();
  std::vector<std::map<ClassLabel, std::size_t>> votes(nodes);
  std::vector<std::size_t> bmu(training.size());
  for (std::size_t i = 0; i < training.size(); ++i) {
    bmu[i] = best_match(map, training[i].features.values).node;
    ++votes[bmu[i]][training[i].label];
  }

  LabeledMap lm{map, std::vector<ClassLabel>(nodes), std::vector<std::size_t>(nodes, 0), {}, {}};
  std::vector<bool> has_label(nodes, false);
  for (std::size_t n = 0; n < nodes; ++n) {
    if (votes[n].empty()) continue;
    lm.node_labels[n] = majority(votes[n]);
    for (const auto& [label, count] : votes[n]) lm.hits[n] += count;
    has_label[n] = true;
  }
  const std::size_t cols = map.cols();
  for (std::size_t n = 0; n < nodes; ++n) {
    if (has_label[n]) continue;
    std::size_t best = nodes;
    std::size_t best_d2 = std::numeric_limits<std::size_t>::max();
    for (std::size_t m = 0; m < nodes; ++m) {
      if (!has_label[m]) continue;
      const auto dr = static_cast<std::ptrdiff_t>(n / cols) - static_cast<std::ptrdiff_t>(m / cols);
      const auto dc = static_cast<std::ptrdiff_t>(n % cols) - static_cast<std::ptrdiff_t>(m % cols);
      const auto d2 = static_cast<std::size_t>(dr * dr + dc * dc);
      if (d2 < best_d2) {
        best_d2 = d2;
        best = m;
      }
    }
    lm.node_labels[n] = lm.node_labels[best];
  }

  lm.node_clusters = clusters(umatrix(map));
  std::map<int, std::map<ClassLabel, std::size_t>> cluster_votes;
  for (std::size_t i = 0; i < training.size(); ++i) {
    const int id = lm.node_clusters.ids[bmu[i]];
    if (id != ClusterAssignment::kBorder) ++cluster_votes[id][training[i].label];
  }
  for (const auto& [id, v] : cluster_votes) lm.cluster_labels[id] = majority(v);
  return lm;
}

ClassLabel classify(const LabeledMap& lm, std::span<const double> x) { return lm.node_labels[best_match(lm.map, x).node]; }

double kappa(const Confusion& confusion) {
  const std::size_t k = confusion.size();
  if (k == 0) throw ArgumentError("kappa: empty confusion matrix");
  std::int64_t total = 0;
  std::int64_t trace = 0;
  std::vector<std::int64_t> row_sum(k, 0), col_sum(k, 0);
  for (std::size_t r = 0; r < k; ++r) {
    if (confusion[r].size() != k) throw ArgumentError("kappa: confusion matrix must be square");
    for (std::size_t c = 0; c < k; ++c) {
      const auto v = confusion[r][c];
      if (v < 0) throw ArgumentError("kappa: negative count");
      total += v;
      row_sum[r] += v;
      col_sum[c] += v;
      if (r == c) trace += v;
    }
  }
  if (total == 0) throw ArgumentError("kappa: empty confusion matrix");
  std::int64_t chance = 0;
  for (std::size_t c = 0; c < k; ++c) chance += row_sum[c] * col_sum[c];
  const std::int64_t denom = total * total - chance;
  if (denom == 0) throw ArgumentError("kappa: undefined (chance agreement is 1)");
  return static_cast<double>(total * trace - chance) / static_cast<double>(denom);
}

EvalReport summarize(std::vector<FoldRecord> records) {
  if (records.empty()) throw ArgumentError("summarize: no records");
  EvalReport report;
  std::set<ClassLabel> classes;
  for (const auto& r : records) {
    classes.insert(r.truth);
    classes.insert(r.predicted);
  }
  report.classes.assign(classes.begin(), classes.end());
  const std::size_t k = report.classes.size();
  report.confusion.assign(k, std::vector<std::int64_t>(k, 0));
  auto index = [&](const ClassLabel& l) {
    return static_cast<std::size_t>(std::lower_bound(report.classes.begin(), report.classes.end(), l) - report.classes.begin());
  };
  for (const auto& r : records) {
    ++report.confusion[index(r.truth)][index(r.predicted)];
    if (r.truth == r.predicted) ++report.correct;
  }
  const double n = static_cast<double>(records.size());
  const double p = static_cast<double>(report.correct) / n;
  report.recognition_rate = p;
  report.rate_dispersion = std::sqrt(p * (1.0 - p));
  // A single observed class leaves chance agreement at 1 and kappa undefined.
  report.kappa = k > 1 ? kappa(report.confusion) : std::numeric_limits<double>::quiet_NaN();
  report.folds = std::move(records);
  return report;
}

EvalReport loocv(std::span<const LabeledFeatures> data, MapShape shape, const TrainSchedule& schedule) {
  check_loocv_input(data);
  std::vector<FoldRecord> records(data.size());
  std::vector<std::string> errors(data.size());
  const auto n = static_cast<std::ptrdiff_t>(data.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto fold = static_cast<std::size_t>(i);
    try {
      records[fold] = run_fold(data, fold, shape, schedule);
    } catch (const std::exception& e) {
      errors[fold] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw ArgumentError("loocv: " + e);
  }
  return summarize(std::move(records));
}

namespace reference {

EvalReport loocv(std::span<const LabeledFeatures> data, MapShape shape, const TrainSchedule& schedule) {
  check_loocv_input(data);
  std::vector<FoldRecord> records;
  for (std::size_t fold = 0; fold < data.size(); ++fold) records.push_back(run_fold(data, fold, shape, schedule));
  return summarize(std::move(records));
}

}  // namespace reference

EvalReport evaluate(const LabeledMap& lm, std::span<const LabeledFeatures> test) {
  std::vector<FoldRecord> records;
  for (const auto& t : test) records.push_back({t.features.subject_id, t.label, classify(lm, t.features.values)});
  return summarize(std::move(records));
}

std::string report_to_json(const EvalReport& report) {
  nlohmann::json j;
  auto& classes = j["classes"] = nlohmann::json::array();
  for (const auto& c : report.classes) classes.push_back(c.str());
  j["confusion"] = report.confusion;
  j["n"] = report.folds.size();
  j["correct"] = report.correct;
  j["recognition_rate"] = report.recognition_rate;
  j["rate_dispersion"] = report.rate_dispersion;
  j["kappa"] = report.kappa;
  auto& folds = j["folds"] = nlohmann::json::array();
  for (const auto& f : report.folds) {
    folds.push_back({{"held_out", f.held_out}, {"true", f.truth.str()}, {"predicted", f.predicted.str()}});
  }
  return j.dump(1) + "\n";
}

void write_report_table(std::ostream& out, const EvalReport& report) {
  std::size_t width = 9;
  for (const auto& c : report.classes) width = std::max(width, c.str().size() + 2);
  out << "samples: " << report.folds.size() << "  correct: " << report.correct << '\n';
  out << std::fixed << std::setprecision(4);
  out << "recognition rate: " << report.recognition_rate << " +/- " << report.rate_dispersion << '\n';
  out << "kappa: " << report.kappa << "\n\n";
  out << std::setw(static_cast<int>(width)) << "true\\pred";
  for (const auto& c : report.classes) out << std::setw(static_cast<int>(width)) << c.str();
  out << '\n';
  for (std::size_t r = 0; r < report.classes.size(); ++r) {
    out << std::setw(static_cast<int>(width)) << report.classes[r].str();
    for (auto v : report.confusion[r]) out << std::setw(static_cast<int>(width)) << v;
    out << '\n';
  }
  out.unsetf(std::ios::floatfield);
}

void write_confusion_csv(std::ostream& out, const EvalReport& report) {
  out << "true\\predicted";
  for (const auto& c : report.classes) out << ',' << c.str();
  out << '\n';
  for (std::size_t r = 0; r < report.classes.size(); ++r) {
    out << report.classes[r].str();
    for (auto v : report.confusion[r]) out << ',' << v;
    out << '\n';
  }
}

}  // namespace gaitsom
