#include "gaitsom/error.hpp"
#include "gaitsom/eval.hpp"
#include "oracles.hpp"

#include <doctest.h>
#include <omp.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

using namespace gaitsom;

namespace {

const ClassLabel kA(ClassLabel::Kind::Normal);
const ClassLabel kB(ClassLabel::Kind::CpDp);

LabeledFeatures sample(std::vector<double> v, ClassLabel label, std::string id) {
  FeatureVector fv{std::move(v), std::move(id), {}, ScaleLevel::HighScale};
  return {std::move(fv), std::move(label)};
}

/// Two Gaussian blobs in `dim` dimensions, `n` per class.
std::vector<LabeledFeatures> blobs(std::size_t n, std::size_t dim, double spread, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, spread);
  std::vector<LabeledFeatures> out;
  for (std::size_t i = 0; i < 2 * n; ++i) {
    const bool second = i % 2 == 1;
    std::vector<double> v(dim);
    for (auto& x : v) x = (second ? 10.0 : 0.0) + g(rng);
    out.push_back(sample(std::move(v), second ? kB : kA, "s" + std::to_string(i)));
  }
  return out;
}

SomMap trained_map(std::size_t rows, std::size_t cols, std::span<const LabeledFeatures> data, std::uint64_t seed = 1) {
  TrainSchedule s;
  s.rng_seed = seed;
  const auto v = feature_values(data);
  return train(init_map(rows, cols, v[0].size(), s, v), v);
}

TrainSchedule quick_schedule() {
  TrainSchedule s;
  s.epochs = 40;
  return s;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("kappa hand cases") {
  CHECK(kappa({{7, 0, 0}, {0, 3, 0}, {0, 0, 9}}) == 1.0);
  CHECK(kappa({{25, 25}, {25, 25}}) == 0.0);
  CHECK(std::abs(kappa({{45, 5}, {15, 35}}) - 0.60) <= 1e-12);
  const auto f = oracle::kappa_fraction({{45, 5}, {15, 35}});
  CHECK(f.num == 3);
  CHECK(f.den == 5);
  CHECK(kappa({{45, 5}, {15, 35}}) == 3.0 / 5.0);
}

TEST_CASE("kappa errors") {
  CHECK_THROWS_AS(kappa({}), ArgumentError);
  CHECK_THROWS_AS(kappa({{1, 2}}), ArgumentError);
  CHECK_THROWS_AS(kappa({{0, 0}, {0, 0}}), ArgumentError);
  CHECK_THROWS_AS(kappa({{5, 0}, {0, 0}}), ArgumentError);
  CHECK_THROWS_AS(kappa({{5, -1}, {0, 3}}), ArgumentError);
}

TEST_CASE("kappa against exact fractions and its bounds") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t k = 2 + rng() % 4;
    Confusion m(k, std::vector<std::int64_t>(k));
    bool diagonal = true;
    for (std::size_t r = 0; r < k; ++r) {
      for (std::size_t c = 0; c < k; ++c) {
        m[r][c] = (rng() % 3 == 0) ? static_cast<std::int64_t>(rng() % 50) : 0;
        if (r != c && m[r][c] != 0) diagonal = false;
      }
    }
    const auto f = oracle::kappa_fraction(m);
    if (f.den == 0) {
      CHECK_THROWS_AS(kappa(m), ArgumentError);
      continue;
    }
    const double got = kappa(m);
    CHECK(got == static_cast<double>(f.num) / static_cast<double>(f.den));
    CHECK(got <= 1.0);
    CHECK(got >= -1.0);
    CHECK((got == 1.0) == diagonal);
  }
}

TEST_CASE("summarize conserves counts") {
  std::vector<FoldRecord> rec{{"a", kA, kA}, {"b", kA, kB}, {"c", kB, kB}, {"d", kB, kB}, {"e", kA, kA}};
  const auto r = summarize(rec);
  CHECK(r.classes == std::vector<ClassLabel>{kA, kB});
  CHECK(r.confusion == Confusion{{2, 1}, {0, 2}});
  CHECK(r.correct == 4);
  CHECK(r.recognition_rate == 0.8);
  CHECK(r.rate_dispersion == doctest::Approx(0.4));
  CHECK(r.kappa == kappa(r.confusion));
  const auto single = summarize({{"a", kA, kA}});
  CHECK(std::isnan(single.kappa));
}

TEST_CASE("label_map contracts") {
  const auto data = blobs(6, 3, 0.5, 1);
  SomMap untrained = init_map(3, 3, 3, TrainSchedule{}, feature_values(data));
  CHECK_THROWS_AS(label_map(untrained, data), StateError);

  auto same = data;
  for (auto& d : same) d.label = kB;
  const auto lm = label_map(trained_map(3, 3, same), same);
  for (const auto& l : lm.node_labels) CHECK(l == kB);

  // One vector per node, each with its own label.
  SomMap grid(2, 2, 2);
  const std::vector<std::vector<double>> w{{0, 0}, {5, 0}, {0, 5}, {5, 5}};
  for (std::size_t i = 0; i < 4; ++i) std::copy(w[i].begin(), w[i].end(), grid.weight(i).begin());
  grid.set_trained(true);
  const std::vector<ClassLabel> labels{ClassLabel(ClassLabel::Kind::Polio), kB, kA, ClassLabel::other("X")};
  std::vector<LabeledFeatures> own;
  for (std::size_t i = 0; i < 4; ++i) own.push_back(sample(w[i], labels[i], "n" + std::to_string(i)));
  const auto each = label_map(grid, own);
  CHECK(each.node_labels == labels);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(each.hits[i] == 1);
    CHECK(classify(each, w[i]) == labels[i]);
  }
  CHECK(classify(each, std::vector<double>{1e9, -1e9}) == labels[1]);
}

TEST_CASE("empty nodes inherit from the nearest hit node, ties to the lowest index") {
  SomMap m(1, 5, 1);
  for (std::size_t i = 0; i < 5; ++i) m.weight(i)[0] = 10.0 * static_cast<double>(i);
  m.set_trained(true);
  // Hits on nodes 1 (A) and 3 (B); node 2 is equidistant and takes node 1's label.
  const std::vector<LabeledFeatures> data{sample({10.0}, kA, "a"), sample({30.0}, kB, "b")};
  const auto lm = label_map(m, data);
  CHECK(lm.node_labels == std::vector<ClassLabel>{kA, kA, kA, kB, kB});
  CHECK(lm.hits == std::vector<std::size_t>{0, 1, 0, 1, 0});
}

TEST_CASE("majority ties go to the lowest class") {
  SomMap m(1, 2, 1);
  m.weight(1)[0] = 100.0;
  m.set_trained(true);
  const std::vector<LabeledFeatures> data{sample({0.0}, kB, "b"), sample({0.0}, kA, "a")};
  CHECK(label_map(m, data).node_labels[0] == kA);
}

TEST_CASE("node labels follow the u-matrix clusters on a two-cluster fixture") {
  const auto data = blobs(15, 4, 0.3, 9);
  const auto lm = label_map(trained_map(6, 6, data), data);
  CHECK(lm.cluster_labels.size() >= 2);
  std::set<ClassLabel> seen;
  for (std::size_t n = 0; n < lm.node_labels.size(); ++n) {
    const int id = lm.node_clusters.ids[n];
    if (id == ClusterAssignment::kBorder || !lm.cluster_labels.contains(id)) continue;
    CHECK(lm.node_labels[n] == lm.cluster_labels.at(id));
    seen.insert(lm.cluster_labels.at(id));
  }
  CHECK(seen.size() == 2);
}

TEST_CASE("loocv on separable point clusters") {
  std::vector<LabeledFeatures> data;
  for (int i = 0; i < 5; ++i) {
    data.push_back(sample({0.0, 0.0}, kA, "a" + std::to_string(i)));
    data.push_back(sample({10.0, 10.0}, kB, "b" + std::to_string(i)));
  }
  const auto r = loocv(data, {3, 3}, quick_schedule());
  CHECK(r.recognition_rate == 1.0);
  CHECK(r.kappa == 1.0);
  CHECK(r.rate_dispersion == 0.0);
  CHECK(r.folds.size() == 10);
  CHECK(r.folds[3].held_out == "b1");
}

TEST_CASE("loocv input checks") {
  std::vector<LabeledFeatures> one{sample({0.0}, kA, "a")};
  CHECK_THROWS_AS(loocv(one, {2, 2}, quick_schedule()), ArgumentError);
  std::vector<LabeledFeatures> mono{sample({0.0}, kA, "a"), sample({1.0}, kA, "b")};
  CHECK_THROWS_AS(loocv(mono, {2, 2}, quick_schedule()), ArgumentError);
}

TEST_CASE("shuffled labels give chance-level kappa") {
  const auto base = blobs(10, 3, 0.5, 2);
  std::mt19937_64 rng(77);
  double sum = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    auto data = base;
    std::vector<ClassLabel> labels;
    for (const auto& d : data) labels.push_back(d.label);
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::size_t i = 0; i < data.size(); ++i) data[i].label = labels[i];
    auto s = quick_schedule();
    s.rng_seed = 1000 + trial;
    sum += loocv(data, {4, 4}, s).kappa;
  }
  MESSAGE("mean kappa over shuffles: " << sum / 20.0);
  CHECK(std::abs(sum / 20.0) < 0.3);
}

TEST_CASE("loocv is deterministic and matches the serial reference") {
  const auto data = blobs(6, 5, 2.0, 3);
  auto s = quick_schedule();
  s.rng_seed = 42;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(4);
  const auto a = loocv(data, {4, 4}, s);
  omp_set_num_threads(saved);
  const auto b = loocv(data, {4, 4}, s);
  const auto c = reference::loocv(data, {4, 4}, s);
  CHECK(report_to_json(a) == report_to_json(b));
  CHECK(report_to_json(a) == report_to_json(c));
  std::int64_t total = 0;
  for (const auto& row : a.confusion) {
    for (auto v : row) total += v;
  }
  CHECK(total == 12);
}

TEST_CASE("consistent relabelling leaves rate and kappa unchanged") {
  const auto data = blobs(8, 3, 1.0, 5);
  auto renamed = data;
  for (auto& d : renamed) d.label = d.label == kA ? ClassLabel(ClassLabel::Kind::Polio) : kA;
  const auto a = loocv(data, {4, 4}, quick_schedule());
  const auto b = loocv(renamed, {4, 4}, quick_schedule());
  CHECK(a.recognition_rate == b.recognition_rate);
  CHECK(a.kappa == doctest::Approx(b.kappa).epsilon(1e-15));
}

TEST_CASE("independent test set and report output") {
  const auto train_set = blobs(10, 3, 0.5, 6);
  const auto test_set = blobs(5, 3, 0.5, 7);
  const auto lm = label_map(trained_map(4, 4, train_set), train_set);
  const auto r = evaluate(lm, test_set);
  CHECK(r.recognition_rate == 1.0);
  const auto json = report_to_json(r);
  CHECK(json.find("\"kappa\"") != std::string::npos);
  CHECK(json.find("\"recognition_rate\"") != std::string::npos);
  std::ostringstream csv, table;
  write_confusion_csv(csv, r);
  write_report_table(table, r);
  CHECK(csv.str().rfind("true\\predicted,Normal,CP-dp\n", 0) == 0);
  CHECK(table.str().find("recognition rate: 1.0000") != std::string::npos);
}

}
