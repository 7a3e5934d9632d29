// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "gaitsom/config.hpp"
#include "gaitsom/pipeline.hpp"
#include "gaitsom/text_io.hpp"

#include "oracles.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>

using namespace gaitsom;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and thresholds.
constexpr double kMorletTol = 1e-12;
constexpr double kLinearityTol = 1e-12;  // relative to the scalogram peak
constexpr double kKappaTol = 1e-12;
constexpr double kClusterMeanTol = 0.10;  // fraction of the cluster separation
constexpr double kSpectrumRatio = 10.0;
constexpr double kMinRate = 0.90;
constexpr double kMinKappa = 0.80;
constexpr std::uint64_t kDiscriminationSeed = 1;
constexpr std::uint64_t kLateralitySeed = 1;
constexpr int kEnsembleSeeds = 8;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

int failures = 0;

template <typename Fn>
void criterion(int number, const char* name, Fn&& fn) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s  %2d  %-38s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", number, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::vector<double> sampled(double (*f)(double, double), double p, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) v[k] = f(100.0 * static_cast<double>(k) / static_cast<double>(n - 1), p);
  return v;
}

double cosine(double t, double period) { return std::cos(2.0 * std::numbers::pi * t / period); }

std::size_t argmax_row(const Matrix& m, std::size_t col) {
  std::size_t best = 0;
  for (std::size_t r = 1; r < m.rows; ++r) {
    if (m(r, col) > m(best, col)) best = r;
  }
  return best;
}

long bin_gap(std::size_t a, std::size_t b) { return std::abs(static_cast<long>(a) - static_cast<long>(b)); }

Outcome morlet_correctness() {
  Outcome o;
  const double err0 = std::abs(morlet(0.0).real() - 1.0 / std::sqrt(2.0 * std::numbers::pi));
  o.require(err0 <= kMorletTol, "psi(0) off by " + fmt("%.3g", err0));
  o.require(morlet(0.0).imag() == 0.0, "psi(0) has an imaginary part");
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = u(rng);
    const auto a = morlet(t), b = morlet(-t);
    worst = std::max({worst, std::abs(a.real() - b.real()), std::abs(a.imag() + b.imag())});
  }
  o.require(worst <= kMorletTol, "symmetry error " + fmt("%.3g", worst));
  o.detail = o.pass ? "symmetry error " + fmt("%.2g", worst) : o.detail;
  return o;
}

Outcome scale_localization() {
  Outcome o;
  const auto grid = ScaleGrid::canonical();
  const auto dense = ScaleGrid::log_spaced(1.0, 25.0, 111);
  std::string bins;
  for (double target : {2.0, 4.0, 8.0, 16.0}) {
    const auto sc = cwt_samples(sampled(cosine, target, kCanonicalGridSize), grid);
    const auto expected = grid.nearest(target);
    for (std::size_t col = 40; col <= 60; col += 5) {
      const auto got = argmax_row(sc, col);
      std::size_t best = 0;
      double best_v = -1.0;
      for (std::size_t i = 0; i < dense.size(); ++i) {
        const double v = oracle::cwt_quadrature([target](double t) { return cosine(t, target); }, dense[i], static_cast<double>(col));
        if (v > best_v) {
          best_v = v;
          best = i;
        }
      }
      const auto oracle_bin = grid.nearest(dense[best]);
      o.require(bin_gap(got, expected) <= 1, "s*=" + fmt("%g", target) + " col " + std::to_string(col) + " argmax bin " + std::to_string(got));
      o.require(bin_gap(got, oracle_bin) <= 1, "s*=" + fmt("%g", target) + " disagrees with quadrature");
      if (col == 50) bins += (bins.empty() ? "" : " ") + fmt("%g", target) + "->" + fmt("%.2f", grid[got]);
    }
  }
  if (o.pass) o.detail = "argmax scale at mid-cycle: " + bins;
  return o;
}

Outcome linearity() {
  Outcome o;
  const auto grid = ScaleGrid::canonical();
  const auto x = generate(presets::normal_vs_spastic(1, 5))[1].at({Joint::Hip, Side::Right}).samples();
  const auto base = cwt_samples(x, grid);
  double peak = 0.0;
  for (double v : base.data) peak = std::max(peak, v);
  double worst = 0.0;
  for (double a : {-3.0, -0.25, 0.5, 2.0, 7.5, 1e3}) {
    std::vector<double> y(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) y[k] = a * x[k];
    const auto sc = cwt_samples(y, grid);
    for (std::size_t i = 0; i < sc.data.size(); ++i) {
      worst = std::max(worst, std::abs(sc.data[i] - std::abs(a) * base.data[i]) / (std::abs(a) * peak));
    }
  }
  o.require(worst <= kLinearityTol, "relative error " + fmt("%.3g", worst));
  const auto zero = cwt_samples(std::vector<double>(kCanonicalGridSize, 0.0), grid);
  bool all_zero = true;
  for (double v : zero.data) all_zero = all_zero && v == 0.0;
  o.require(all_zero, "zero signal gave a nonzero coefficient");
  if (o.pass) o.detail = "max error/peak " + fmt("%.2g", worst) + ", zero signal exact";
  return o;
}

Outcome feature_geometry() {
  Outcome o;
  const auto subject = generate(presets::normal_vs_spastic(1, 2))[0];
  const auto grid = ScaleGrid::canonical();
  const std::vector<TrajectoryKey> one{{Joint::Hip, Side::Right}};
  const std::vector<TrajectoryKey> both{{Joint::Hip, Side::Right}, {Joint::Hip, Side::Left}};
  for (auto level : {ScaleLevel::HighScale, ScaleLevel::LowScale}) {
    RegionSplit split;
    split.level = level;
    o.require(subject_features(subject, one, grid, {}, split, {}).size() == 160, "single joint length");
    o.require(subject_features(subject, both, grid, {}, split, {}).size() == 320, "right+left length");
  }

  const auto sc = cwt(subject.at(one[0]), grid);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 0.99);
  for (int trial = 0; trial < 10; ++trial) {
    RegionSplit split;
    split.stance_fraction = u(rng);
    std::vector<int> cover(sc.values.data.size(), 0);
    for (const auto& r : split_regions(sc, split)) {
      for (std::size_t row = r.row_begin; row < r.row_end; ++row) {
        for (std::size_t col = r.col_begin; col < r.col_end; ++col) {
          ++cover[row * sc.time_count() + col];
          o.require(r.values(row - r.row_begin, col - r.col_begin) == sc.values(row, col), "region copy differs");
        }
      }
    }
    for (int c : cover) o.require(c == 1, "cell not covered exactly once at fraction " + fmt("%.3f", split.stance_fraction));
    if (!o.pass) break;
  }
  if (o.pass) o.detail = "160 / 320, 10 stance fractions tile exactly";
  return o;
}

Outcome update_fixed_point() {
  Outcome o;
  TrainSchedule s;
  s.epochs = 1;
  s.alpha0 = 1.0;
  s.alpha_decay = Decay::Constant;
  s.kernel = Kernel::Bubble;
  s.sigma0 = 0.0;
  s.sigma_final = 0.0;
  const std::vector<std::vector<double>> x{{0.1, -3.7, 12.25, 1e-7, 3.14159}};
  const auto init = init_map(4, 4, x[0].size(), s);
  const auto trained = train(init, x);
  const auto winner = best_match(init, x[0]).node;
  for (std::size_t i = 0; i < init.nodes(); ++i) {
    const auto w = trained.weight(i);
    const auto expected = i == winner ? std::span<const double>(x[0]) : init.weight(i);
    o.require(std::equal(w.begin(), w.end(), expected.begin()), "node " + std::to_string(i) + (i == winner ? " (BMU)" : ""));
  }
  if (o.pass) o.detail = "BMU equals input bit-exactly, others untouched";
  return o;
}

Outcome som_two_clusters() {
  Outcome o;
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g(0.0, 1.0);
  const std::array<std::array<double, 2>, 2> centres{{{0.0, 0.0}, {30.0, 10.0}}};
  const double separation = std::hypot(30.0, 10.0);
  const double radius = separation / 40.0;
  std::vector<std::vector<double>> data;
  std::array<std::vector<double>, 2> means{std::vector<double>(2, 0.0), std::vector<double>(2, 0.0)};
  for (int i = 0; i < 50; ++i) {
    for (std::size_t c = 0; c < 2; ++c) {
      std::vector<double> p{centres[c][0] + radius * g(rng), centres[c][1] + radius * g(rng)};
      means[c][0] += p[0] / 50.0;
      means[c][1] += p[1] / 50.0;
      data.push_back(p);
    }
  }
  const TrainSchedule s;
  const auto map = train(init_map(1, 2, 2, s, data), data);
  const auto na = best_match(map, means[0]).node;
  const auto nb = best_match(map, means[1]).node;
  o.require(na != nb, "both means map to one node");
  double worst = 0.0;
  for (std::size_t c = 0; c < 2; ++c) {
    const auto w = map.weight(c == 0 ? na : nb);
    worst = std::max(worst, std::hypot(w[0] - means[c][0], w[1] - means[c][1]) / separation);
  }
  o.require(worst <= kClusterMeanTol, "weight off by " + fmt("%.3f", worst) + " of separation");
  if (o.pass) o.detail = "max offset " + fmt("%.4f", worst) + " of separation";
  return o;
}

SomMap hand_map(std::size_t rows, std::size_t cols, const std::vector<std::vector<double>>& w) {
  SomMap m(rows, cols, w.front().size());
  for (std::size_t i = 0; i < w.size(); ++i) std::copy(w[i].begin(), w[i].end(), m.weight(i).begin());
  m.set_trained(true);
  return m;
}

Outcome umatrix_oracle() {
  Outcome o;
  const auto u = umatrix(hand_map(2, 2, {{0, 0}, {3, 4}, {0, 1}, {6, 8}}));
  // Edges: d01 = 5, d02 = 1, d13 = 5, d23 = sqrt(85).
  const double d23 = std::sqrt(85.0);
  o.require(u.heights(0, 0) == (5.0 + 1.0) / 2.0, "node (0,0)");
  o.require(u.heights(0, 1) == (5.0 + 5.0) / 2.0, "node (0,1)");
  o.require(u.heights(1, 0) == (1.0 + d23) / 2.0, "node (1,0)");
  o.require(u.heights(1, 1) == (5.0 + d23) / 2.0, "node (1,1)");
  std::vector<std::vector<double>> flat(12, std::vector<double>{1.5, -2.0, 7.0});
  for (double h : umatrix(hand_map(3, 4, flat)).heights.data) o.require(h == 0.0, "flat map height nonzero");
  if (o.pass) o.detail = "2x2 hand values exact, flat map all zero";
  return o;
}

Outcome kappa_oracle() {
  Outcome o;
  o.require(kappa({{7, 0, 0}, {0, 3, 0}, {0, 0, 9}}) == 1.0, "diagonal");
  o.require(kappa({{25, 25}, {25, 25}}) == 0.0, "uniform");
  const auto f = oracle::kappa_fraction({{45, 5}, {15, 35}});
  o.require(f.num == 3 && f.den == 5, "rational oracle is not 3/5");
  const double k = kappa({{45, 5}, {15, 35}});
  o.require(std::abs(k - 0.60) <= kKappaTol, "kappa " + fmt("%.15g", k));
  if (o.pass) o.detail = "1, 0, " + fmt("%.15g", k) + " (exact 3/5)";
  return o;
}

double hf_energy(const Subject& s) {
  const auto samples = s.at({Joint::Hip, Side::Right}).samples();
  std::vector<double> v(samples.begin(), samples.end());
  v.pop_back();  // the last sample repeats the first cycle point
  return oracle::dft_energy_above(v, 10);
}

Outcome discrimination() {
  Outcome o;
  RunConfig cfg;
  cfg.synth = presets::normal_vs_spastic(20, kDiscriminationSeed);
  cfg.apply_seed(kDiscriminationSeed);
  cfg.validate();
  const auto subjects = generate(*cfg.synth);

  double normal = 0.0, spastic = 0.0;
  for (const auto& s : subjects) (s.label().kind() == ClassLabel::Kind::Normal ? normal : spastic) += hf_energy(s);
  const double ratio = spastic / normal;
  o.require(ratio >= kSpectrumRatio, "spectral ratio " + fmt("%.1f", ratio));

  const auto data = dataset_features(subjects, cfg.parts, cfg.scale_grid(), cfg.cwt_options(), cfg.split, cfg.features);
  const auto r1 = loocv(data, cfg.map, cfg.schedule);
  const auto r2 = loocv(dataset_features(generate(*cfg.synth), cfg.parts, cfg.scale_grid(), cfg.cwt_options(), cfg.split,
                                         cfg.features),
                        cfg.map, cfg.schedule);
  o.require(r1.recognition_rate >= kMinRate, "rate " + fmt("%.3f", r1.recognition_rate));
  o.require(r1.kappa >= kMinKappa, "kappa " + fmt("%.3f", r1.kappa));
  o.require(report_to_json(r1) == report_to_json(r2), "rerun differs");
  o.detail = "hf energy ratio " + fmt("%.3g", ratio) + "x, rate " + fmt("%.3f", r1.recognition_rate) + ", kappa " +
             fmt("%.3f", r1.kappa) + ", rerun identical" + (o.pass ? "" : " | " + o.detail);
  return o;
}

struct Laterality {
  bool disjoint = false;
  bool between = false;
  double t = 0.0;
  int clusters = 0;
};

Laterality laterality_run(std::uint64_t seed) {
  RunConfig cfg;
  cfg.synth = presets::laterality(15, seed);
  cfg.apply_seed(seed);
  cfg.validate();
  const auto data = dataset_features(generate(*cfg.synth), cfg.parts, cfg.scale_grid(), cfg.cwt_options(), cfg.split,
                                     cfg.features);
  const auto a = train_and_analyse(data, cfg.map, cfg.schedule, cfg.threshold);

  std::map<ClassLabel::Kind, std::set<int>> clusters;
  std::map<ClassLabel::Kind, std::array<double, 3>> centroid;
  for (const auto& d : data) {
    const auto node = best_match(a.map, d.features.values).node;
    const int id = a.clusters.ids[node];
    if (id != ClusterAssignment::kBorder) clusters[d.label.kind()].insert(id);
    auto& c = centroid[d.label.kind()];
    c[0] += static_cast<double>(node / a.map.cols());
    c[1] += static_cast<double>(node % a.map.cols());
    c[2] += 1.0;
  }
  const auto& left = clusters[ClassLabel::Kind::CpLh];
  const auto& right = clusters[ClassLabel::Kind::CpRh];
  Laterality out;
  out.clusters = a.clusters.count;
  out.disjoint = !left.empty() && !right.empty();
  for (int id : left) out.disjoint = out.disjoint && right.count(id) == 0;

  auto point = [&](ClassLabel::Kind k) {
    const auto& c = centroid[k];
    return std::array<double, 2>{c[0] / c[2], c[1] / c[2]};
  };
  const auto l = point(ClassLabel::Kind::CpLh), r = point(ClassLabel::Kind::CpRh), s = point(ClassLabel::Kind::CpDp);
  const double len2 = (r[0] - l[0]) * (r[0] - l[0]) + (r[1] - l[1]) * (r[1] - l[1]);
  out.t = len2 > 0.0 ? ((s[0] - l[0]) * (r[0] - l[0]) + (s[1] - l[1]) * (r[1] - l[1])) / len2 : -1.0;
  out.between = out.t > 0.0 && out.t < 1.0;
  return out;
}

Outcome laterality() {
  Outcome o;
  const auto pinned = laterality_run(kLateralitySeed);
  o.require(pinned.disjoint, "left and right share a cluster");
  o.require(pinned.between, "symmetric centroid projection " + fmt("%.2f", pinned.t));
  int disjoint = 0, between = 0;
  for (int seed = 1; seed <= kEnsembleSeeds; ++seed) {
    const auto r = seed == static_cast<int>(kLateralitySeed) ? pinned : laterality_run(static_cast<std::uint64_t>(seed));
    disjoint += r.disjoint;
    between += r.between;
  }
  o.detail = "seed " + std::to_string(kLateralitySeed) + ": " + std::to_string(pinned.clusters) + " clusters, disjoint=" +
             (pinned.disjoint ? "yes" : "no") + ", symmetric at t=" + fmt("%.2f", pinned.t) + "; seeds 1-" +
             std::to_string(kEnsembleSeeds) + ": disjoint " + std::to_string(disjoint) + "/" + std::to_string(kEnsembleSeeds) +
             ", between " + std::to_string(between) + "/" + std::to_string(kEnsembleSeeds) + (o.pass ? "" : " | " + o.detail);
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    const auto ext = e.path().extension();
    if (ext == ".csv" || ext == ".json" || ext == ".pgm") out[fs::relative(e.path(), dir).generic_string()] = read_text_file(e.path());
  }
  return out;
}

Outcome determinism() {
  Outcome o;
  const auto dir = oracle::temp_dir("acceptance_determinism");
  RunConfig cfg;
  cfg.synth = presets::normal_vs_spastic(8, 5);
  cfg.apply_seed(5);
  cfg.out_dir = dir;
  run_pipeline(cfg);
  const auto first = snapshot(dir);
  run_pipeline(cfg);
  const auto second = snapshot(dir);
  o.require(first.size() == second.size(), "file sets differ");
  std::size_t bytes = 0;
  for (const auto& [name, content] : first) {
    const auto it = second.find(name);
    o.require(it != second.end() && it->second == content, name + " differs");
    bytes += content.size();
  }
  if (o.pass) o.detail = std::to_string(first.size()) + " CSV/JSON/PGM files, " + std::to_string(bytes) + " bytes identical";
  return o;
}

}  // namespace

int main() {
  criterion(1, "Morlet correctness", morlet_correctness);
  criterion(2, "CWT scale localization", scale_localization);
  criterion(3, "CWT linearity and zero signal", linearity);
  criterion(4, "Feature geometry", feature_geometry);
  criterion(5, "SOM update fixed point", update_fixed_point);
  criterion(6, "SOM two-cluster oracle", som_two_clusters);
  criterion(7, "U-Matrix oracle", umatrix_oracle);
  criterion(8, "Kappa oracle", kappa_oracle);
  criterion(9, "End-to-end discrimination", discrimination);
  criterion(10, "End-to-end laterality", laterality);
  criterion(11, "Pipeline determinism", determinism);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
