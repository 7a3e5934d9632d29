#include "gaitsom/pipeline.hpp"

#include "gaitsom/error.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace gaitsom {
namespace {

std::string safe_name(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_' && c != '.') c = '_';
  }
  return out;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

template <typename Writer>
void write_with(const std::filesystem::path& path, Writer&& writer) {
  std::ostringstream ss;
  writer(ss);
  write_text_file(path, ss.str());
}

}  // namespace

void write_scalograms(const std::filesystem::path& dir, std::span<const Subject> subjects,
                      std::span<const TrajectoryKey> keys, const ScaleGrid& grid, const CwtOptions& options, bool pgm) {
  std::filesystem::create_directories(dir);
  std::ostringstream index;
  index << "subject_id,label,joint,side,file\n";
  std::optional<Scalogram> first;
  for (const auto& s : subjects) {
    for (const auto& key : keys) {
      if (!s.has(key)) continue;
      auto sc = cwt(s.at(key), grid, options);
      const std::string stem = safe_name(s.id()) + "_" + to_string(key);
      write_scalogram_csv(dir / (stem + ".csv"), sc);
      if (pgm) write_pgm(dir / (stem + ".pgm"), sc.values);
      index << s.id() << ',' << s.label().str() << ',' << to_string(key.joint) << ',' << to_string(key.side) << ',' << stem
            << ".csv\n";
      if (!first) first = std::move(sc);
    }
  }
  write_text_file(dir / "index.csv", index.str());
  if (first) {
    Scalogram mask = *first;
    mask.values = first->cone_of_influence_mask();
    write_scalogram_csv(dir / "cone_of_influence.csv", mask);
  }
}

std::vector<ScalogramRecord> read_scalograms(const std::filesystem::path& dir) {
  std::ifstream in(dir / "index.csv");
  if (!in) throw ArgumentError("no index.csv in " + dir.string());
  std::string line;
  std::getline(in, line);
  std::vector<ScalogramRecord> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    auto f = split_csv_line(line);
    if (f.size() != 5) throw ParseError("scalogram index: expected 5 fields", row);
    auto sc = read_scalogram_csv(dir / std::string(f[4]));
    sc.key = {parse_joint(f[2]), parse_side(f[3])};
    out.push_back({std::string(f[0]), ClassLabel::parse(f[1]), std::move(sc)});
  }
  return out;
}

std::vector<LabeledFeatures> features_from_scalograms(std::span<const ScalogramRecord> records,
                                                      std::span<const TrajectoryKey> keys, const RegionSplit& split,
                                                      const FeatureOptions& options) {
  // Group by subject, keeping first-appearance order.
  std::vector<std::string> order;
  std::map<std::string, std::pair<ClassLabel, std::vector<FeatureVector>>> grouped;
  for (const auto& r : records) {
    if (std::find(keys.begin(), keys.end(), r.scalogram.key) == keys.end()) continue;
    auto [it, inserted] = grouped.try_emplace(r.subject_id, r.label, std::vector<FeatureVector>{});
    if (inserted) order.push_back(r.subject_id);
    auto fv = extract_features(r.scalogram, split, options);
    fv.subject_id = r.subject_id;
    it->second.second.push_back(std::move(fv));
  }
  std::vector<LabeledFeatures> out;
  for (const auto& id : order) {
    auto& [label, parts] = grouped.at(id);
    if (parts.size() != keys.size()) throw SchemaError("subject " + id + " lacks some of the requested trajectories");
    auto combined = combine_joints(parts);
    if (options.normalize) zscore(combined);
    out.push_back({std::move(combined), label});
  }
  return out;
}

MapArtifacts train_and_analyse(std::span<const LabeledFeatures> data, MapShape shape, const TrainSchedule& schedule,
                               std::optional<double> threshold) {
  if (data.empty()) throw ArgumentError("no feature vectors to train on");
  const auto values = feature_values(data);
  auto map = train(init_map(shape.rows, shape.cols, values.front().size(), schedule, values), values);
  auto um = umatrix(map);
  if (threshold) um.threshold = *threshold;
  auto field = attraction_field(um);
  auto assignment = clusters(um);
  auto labeled = label_map(map, data);
  return {std::move(map), std::move(um), std::move(field), std::move(assignment), std::move(labeled)};
}

void write_map_artifacts(const std::filesystem::path& dir, const MapArtifacts& a, std::span<const LabeledFeatures> data,
                         bool pgm) {
  save_map(dir / "som.json", a.map);
  write_with(dir / "umatrix.csv", [&](std::ostream& o) { write_matrix_csv(o, a.umatrix.heights); });
  if (pgm) write_pgm(dir / "umatrix.pgm", a.umatrix.heights);
  write_with(dir / "attraction.csv", [&](std::ostream& o) { write_attraction_csv(o, a.field); });
  write_with(dir / "contours.csv", [&](std::ostream& o) {
    o << "level,height\n";
    for (std::size_t i = 0; i < a.field.contour_levels.size(); ++i) o << i << ',' << format_double(a.field.contour_levels[i]) << '\n';
  });
  write_with(dir / "clusters.csv", [&](std::ostream& o) {
    write_clusters_csv(o, a.clusters, a.map.cols());
    o << "# threshold=" << format_double(a.umatrix.threshold) << '\n';
  });
  write_with(dir / "bmu.csv", [&](std::ostream& o) {
    o << "subject_id,label,node,row,col,cluster,node_label\n";
    for (const auto& d : data) {
      const auto node = best_match(a.map, d.features.values).node;
      const int cluster = a.clusters.ids[node];
      o << d.features.subject_id << ',' << d.label.str() << ',' << node << ',' << node / a.map.cols() << ','
        << node % a.map.cols() << ',' << (cluster == ClusterAssignment::kBorder ? std::string("border") : std::to_string(cluster))
        << ',' << a.labeled.node_labels[node].str() << '\n';
    }
  });
}

void write_report(const std::filesystem::path& dir, const EvalReport& report) {
  write_text_file(dir / "report.json", report_to_json(report));
  write_with(dir / "report.txt", [&](std::ostream& o) { write_report_table(o, report); });
  write_with(dir / "confusion.csv", [&](std::ostream& o) { write_confusion_csv(o, report); });
}

PipelineResult run_pipeline(const RunConfig& config) {
  stage("config", [&] {
    config.validate();
    return 0;
  });
  const auto& out = config.out_dir;
  std::filesystem::create_directories(out);
  std::filesystem::remove(out / "FAILED");

  try {
    write_text_file(out / "config.json", config_to_json(config));

    const auto subjects = stage("ingest", [&] {
      auto s = config.input ? ingest(*config.input) : generate(*config.synth);
      export_csv(out / "dataset.csv", s);
      return s;
    });

    const auto grid = config.scale_grid();
    stage("cwt", [&] {
      write_scalograms(out / "scalograms", subjects, config.parts, grid, config.cwt_options(), config.write_pgm);
      return 0;
    });

    const auto data = stage("features", [&] {
      auto d = dataset_features(subjects, config.parts, grid, config.cwt_options(), config.split, config.features);
      write_feature_csv(out / "features.csv", d, config.features);
      return d;
    });

    const auto artifacts = stage("train", [&] {
      auto a = train_and_analyse(data, config.map, config.schedule, config.threshold);
      write_map_artifacts(out, a, data, config.write_pgm);
      return a;
    });

    PipelineResult result;
    result.subjects = subjects.size();
    result.feature_dim = data.front().features.size();
    result.cluster_count = artifacts.clusters.count;
    if (config.loocv) {
      result.report = stage("eval", [&] {
        auto r = loocv(data, config.map, config.schedule);
        write_report(out, r);
        return r;
      });
    }

    std::ostringstream summary;
    summary << "subjects: " << result.subjects << '\n' << "feature length: " << result.feature_dim << '\n';
    summary << "clusters: " << result.cluster_count << " (threshold " << format_double(artifacts.umatrix.threshold) << ")\n";
    if (result.report) {
      summary << std::fixed << std::setprecision(4) << "recognition rate: " << result.report->recognition_rate << " +/- "
              << result.report->rate_dispersion << '\n'
              << "kappa: " << result.report->kappa << '\n';
    }
    result.summary = summary.str();
    write_text_file(out / "summary.txt", result.summary);
    return result;
  } catch (const StageError& e) {
    write_text_file(out / "FAILED", std::string(e.what()) + "\n");
    throw;
  } catch (const std::exception& e) {
    write_text_file(out / "FAILED", std::string("output: ") + e.what() + "\n");
    throw StageError("output", e.what());
  }
}

}  // namespace gaitsom
