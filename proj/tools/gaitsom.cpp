// gaitsom: command-line front end. Every subcommand reads an optional JSON
// config, applies flag overrides, echoes the resolved config into its output
// directory and exits nonzero with a stage-qualified message on failure.

#include "gaitsom/config.hpp"
#include "gaitsom/error.hpp"
#include "gaitsom/pipeline.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace gaitsom;

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
};

struct Overrides {
  std::optional<std::size_t> scales;
  std::string map;
  std::string level;
  std::optional<double> threshold;
  std::string parts;
  std::optional<double> stance;
  std::optional<std::size_t> epochs;
  bool pgm = false;
  bool no_pgm = false;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
  cmd->add_option("--config", c.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--seed", c.seed, "Seed for the generator and SOM training");
  auto* out = cmd->add_option("--out", c.out, "Output directory");
  if (out_required) out->required();
}

MapShape parse_map(const std::string& text) {
  const auto x = text.find_first_of("xX");
  if (x == std::string::npos) throw ArgumentError("--map expects ROWSxCOLS, got '" + text + "'");
  try {
    return {std::stoul(text.substr(0, x)), std::stoul(text.substr(x + 1))};
  } catch (const std::exception&) {
    throw ArgumentError("--map expects ROWSxCOLS, got '" + text + "'");
  }
}

std::vector<TrajectoryKey> parse_parts(const std::string& text) {
  std::vector<TrajectoryKey> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_key(item));
  }
  if (out.empty()) throw ArgumentError("--parts is empty");
  return out;
}

RunConfig resolve(const Common& c, const Overrides& o) {
  RunConfig cfg = c.config.empty() ? RunConfig{} : load_config(c.config);
  if (c.seed) cfg.apply_seed(*c.seed);
  if (!c.out.empty()) cfg.out_dir = c.out;
  if (o.scales) cfg.scale_count = *o.scales;
  if (!o.map.empty()) cfg.map = parse_map(o.map);
  if (!o.level.empty()) cfg.split.level = parse_level(o.level);
  if (o.threshold) cfg.threshold = o.threshold;
  if (!o.parts.empty()) cfg.parts = parse_parts(o.parts);
  if (o.stance) cfg.split.stance_fraction = *o.stance;
  if (o.epochs) cfg.schedule.epochs = *o.epochs;
  if (o.pgm) cfg.write_pgm = true;
  if (o.no_pgm) cfg.write_pgm = false;
  return cfg;
}

void add_pgm_flags(CLI::App* cmd, Overrides& o) {
  auto* on = cmd->add_flag("--pgm", o.pgm, "Write PGM images");
  cmd->add_flag("--no-pgm", o.no_pgm, "Skip PGM images")->excludes(on);
}

void echo_config(const RunConfig& cfg) { write_text_file(cfg.out_dir / "config.json", config_to_json(cfg)); }

template <typename Fn>
int guarded(const char* stage, Fn&& fn) {
  try {
    fn();
    return 0;
  } catch (const StageError& e) {
    std::cerr << "gaitsom: " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "gaitsom: " << stage << ": " << e.what() << '\n';
  }
  return 1;
}

std::vector<LabeledFeatures> read_features(const std::string& path) { return read_feature_csv(std::filesystem::path(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wavelet + self-organizing map analysis of gait trajectories"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "gaitsom 1.0.0");

  Common c;
  Overrides o;
  std::string input;
  std::string test_input;
  std::string model;
  std::string preset = "normal_vs_spastic";
  std::optional<std::size_t> per_class;
  bool no_loocv = false;

  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a CSV or JSON dataset and write it as canonical CSV");
  add_common(ingest_cmd, c);
  ingest_cmd->add_option("--input", input, "Dataset (.csv or .json manifest)")->required()->check(CLI::ExistingFile);

  auto* synth_cmd = app.add_subcommand("synth", "Generate a labeled synthetic dataset");
  add_common(synth_cmd, c);
  synth_cmd->add_option("--preset", preset, "normal_vs_spastic or laterality (ignored when the config has a synth section)")
      ->check(CLI::IsMember({"normal_vs_spastic", "laterality"}));
  synth_cmd->add_option("-n,--per-class", per_class, "Subjects per class");

  auto* cwt_cmd = app.add_subcommand("cwt", "Compute scalograms for a dataset");
  add_common(cwt_cmd, c);
  cwt_cmd->add_option("--input", input, "Dataset CSV or JSON")->required()->check(CLI::ExistingFile);
  cwt_cmd->add_option("--scales", o.scales, "Number of log-spaced scales");
  cwt_cmd->add_option("--parts", o.parts, "Comma-separated joint-side list, e.g. hip-right,hip-left");
  add_pgm_flags(cwt_cmd, o);

  auto* feat_cmd = app.add_subcommand("features", "Extract feature vectors from a scalogram directory");
  add_common(feat_cmd, c);
  feat_cmd->add_option("--input", input, "Directory written by 'cwt'")->required()->check(CLI::ExistingDirectory);
  feat_cmd->add_option("--level", o.level, "high or low");
  feat_cmd->add_option("--parts", o.parts, "Comma-separated joint-side list");
  feat_cmd->add_option("--stance", o.stance, "Stance fraction of the cycle");

  auto* train_cmd = app.add_subcommand("train", "Train a SOM and derive U-Matrix, attraction field and clusters");
  add_common(train_cmd, c);
  train_cmd->add_option("--input", input, "Feature CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--map", o.map, "Map size ROWSxCOLS");
  train_cmd->add_option("--threshold", o.threshold, "U-Matrix cluster threshold");
  train_cmd->add_option("--epochs", o.epochs, "Training epochs");
  add_pgm_flags(train_cmd, o);

  auto* eval_cmd = app.add_subcommand("eval", "Leave-one-out evaluation, or test-set evaluation with --model");
  add_common(eval_cmd, c);
  eval_cmd->add_option("--input", input, "Training feature CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--map", o.map, "Map size ROWSxCOLS");
  eval_cmd->add_option("--epochs", o.epochs, "Training epochs");
  auto* model_opt = eval_cmd->add_option("--model", model, "Trained som.json to label with --input")->check(CLI::ExistingFile);
  eval_cmd->add_option("--test", test_input, "Independent test feature CSV")->check(CLI::ExistingFile)->needs(model_opt);

  auto* run_cmd = app.add_subcommand("run", "Run the whole pipeline");
  add_common(run_cmd, c, false);
  run_cmd->add_option("--input", input, "Dataset instead of the config's synth section")->check(CLI::ExistingFile);
  run_cmd->add_option("--scales", o.scales, "Number of log-spaced scales");
  run_cmd->add_option("--map", o.map, "Map size ROWSxCOLS");
  run_cmd->add_option("--level", o.level, "high or low");
  run_cmd->add_option("--threshold", o.threshold, "U-Matrix cluster threshold");
  run_cmd->add_option("--parts", o.parts, "Comma-separated joint-side list");
  run_cmd->add_option("--epochs", o.epochs, "Training epochs");
  run_cmd->add_flag("--no-loocv", no_loocv, "Skip leave-one-out evaluation");
  add_pgm_flags(run_cmd, o);

  CLI11_PARSE(app, argc, argv);

  if (ingest_cmd->parsed()) {
    return guarded("ingest", [&] {
      auto cfg = resolve(c, o);
      cfg.input = input;
      cfg.synth.reset();
      const auto subjects = ingest(input);
      echo_config(cfg);
      export_csv(cfg.out_dir / "dataset.csv", subjects);
      std::size_t trajectories = 0;
      for (const auto& s : subjects) trajectories += s.trajectories().size();
      std::cout << subjects.size() << " subjects, " << trajectories << " trajectories\n";
    });
  }

  if (synth_cmd->parsed()) {
    return guarded("synth", [&] {
      auto cfg = resolve(c, o);
      if (!cfg.synth) {
        cfg.synth = preset == "laterality" ? presets::laterality(10, cfg.seed) : presets::normal_vs_spastic(10, cfg.seed);
      }
      if (per_class) cfg.synth->n_subjects = *per_class;
      cfg.input.reset();
      const auto subjects = generate(*cfg.synth);
      echo_config(cfg);
      export_csv(cfg.out_dir / "dataset.csv", subjects);
      std::cout << subjects.size() << " subjects written to " << (cfg.out_dir / "dataset.csv").string() << '\n';
    });
  }

  if (cwt_cmd->parsed()) {
    return guarded("cwt", [&] {
      auto cfg = resolve(c, o);
      cfg.input = input;
      cfg.synth.reset();
      cfg.morlet.validate();
      const auto subjects = ingest(input);
      echo_config(cfg);
      write_scalograms(cfg.out_dir, subjects, cfg.parts, cfg.scale_grid(), cfg.cwt_options(), cfg.write_pgm);
      std::cout << subjects.size() << " subjects x " << cfg.parts.size() << " trajectories transformed\n";
    });
  }

  if (feat_cmd->parsed()) {
    return guarded("features", [&] {
      auto cfg = resolve(c, o);
      cfg.split.validate();
      cfg.features.validate();
      const auto records = read_scalograms(input);
      const auto rows = features_from_scalograms(records, cfg.parts, cfg.split, cfg.features);
      echo_config(cfg);
      write_feature_csv(cfg.out_dir / "features.csv", rows, cfg.features);
      std::cout << rows.size() << " vectors of length " << rows.front().features.size() << '\n';
    });
  }

  if (train_cmd->parsed()) {
    return guarded("train", [&] {
      auto cfg = resolve(c, o);
      cfg.schedule.validate(cfg.map.rows, cfg.map.cols);
      const auto data = read_features(input);
      const auto a = train_and_analyse(data, cfg.map, cfg.schedule, cfg.threshold);
      echo_config(cfg);
      write_map_artifacts(cfg.out_dir, a, data, cfg.write_pgm);
      std::cout << "clusters: " << a.clusters.count << " (threshold " << format_double(a.umatrix.threshold) << ")\n";
    });
  }

  if (eval_cmd->parsed()) {
    return guarded("eval", [&] {
      auto cfg = resolve(c, o);
      const auto data = read_features(input);
      EvalReport report;
      if (!model.empty()) {
        if (test_input.empty()) throw ArgumentError("--model needs --test");
        const auto map = load_map(model);
        const auto lm = label_map(map, data);
        report = evaluate(lm, read_features(test_input));
      } else {
        cfg.schedule.validate(cfg.map.rows, cfg.map.cols);
        report = loocv(data, cfg.map, cfg.schedule);
      }
      echo_config(cfg);
      write_report(cfg.out_dir, report);
      write_report_table(std::cout, report);
    });
  }

  if (run_cmd->parsed()) {
    return guarded("run", [&] {
      auto cfg = resolve(c, o);
      if (!input.empty()) {
        cfg.input = input;
        cfg.synth.reset();
      }
      if (no_loocv) cfg.loocv = false;
      const auto result = run_pipeline(cfg);
      std::cout << result.summary;
    });
  }
  return 0;
}
