#include "gaitsom/config.hpp"

#include "gaitsom/error.hpp"
#include "json_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <initializer_list>

namespace gaitsom {
namespace {

using nlohmann::json;

std::string lower(std::string_view text) {
  std::string out(trim(text));
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

void check_keys(const json& j, std::initializer_list<std::string_view> allowed, std::string_view section) {
  if (!j.is_object()) throw ArgumentError("config: '" + std::string(section) + "' must be an object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ArgumentError("config: unknown key '" + key + "' in '" + std::string(section) + "'");
    }
  }
}

template <typename T>
void read(const json& j, std::string_view key, T& out) {
  const auto it = j.find(std::string(key));
  if (it != j.end() && !it->is_null()) out = it->get<T>();
}

json perturbation_to_json(const ClassSpec& c) {
  const auto& p = c.perturbation;
  return {{"label", c.label.str()},
          {"hf_amplitude", p.hf_amplitude},
          {"hf_phase_region", to_string(p.hf_phase_region)},
          {"asymmetry_gain", p.asymmetry_gain},
          {"timing_shift", p.timing_shift},
          {"jitter_sd", p.jitter_sd}};
}

}  // namespace

std::string_view to_string(Kernel k) { return k == Kernel::Gaussian ? "gaussian" : "bubble"; }
std::string_view to_string(InitMethod m) { return m == InitMethod::SampleInit ? "sample" : "random_small"; }
std::string_view to_string(Metric m) { return m == Metric::Euclidean ? "euclidean" : "manhattan"; }
std::string_view to_string(Decay d) { return d == Decay::Linear ? "linear" : "constant"; }
std::string_view to_string(PhaseRegion r) {
  switch (r) {
    case PhaseRegion::Stance: return "stance";
    case PhaseRegion::Swing: return "swing";
    case PhaseRegion::Both: return "both";
  }
  return "?";
}

Kernel parse_kernel(std::string_view text) {
  const auto t = lower(text);
  if (t == "gaussian") return Kernel::Gaussian;
  if (t == "bubble") return Kernel::Bubble;
  throw ArgumentError("unknown kernel '" + std::string(text) + "'");
}

InitMethod parse_init(std::string_view text) {
  const auto t = lower(text);
  if (t == "sample" || t == "sample_init") return InitMethod::SampleInit;
  if (t == "random_small" || t == "random") return InitMethod::RandomSmall;
  throw ArgumentError("unknown init method '" + std::string(text) + "'");
}

Metric parse_metric(std::string_view text) {
  const auto t = lower(text);
  if (t == "euclidean") return Metric::Euclidean;
  if (t == "manhattan") return Metric::Manhattan;
  throw ArgumentError("unknown metric '" + std::string(text) + "'");
}

Decay parse_decay(std::string_view text) {
  const auto t = lower(text);
  if (t == "linear") return Decay::Linear;
  if (t == "constant") return Decay::Constant;
  throw ArgumentError("unknown decay '" + std::string(text) + "'");
}

PhaseRegion parse_phase_region(std::string_view text) {
  const auto t = lower(text);
  if (t == "stance") return PhaseRegion::Stance;
  if (t == "swing") return PhaseRegion::Swing;
  if (t == "both") return PhaseRegion::Both;
  throw ArgumentError("unknown phase region '" + std::string(text) + "'");
}

json schedule_to_json(const TrainSchedule& s) {
  json j{{"epochs", s.epochs},
         {"alpha0", s.alpha0},
         {"alpha_decay", to_string(s.alpha_decay)},
         {"sigma0", nullptr},
         {"sigma_final", s.sigma_final},
         {"sigma_decay", to_string(s.sigma_decay)},
         {"kernel", to_string(s.kernel)},
         {"init", to_string(s.init)},
         {"metric", to_string(s.metric)},
         {"seed", s.rng_seed}};
  if (s.sigma0) j["sigma0"] = *s.sigma0;
  return j;
}

void schedule_from_json(const json& j, TrainSchedule& s) {
  read(j, "epochs", s.epochs);
  read(j, "alpha0", s.alpha0);
  read(j, "sigma_final", s.sigma_final);
  read(j, "seed", s.rng_seed);
  if (j.contains("sigma0") && !j["sigma0"].is_null()) s.sigma0 = j["sigma0"].get<double>();
  if (j.contains("alpha_decay")) s.alpha_decay = parse_decay(j["alpha_decay"].get<std::string>());
  if (j.contains("sigma_decay")) s.sigma_decay = parse_decay(j["sigma_decay"].get<std::string>());
  if (j.contains("kernel")) s.kernel = parse_kernel(j["kernel"].get<std::string>());
  if (j.contains("init")) s.init = parse_init(j["init"].get<std::string>());
  if (j.contains("metric")) s.metric = parse_metric(j["metric"].get<std::string>());
}

json synth_to_json(const SynthSpec& s) {
  json j;
  j["n_subjects"] = s.n_subjects;
  j["seed"] = s.rng_seed;
  j["grid_size"] = s.grid_size;
  auto& joints = j["joints"] = json::array();
  for (Joint joint : s.joints) joints.push_back(to_string(joint));
  auto& classes = j["classes"] = json::array();
  for (const auto& c : s.classes) classes.push_back(perturbation_to_json(c));
  auto& templates = j["templates"] = json::object();
  for (const auto& [joint, harmonics] : s.templates) {
    auto& arr = templates[std::string(to_string(joint))] = json::array();
    for (const auto& h : harmonics) arr.push_back({h.index, h.amplitude, h.phase});
  }
  return j;
}

void synth_from_json(const json& j, SynthSpec& s) {
  check_keys(j, {"preset", "n_subjects", "seed", "grid_size", "joints", "classes", "templates"}, "synth");
  if (j.contains("preset")) {
    const auto name = lower(j["preset"].get<std::string>());
    if (name == "normal_vs_spastic") {
      s = presets::normal_vs_spastic(s.n_subjects, s.rng_seed);
    } else if (name == "laterality") {
      s = presets::laterality(s.n_subjects, s.rng_seed);
    } else {
      throw ArgumentError("config: unknown synth preset '" + name + "'");
    }
  }
  read(j, "n_subjects", s.n_subjects);
  read(j, "seed", s.rng_seed);
  read(j, "grid_size", s.grid_size);
  if (j.contains("joints")) {
    s.joints.clear();
    for (const auto& name : j["joints"]) s.joints.push_back(parse_joint(name.get<std::string>()));
  }
  if (j.contains("classes")) {
    s.classes.clear();
    for (const auto& c : j["classes"]) {
      check_keys(c, {"label", "hf_amplitude", "hf_phase_region", "asymmetry_gain", "timing_shift", "jitter_sd"}, "synth.classes");
      ClassSpec spec{ClassLabel::parse(c.at("label").get<std::string>()), {}};
      auto& p = spec.perturbation;
      read(c, "hf_amplitude", p.hf_amplitude);
      read(c, "asymmetry_gain", p.asymmetry_gain);
      read(c, "timing_shift", p.timing_shift);
      read(c, "jitter_sd", p.jitter_sd);
      if (c.contains("hf_phase_region")) p.hf_phase_region = parse_phase_region(c["hf_phase_region"].get<std::string>());
      s.classes.push_back(std::move(spec));
    }
  }
  if (j.contains("templates")) {
    for (const auto& [name, arr] : j["templates"].items()) {
      std::vector<Harmonic> harmonics;
      for (const auto& h : arr) harmonics.push_back({h.at(0).get<int>(), h.at(1).get<double>(), h.at(2).get<double>()});
      s.templates[parse_joint(name)] = std::move(harmonics);
    }
  }
}

TrajectoryKey parse_key(std::string_view text) {
  const auto dash = text.find('-');
  if (dash == std::string_view::npos) throw ArgumentError("expected joint-side, got '" + std::string(text) + "'");
  return {parse_joint(text.substr(0, dash)), parse_side(text.substr(dash + 1))};
}

void RunConfig::apply_seed(std::uint64_t value) {
  seed = value;
  schedule.rng_seed = value;
  if (synth) synth->rng_seed = value;
}

void RunConfig::validate() const {
  if (!input && !synth) throw ArgumentError("config: either 'input' or 'synth' is required");
  if (input && synth) throw ArgumentError("config: 'input' and 'synth' are mutually exclusive");
  if (synth) synth->validate();
  morlet.validate();
  if (!(scale_min >= 1.0) || !(scale_max <= 25.0)) throw ArgumentError("config: scales must lie within [1, 25]");
  (void)scale_grid();
  split.validate();
  features.validate();
  if (scale_count < features.level_size) throw ArgumentError("config: scale_count is smaller than the level size");
  if (parts.empty()) throw ArgumentError("config: at least one feature part is required");
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t k = 0; k < i; ++k) {
      if (parts[i] == parts[k]) throw ArgumentError("config: duplicate feature part " + to_string(parts[i]));
    }
  }
  if (synth) {
    for (const auto& key : parts) {
      if (std::find(synth->joints.begin(), synth->joints.end(), key.joint) == synth->joints.end()) {
        throw ArgumentError("config: feature part " + to_string(key) + " is not generated by synth");
      }
    }
  }
  if (map.rows * map.cols < 4 || map.rows == 0 || map.cols == 0) throw ArgumentError("config: map needs rows * cols >= 4");
  schedule.validate(map.rows, map.cols);
  if (threshold && !std::isfinite(*threshold)) throw ArgumentError("config: threshold must be finite");
}

RunConfig parse_config(std::string_view json_text) {
  RunConfig c;
  try {
    const auto j = json::parse(json_text);
    check_keys(j, {"seed", "input", "synth", "wavelet", "features", "som", "clusters", "eval", "output"}, "root");
    if (j.contains("input") && !j["input"].is_null()) c.input = j["input"].get<std::string>();
    if (j.contains("synth") && !j["synth"].is_null()) {
      c.synth = SynthSpec{};
      synth_from_json(j["synth"], *c.synth);
    }
    if (j.contains("wavelet")) {
      const auto& w = j["wavelet"];
      check_keys(w, {"nu0", "truncation_radius", "scale_min", "scale_max", "scale_count", "boundary"}, "wavelet");
      read(w, "nu0", c.morlet.nu0);
      read(w, "truncation_radius", c.morlet.truncation_radius);
      read(w, "scale_min", c.scale_min);
      read(w, "scale_max", c.scale_max);
      read(w, "scale_count", c.scale_count);
      if (w.contains("boundary")) {
        const auto b = lower(w["boundary"].get<std::string>());
        if (b == "zero" || b == "zero_pad") {
          c.boundary = Boundary::ZeroPad;
        } else if (b == "periodic") {
          c.boundary = Boundary::Periodic;
        } else {
          throw ArgumentError("config: unknown boundary '" + b + "'");
        }
      }
    }
    if (j.contains("features")) {
      const auto& f = j["features"];
      check_keys(f, {"stance_fraction", "level", "level_size", "time_samples", "time_step_pct", "normalize", "parts"}, "features");
      read(f, "stance_fraction", c.split.stance_fraction);
      read(f, "level_size", c.features.level_size);
      read(f, "time_samples", c.features.time_samples);
      read(f, "time_step_pct", c.features.time_step_pct);
      read(f, "normalize", c.features.normalize);
      if (f.contains("level")) c.split.level = parse_level(f["level"].get<std::string>());
      if (f.contains("parts")) {
        c.parts.clear();
        for (const auto& p : f["parts"]) c.parts.push_back(parse_key(p.get<std::string>()));
      }
    }
    if (j.contains("som")) {
      const auto& s = j["som"];
      check_keys(s, {"rows", "cols", "epochs", "alpha0", "alpha_decay", "sigma0", "sigma_final", "sigma_decay", "kernel", "init", "metric"}, "som");
      read(s, "rows", c.map.rows);
      read(s, "cols", c.map.cols);
      schedule_from_json(s, c.schedule);
    }
    if (j.contains("clusters")) {
      check_keys(j["clusters"], {"threshold"}, "clusters");
      if (j["clusters"].contains("threshold") && !j["clusters"]["threshold"].is_null()) {
        c.threshold = j["clusters"]["threshold"].get<double>();
      }
    }
    if (j.contains("eval")) {
      check_keys(j["eval"], {"loocv"}, "eval");
      read(j["eval"], "loocv", c.loocv);
    }
    if (j.contains("output")) {
      check_keys(j["output"], {"dir", "pgm"}, "output");
      if (j["output"].contains("dir")) c.out_dir = j["output"]["dir"].get<std::string>();
      read(j["output"], "pgm", c.write_pgm);
    }
    // A root seed overrides the generator and training seeds; without one they keep their own.
    if (j.contains("seed")) c.apply_seed(j["seed"].get<std::uint64_t>());
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("config: ") + e.what());
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) { return parse_config(read_text_file(path)); }

std::string config_to_json(const RunConfig& c) {
  json j;
  j["seed"] = c.seed;
  j["input"] = c.input ? json(c.input->string()) : json(nullptr);
  j["synth"] = c.synth ? synth_to_json(*c.synth) : json(nullptr);
  j["wavelet"] = {{"nu0", c.morlet.nu0},
                  {"truncation_radius", c.morlet.truncation_radius},
                  {"scale_min", c.scale_min},
                  {"scale_max", c.scale_max},
                  {"scale_count", c.scale_count},
                  {"boundary", c.boundary == Boundary::ZeroPad ? "zero" : "periodic"}};
  auto parts = json::array();
  for (const auto& p : c.parts) parts.push_back(to_string(p));
  j["features"] = {{"stance_fraction", c.split.stance_fraction},
                   {"level", to_string(c.split.level)},
                   {"level_size", c.features.level_size},
                   {"time_samples", c.features.time_samples},
                   {"time_step_pct", c.features.time_step_pct},
                   {"normalize", c.features.normalize},
                   {"parts", parts}};
  auto som = schedule_to_json(c.schedule);
  som.erase("seed");
  som["rows"] = c.map.rows;
  som["cols"] = c.map.cols;
  j["som"] = som;
  j["clusters"] = {{"threshold", c.threshold ? json(*c.threshold) : json(nullptr)}};
  j["eval"] = {{"loocv", c.loocv}};
  j["output"] = {{"dir", c.out_dir.string()}, {"pgm", c.write_pgm}};
  return j.dump(2) + "\n";
}

}  // namespace gaitsom
