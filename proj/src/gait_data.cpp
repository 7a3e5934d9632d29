#include "gaitsom/gait_data.hpp"

#include "gaitsom/error.hpp"
#include "gaitsom/text_io.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace gaitsom {
namespace {

std::string lower(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

constexpr std::array<std::string_view, 8> kLabelNames = {"Normal", "CP-dp", "CP-la", "CP-ra",
                                                         "CP-lh",  "CP-rh", "Polio", "SpinaBifida"};

// Grid positions must sit on k * 100 / (n - 1) to within this many percent.
constexpr double kGridTolerance = 1e-6;

}  // namespace

std::string_view to_string(Joint j) {
  switch (j) {
    case Joint::Hip: return "hip";
    case Joint::Knee: return "knee";
    case Joint::Ankle: return "ankle";
  }
  return "?";
}

std::string_view to_string(Side s) { return s == Side::Left ? "left" : "right"; }

Joint parse_joint(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "hip") return Joint::Hip;
  if (t == "knee") return Joint::Knee;
  if (t == "ankle") return Joint::Ankle;
  throw ArgumentError("unknown joint '" + std::string(text) + "'");
}

Side parse_side(std::string_view text) {
  const auto t = lower(trim(text));
  if (t == "left" || t == "l") return Side::Left;
  if (t == "right" || t == "r") return Side::Right;
  throw ArgumentError("unknown side '" + std::string(text) + "'");
}

std::string to_string(TrajectoryKey key) {
  return std::string(to_string(key.joint)) + "-" + std::string(to_string(key.side));
}

ClassLabel::ClassLabel(Kind kind) : kind_(kind) {
  if (kind == Kind::Other) throw ArgumentError("use ClassLabel::other() for free-form labels");
}

ClassLabel ClassLabel::other(std::string name) {
  if (name.empty()) throw ArgumentError("empty class label");
  ClassLabel label;
  label.kind_ = Kind::Other;
  label.other_ = std::move(name);
  return label;
}

ClassLabel ClassLabel::parse(std::string_view text) {
  text = trim(text);
  if (text.empty()) throw ArgumentError("empty class label");
  for (std::size_t i = 0; i < kLabelNames.size(); ++i) {
    if (lower(text) == lower(kLabelNames[i])) return ClassLabel(static_cast<Kind>(i));
  }
  return other(std::string(text));
}

std::string ClassLabel::str() const {
  if (kind_ == Kind::Other) return other_;
  return std::string(kLabelNames[static_cast<std::size_t>(kind_)]);
}

GaitTrajectory::GaitTrajectory(Joint joint, Side side, std::vector<double> samples_deg)
    : key_{joint, side}, samples_(std::move(samples_deg)) {
  if (samples_.size() < kMinGridSize) {
    throw ArgumentError("trajectory " + to_string(key_) + " has " + std::to_string(samples_.size()) +
                        " samples, need at least " + std::to_string(kMinGridSize));
  }
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    if (!std::isfinite(samples_[k]) || std::abs(samples_[k]) > kMaxAbsAngle) {
      throw ArgumentError("trajectory " + to_string(key_) + " sample " + std::to_string(k) +
                          " is not a valid angle");
    }
  }
}

double GaitTrajectory::pct_at(std::size_t k) const {
  return static_cast<double>(k) * 100.0 / static_cast<double>(samples_.size() - 1);
}

std::vector<double> resample_samples(std::span<const double> samples, std::size_t new_grid_size) {
  if (new_grid_size < 2) throw ArgumentError("resample: grid size must be at least 2");
  if (samples.size() < 2) throw ArgumentError("resample: need at least 2 input samples");
  if (samples.size() == new_grid_size) return {samples.begin(), samples.end()};

  const std::size_t in_last = samples.size() - 1;
  const std::size_t out_last = new_grid_size - 1;
  std::vector<double> out(new_grid_size);
  for (std::size_t j = 0; j <= out_last; ++j) {
    // Position in input-sample units, computed from integers so that grid
    // points shared by both grids land exactly on an input sample.
    const std::size_t num = j * in_last;
    const std::size_t idx = num / out_last;
    const std::size_t rem = num % out_last;
    if (rem == 0) {
      out[j] = samples[idx];
    } else {
      const double frac = static_cast<double>(rem) / static_cast<double>(out_last);
      out[j] = std::lerp(samples[idx], samples[idx + 1], frac);
    }
  }
  return out;
}

GaitTrajectory resample(const GaitTrajectory& traj, std::size_t new_grid_size) {
  return GaitTrajectory(traj.joint(), traj.side(), resample_samples(traj.samples(), new_grid_size));
}

Subject::Subject(std::string id, ClassLabel label, std::map<TrajectoryKey, GaitTrajectory> trajectories,
                 std::map<std::string, std::string> meta)
    : id_(std::move(id)), label_(std::move(label)), trajectories_(std::move(trajectories)), meta_(std::move(meta)) {
  if (id_.empty()) throw SchemaError("subject with empty id");
  if (trajectories_.empty()) throw SchemaError("subject " + id_ + " has no trajectories");
  const auto n = trajectories_.begin()->second.grid_size();
  for (const auto& [key, traj] : trajectories_) {
    if (traj.grid_size() != n) throw SchemaError("subject " + id_ + " mixes grid sizes");
  }
}

const GaitTrajectory& Subject::at(TrajectoryKey key) const {
  auto it = trajectories_.find(key);
  if (it == trajectories_.end()) {
    throw ArgumentError("subject " + id_ + " has no " + to_string(key) + " trajectory");
  }
  return it->second;
}

namespace {

struct PendingTrajectory {
  std::vector<std::pair<double, double>> points;  // (pct, angle)
  std::vector<std::size_t> rows;
};

struct PendingSubject {
  std::string id;
  std::optional<ClassLabel> label;
  std::map<std::string, std::string> meta;
  std::map<TrajectoryKey, PendingTrajectory> trajectories;
};

// Sorts by pct, checks the grid is complete and uniform, returns angles on
// the canonical grid.
std::vector<double> finish_trajectory(const std::string& subject, TrajectoryKey key, PendingTrajectory& pending) {
  auto& pts = pending.points;
  std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t n = pts.size();
  const std::string where = "subject " + subject + " " + to_string(key);
  if (n < 2) throw SchemaError(where + ": fewer than 2 grid points");
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = static_cast<double>(k) * 100.0 / static_cast<double>(n - 1);
    if (std::abs(pts[k].first - expected) > kGridTolerance) {
      throw SchemaError(where + ": grid is not uniform over 0..100% (point " + std::to_string(k) + " at pct " +
                        format_double(pts[k].first) + ", expected " + format_double(expected) + ")");
    }
  }
  std::vector<double> angles(n);
  std::transform(pts.begin(), pts.end(), angles.begin(), [](const auto& p) { return p.second; });
  if (n == kCanonicalGridSize) return angles;
  return resample_samples(angles, kCanonicalGridSize);
}

std::vector<Subject> finish(std::vector<PendingSubject>& pending) {
  std::vector<Subject> subjects;
  subjects.reserve(pending.size());
  for (auto& p : pending) {
    if (!p.label) throw SchemaError("subject " + p.id + " has no label");
    std::map<TrajectoryKey, GaitTrajectory> trajs;
    for (auto& [key, pt] : p.trajectories) {
      auto angles = finish_trajectory(p.id, key, pt);
      try {
        trajs.emplace(key, GaitTrajectory(key.joint, key.side, std::move(angles)));
      } catch (const ArgumentError& e) {
        throw SchemaError("subject " + p.id + ": " + e.what());
      }
    }
    subjects.emplace_back(p.id, *p.label, std::move(trajs), std::move(p.meta));
  }
  return subjects;
}

}  // namespace

std::vector<Subject> read_dataset_csv(std::istream& in) {
  std::string line;
  std::size_t row = 1;
  if (!std::getline(in, line)) throw SchemaError("empty dataset file (header row required)");
  const auto header = split_csv_line(line);
  const std::array<std::string_view, 6> expected = {"subject_id", "label", "joint", "side", "pct", "angle_deg"};
  if (header.size() != expected.size() || !std::equal(header.begin(), header.end(), expected.begin())) {
    throw SchemaError("header must be subject_id,label,joint,side,pct,angle_deg");
  }

  std::vector<PendingSubject> pending;
  std::unordered_map<std::string, std::size_t> index;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 6) throw ParseError("expected 6 fields, got " + std::to_string(f.size()), row);
    if (f[0].empty()) throw ParseError("empty subject_id", row);
    if (f[1].empty()) throw SchemaError("row " + std::to_string(row) + ": missing label");

    TrajectoryKey key;
    try {
      key = {parse_joint(f[2]), parse_side(f[3])};
    } catch (const ArgumentError& e) {
      throw ParseError(e.what(), row);
    }
    const auto pct = parse_double(f[4]);
    if (!pct || !std::isfinite(*pct) || *pct < 0.0 || *pct > 100.0) throw ParseError("invalid pct '" + std::string(f[4]) + "'", row);
    const auto angle = parse_double(f[5]);
    if (!angle || !std::isfinite(*angle) || std::abs(*angle) > kMaxAbsAngle) {
      throw ParseError("invalid angle '" + std::string(f[5]) + "'", row);
    }

    const std::string id(f[0]);
    auto [it, inserted] = index.try_emplace(id, pending.size());
    if (inserted) pending.push_back(PendingSubject{id, {}, {}, {}});
    auto& subj = pending[it->second];
    const auto label = ClassLabel::parse(f[1]);
    if (subj.label && *subj.label != label) {
      throw SchemaError("row " + std::to_string(row) + ": subject " + id + " has conflicting labels");
    }
    subj.label = label;
    auto& traj = subj.trajectories[key];
    for (const auto& [p, a] : traj.points) {
      if (p == *pct) throw SchemaError("row " + std::to_string(row) + ": duplicate grid point");
    }
    traj.points.emplace_back(*pct, *angle);
    traj.rows.push_back(row);
  }
  if (pending.empty()) throw SchemaError("dataset has no rows");
  return finish(pending);
}

std::vector<Subject> ingest_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return read_dataset_csv(in);
}

std::vector<Subject> read_dataset_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(e.what());
  }
  if (!doc.is_array()) throw SchemaError("manifest must be an array of subjects");

  std::vector<PendingSubject> pending;
  std::unordered_map<std::string, std::size_t> index;
  try {
    for (const auto& s : doc) {
      const auto id = s.at("subject_id").get<std::string>();
      if (!s.contains("label") || s["label"].is_null() || s["label"].get<std::string>().empty()) {
        throw SchemaError("subject " + id + " has no label");
      }
      if (!index.try_emplace(id, pending.size()).second) throw SchemaError("duplicate subject " + id);
      PendingSubject p{id, ClassLabel::parse(s["label"].get<std::string>()), {}, {}};
      if (s.contains("meta")) {
        for (const auto& [k, v] : s["meta"].items()) p.meta[k] = v.is_string() ? v.get<std::string>() : v.dump();
      }
      for (const auto& t : s.at("trajectories")) {
        const TrajectoryKey key{parse_joint(t.at("joint").get<std::string>()), parse_side(t.at("side").get<std::string>())};
        if (p.trajectories.contains(key)) throw SchemaError("subject " + id + ": duplicate " + to_string(key));
        auto& pt = p.trajectories[key];
        const auto& angles = t.at("angle_deg");
        const std::size_t n = angles.size();
        for (std::size_t k = 0; k < n; ++k) {
          if (!angles[k].is_number()) throw ParseError("subject " + id + " " + to_string(key) + ": non-numeric angle at index " + std::to_string(k));
          const double a = angles[k].get<double>();
          if (!std::isfinite(a) || std::abs(a) > kMaxAbsAngle) {
            throw ParseError("subject " + id + " " + to_string(key) + ": invalid angle at index " + std::to_string(k));
          }
          double pct = n > 1 ? static_cast<double>(k) * 100.0 / static_cast<double>(n - 1) : 0.0;
          if (t.contains("pct")) {
            if (t["pct"].size() != n) throw SchemaError("subject " + id + ": pct and angle_deg lengths differ");
            pct = t["pct"][k].get<double>();
          }
          pt.points.emplace_back(pct, a);
        }
      }
      pending.push_back(std::move(p));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  } catch (const ArgumentError& e) {
    throw SchemaError(std::string("manifest: ") + e.what());
  }
  if (pending.empty()) throw SchemaError("manifest has no subjects");
  return finish(pending);
}

std::vector<Subject> ingest_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open " + path.string());
  return read_dataset_json(in);
}

std::vector<Subject> ingest(const std::filesystem::path& path) {
  return lower(path.extension().string()) == ".json" ? ingest_json(path) : ingest_csv(path);
}

void write_dataset_csv(std::ostream& out, std::span<const Subject> subjects) {
  out << "subject_id,label,joint,side,pct,angle_deg\n";
  for (const auto& s : subjects) {
    const auto label = s.label().str();
    for (const auto& [key, traj] : s.trajectories()) {
      const auto joint = to_string(key.joint);
      const auto side = to_string(key.side);
      for (std::size_t k = 0; k < traj.grid_size(); ++k) {
        out << s.id() << ',' << label << ',' << joint << ',' << side << ',' << format_double(traj.pct_at(k)) << ','
            << format_double(traj.samples()[k]) << '\n';
      }
    }
  }
}

void export_csv(const std::filesystem::path& path, std::span<const Subject> subjects) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot open " + path.string() + " for writing");
  write_dataset_csv(out, subjects);
}

}  // namespace gaitsom
