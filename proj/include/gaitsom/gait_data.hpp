#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gaitsom {

enum class Joint { Hip, Knee, Ankle };

// Declared order is Right before Left, so combined hip vectors read (right, left).
enum class Side { Right, Left };

std::string_view to_string(Joint j);
std::string_view to_string(Side s);
Joint parse_joint(std::string_view text);
Side parse_side(std::string_view text);

/// Diagnostic class of a subject. Built-in kinds sort in declaration order,
/// free-form `Other` labels sort after them by name.
class ClassLabel {
public:
  enum class Kind { Normal, CpDp, CpLa, CpRa, CpLh, CpRh, Polio, SpinaBifida, Other };

  ClassLabel() = default;
  explicit ClassLabel(Kind kind);
  static ClassLabel other(std::string name);
  /// Accepts the canonical spellings ("Normal", "CP-dp", ...); anything else
  /// becomes Other(text). Empty text is rejected.
  static ClassLabel parse(std::string_view text);

  Kind kind() const noexcept { return kind_; }
  std::string str() const;

  friend bool operator==(const ClassLabel&, const ClassLabel&) = default;
  friend std::strong_ordering operator<=>(const ClassLabel&, const ClassLabel&) = default;

private:
  Kind kind_ = Kind::Normal;
  std::string other_;
};

struct TrajectoryKey {
  Joint joint = Joint::Hip;
  Side side = Side::Right;

  friend auto operator<=>(const TrajectoryKey&, const TrajectoryKey&) = default;
};

std::string to_string(TrajectoryKey key);

inline constexpr std::size_t kCanonicalGridSize = 101;
inline constexpr std::size_t kMinGridSize = 21;
inline constexpr double kMaxAbsAngle = 180.0;

/// One joint's sagittal angle over a gait cycle, sampled on a uniform grid
/// where sample k sits at k * 100 / (grid_size - 1) percent.
class GaitTrajectory {
public:
  GaitTrajectory(Joint joint, Side side, std::vector<double> samples_deg);

  Joint joint() const noexcept { return key_.joint; }
  Side side() const noexcept { return key_.side; }
  TrajectoryKey key() const noexcept { return key_; }
  std::size_t grid_size() const noexcept { return samples_.size(); }
  std::span<const double> samples() const noexcept { return samples_; }
  double pct_at(std::size_t k) const;
  /// Grid step in percent of cycle.
  double step() const noexcept { return 100.0 / static_cast<double>(samples_.size() - 1); }

  friend bool operator==(const GaitTrajectory&, const GaitTrajectory&) = default;

private:
  TrajectoryKey key_;
  std::vector<double> samples_;
};

/// Linear interpolation onto a new uniform grid; endpoints are preserved.
/// Returns an exact copy when the size is unchanged.
GaitTrajectory resample(const GaitTrajectory& traj, std::size_t new_grid_size);

/// Same as resample() but on raw samples, without the trajectory invariants.
std::vector<double> resample_samples(std::span<const double> samples, std::size_t new_grid_size);

class Subject {
public:
  Subject(std::string id, ClassLabel label, std::map<TrajectoryKey, GaitTrajectory> trajectories,
          std::map<std::string, std::string> meta = {});

  const std::string& id() const noexcept { return id_; }
  const ClassLabel& label() const noexcept { return label_; }
  const std::map<TrajectoryKey, GaitTrajectory>& trajectories() const noexcept { return trajectories_; }
  const std::map<std::string, std::string>& meta() const noexcept { return meta_; }
  std::size_t grid_size() const noexcept { return trajectories_.begin()->second.grid_size(); }

  const GaitTrajectory& at(TrajectoryKey key) const;
  bool has(TrajectoryKey key) const { return trajectories_.contains(key); }

  friend bool operator==(const Subject&, const Subject&) = default;

private:
  std::string id_;
  ClassLabel label_;
  std::map<TrajectoryKey, GaitTrajectory> trajectories_;
  std::map<std::string, std::string> meta_;
};

/// Reads `subject_id,label,joint,side,pct,angle_deg` rows. Subjects keep
/// their order of first appearance; trajectories on a non-canonical uniform
/// grid are resampled to 101 points.
std::vector<Subject> read_dataset_csv(std::istream& in);
std::vector<Subject> ingest_csv(const std::filesystem::path& path);

/// JSON manifest: array of {subject_id, label, trajectories: [{joint, side,
/// angle_deg: [...], pct?: [...]}], meta?: {...}}.
std::vector<Subject> read_dataset_json(std::istream& in);
std::vector<Subject> ingest_json(const std::filesystem::path& path);

/// Dispatches on the extension (.json → manifest, otherwise CSV).
std::vector<Subject> ingest(const std::filesystem::path& path);

void write_dataset_csv(std::ostream& out, std::span<const Subject> subjects);
void export_csv(const std::filesystem::path& path, std::span<const Subject> subjects);

}  // namespace gaitsom
