#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "jointloc/harness.hpp"
#include "jointloc/scene.hpp"
#include "jointloc/sim.hpp"
#include "jointloc/solver.hpp"

namespace jointloc
{

/// Malformed input file. CSV errors carry the 1-based line number in the message.
class ParseError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Scene files (JSON)
//
//   {
//     "world_bounds": {"min_m": [x, y, z], "max_m": [x, y, z]},
//     "toa_locators": [{"id": "...", "pos_m": [x, y, z]}],
//     "aoa_locators": [{"id": "...", "pos_m": [...], "yaw_pitch_roll_rad": [...], "kappa": k}],
//     "toa_noise": {"sigma2_m2": s,
//                   "bias": [{"weight": w, "mean_m": m, "std_m": s}, ...]      // shared
//                        or {"<locator id>": [...], "*": [...]}},              // per locator, "*" = shared
//     "solver": {...}                                                          // optional, see SolverConfig
//   }
// ---------------------------------------------------------------------------

struct SceneFile
{
  Scene scene;
  SolverConfig solver;
};

/// Parses and validates a scene. Solver fields that are absent take their
/// defaults, with bounds = world_bounds inflated by 2 m.
SceneFile parse_scene_file(std::string_view json_text);
SceneFile read_scene_file(const std::filesystem::path& path);

std::string scene_to_json(const Scene& scene, const std::optional<SolverConfig>& solver = std::nullopt);

// ---------------------------------------------------------------------------
// Test points (CSV): label,x_m,y_m,z_m
// ---------------------------------------------------------------------------

std::vector<TestPoint> parse_test_points(std::istream& in);
std::vector<TestPoint> read_test_points(const std::filesystem::path& path);
void write_test_points(std::ostream& out, std::span<const TestPoint> points);

// ---------------------------------------------------------------------------
// Measurements (CSV): epoch_id,tp_label,locator_id,type,value_m,ux,uy,uz,kappa
// ToA rows fill value_m; AoA rows fill ux,uy,uz and optionally kappa.
// ---------------------------------------------------------------------------

struct RecordedEpoch
{
  long long epoch_id = 0;
  std::string tp_label;
  std::vector<ToaMeasurement> toa;
  std::vector<AoaMeasurement> aoa;
};

RecordedEpoch to_recorded(const Epoch& epoch, long long epoch_id);

void write_measurements(std::ostream& out, std::span<const RecordedEpoch> epochs);

/// Groups rows by epoch_id in order of first appearance.
std::vector<RecordedEpoch> parse_measurements(std::istream& in);

// ---------------------------------------------------------------------------
// Trial records (CSV)
// tp_label,epoch,algorithm,x_m,y_m,z_m,tau_m,log_likelihood,converged,iterations,start_index,horiz_err_m
// ---------------------------------------------------------------------------

void write_records(std::ostream& out, std::span<const TrialRecord> records);
std::vector<TrialRecord> parse_records(std::istream& in);

// Estimates from `solve` (CSV)
// epoch_id,tp_label,algorithm,x_m,y_m,z_m,tau_m,log_likelihood,converged,iterations,start_index
struct EstimateRow
{
  long long epoch_id = 0;
  std::string tp_label;
  Algorithm algorithm = Algorithm::Joint;
  Estimate est;
};

void write_estimates(std::ostream& out, std::span<const EstimateRow> rows);

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

/// {"<algorithm>": {"mean_m", "rms_m", "p50_m", "p90_m", "count"}, ...}
std::string summary_json(std::span<const TrialRecord> records, const std::set<Algorithm>& algorithms);

/// {"<algorithm>": [[error_m, fraction], ...], ...}
std::string cdf_json(std::span<const TrialRecord> records, const std::set<Algorithm>& algorithms);

/// tp_label,algorithm,mean_m,std_m,count
void write_per_tp(std::ostream& out, std::span<const PerTpRow> rows);

/// {"eta_m": [...], "results": [{"eta_m": e, "<algorithm>": {"summary": {...}, "cdf": [...]}}]}
std::string sweep_json(std::span<const SweepPoint> sweep);

/// records.csv, summary.json, cdf.json and per_tp.csv under `dir` (created if needed).
void write_evaluation(const std::filesystem::path& dir, std::span<const TrialRecord> records,
                      const std::set<Algorithm>& algorithms);

/// sweep.json and sweep_summary.csv under `dir`.
void write_sweep(const std::filesystem::path& dir, std::span<const SweepPoint> sweep);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

} // namespace jointloc
