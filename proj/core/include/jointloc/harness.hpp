#pragma once

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jointloc/joint.hpp"
#include "jointloc/scene.hpp"
#include "jointloc/sim.hpp"
#include "jointloc/solver.hpp"

namespace jointloc
{

/// Estimators the harness can run. Enumerator order is the canonical order of
/// records within an epoch.
enum class Algorithm
{
  ToaNls,
  ToaMap,
  Aoa,
  Joint,
};

/// "toa_nls", "toa_map", "aoa", "joint".
std::string_view to_string(Algorithm algorithm);

/// Accepts both the record spelling (toa_nls) and the CLI spelling (toa-nls).
/// @throws std::invalid_argument for anything else.
Algorithm parse_algorithm(std::string_view name);

/// Comma separated list, e.g. "joint,toa-nls,aoa".
std::set<Algorithm> parse_algorithm_list(std::string_view list);

/// Runs one estimator. ToA-only estimators ignore AoA input and vice versa.
Estimate run_algorithm(Algorithm algorithm, const Scene& scene, std::span<const ToaMeasurement> toa,
                       std::span<const AoaMeasurement> aoa, const SolverConfig& config);

struct TrialRecord
{
  std::string tp_label;
  int epoch = 0;
  Algorithm algorithm = Algorithm::Joint;
  Estimate est;
  double horiz_err_m = 0.0;

  friend bool operator==(const TrialRecord&, const TrialRecord&) = default;
};

/// Horizontal error summary: mean, RMS and nearest-rank 50th / 90th percentiles.
struct ErrorStats
{
  double mean_m = 0.0;
  double rms_m = 0.0;
  double p50_m = 0.0;
  double p90_m = 0.0;
  std::size_t count = 0;
};

struct CdfPoint
{
  double error_m = 0.0;
  double fraction = 0.0;
};

struct PerTpRow
{
  std::string tp_label;
  Algorithm algorithm = Algorithm::Joint;
  double mean_m = 0.0;
  double std_m = 0.0; // population (n-denominator) standard deviation
  std::size_t count = 0;
};

/// For every test point and epoch: synthesize one paired measurement set and
/// run every requested algorithm on it. Records are ordered by test point,
/// epoch, then algorithm. A solver that throws yields a record with
/// converged = false, start_index = -1, log_likelihood = -inf and the
/// configured box center as position.
std::vector<TrialRecord> run_monte_carlo(const Scene& scene, const TrialConfig& trials, const SolverConfig& solver,
                                         const std::set<Algorithm>& algorithms);

std::vector<double> errors_for(std::span<const TrialRecord> records, Algorithm algorithm);

/// Empirical CDF with the k/n convention; one point per distinct error value.
/// @throws std::invalid_argument on empty input.
std::vector<CdfPoint> error_cdf(std::span<const double> errors);

/// @throws std::invalid_argument on empty input.
ErrorStats summarize(std::span<const double> errors);

/// Nearest-rank percentile: the ceil(q n)-th smallest value, q in (0, 1].
double nearest_rank_percentile(std::span<const double> errors, double q);

/// Mean and population std of horizontal error per (test point, algorithm),
/// sorted by label then algorithm.
/// @throws std::invalid_argument on empty input.
std::vector<PerTpRow> per_tp_stats(std::span<const TrialRecord> records);

struct SweepPoint
{
  double eta_m = 0.0;
  std::vector<TrialRecord> records;
};

/// run_monte_carlo for {toa_nls, joint} at every sync std, reusing the trial
/// seed so all non-sync randomness is common across the sweep.
std::vector<SweepPoint> sync_sweep(const Scene& scene, const TrialConfig& trials, const SolverConfig& solver,
                                   std::span<const double> eta_values_m);

} // namespace jointloc
