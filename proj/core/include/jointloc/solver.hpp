#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "jointloc/geometry.hpp"
#include "jointloc/measurements.hpp"

namespace jointloc
{

/// Settings for the multi-start bounded local optimizer shared by every estimator.
struct SolverConfig
{
  int starts = 16;
  int max_iters = 200;
  double gradient_tolerance = 1e-8;
  double step_initial = 1.0; // meters; caps the first step of each local search
  Box bounds;                // feasible positions
  double tau_min = -100.0;   // meters
  double tau_max = 100.0;
  std::uint64_t seed = 0;
  /// Solve in the horizontal plane at this height (2-D + tau).
  std::optional<double> fixed_z;

  /// Defaults with the position box set to `world` inflated by 2 m.
  static SolverConfig for_world(const Box& world);

  /// @throws std::invalid_argument on non-positive counts/tolerances or empty bounds.
  void validate() const;
};

/// Solver output. `log_likelihood` is the maximized objective; for the
/// least-squares estimator it is the negated sum of squared residuals.
struct Estimate
{
  Point3 position;
  std::optional<TransmitTime> tau;
  double log_likelihood = 0.0;
  bool converged = false;
  int iterations = 0;
  int start_index = 0;

  friend bool operator==(const Estimate&, const Estimate&) = default;
};

/// Objective to maximize. Fills `grad` when it is non-null. May throw
/// DegeneratePositionError or return a non-finite value at infeasible points;
/// the optimizer treats both as -infinity.
using Objective = std::function<double(const Eigen::VectorXd& v, Eigen::VectorXd* grad)>;

struct LocalSearchOptions
{
  int max_iters = 200;
  double gradient_tolerance = 1e-8;
  double step_initial = 1.0;
};

struct LocalSearchResult
{
  Eigen::VectorXd argmax;
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
};

/// Projected quasi-Newton (BFGS) ascent with Armijo backtracking inside the box
/// [lower, upper]. Accepted iterates never decrease the objective. Stops when the
/// projected gradient's max-norm falls below the tolerance, or when no ascent
/// step is representable in double precision (both report converged), or after
/// max_iters (not converged). If `trace` is given it receives the objective at
/// every accepted iterate, starting with the initial point.
LocalSearchResult maximize_bounded(const Objective& objective, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const LocalSearchOptions& options, std::vector<double>* trace = nullptr);

struct MultiStartResult
{
  LocalSearchResult best;
  int start_index = 0;
};

/// Runs maximize_bounded from every start. Strictly greater objective wins;
/// ties go to the lower start index.
MultiStartResult maximize_multistart(const Objective& objective, std::span<const Eigen::VectorXd> starts,
                                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                     const LocalSearchOptions& options);

/// Initial positions: box center, the 8 box corners, then uniform draws seeded
/// by config.seed, truncated or extended to config.starts entries.
std::vector<Eigen::Vector3d> initial_positions(const SolverConfig& config);

/// Lower/upper vectors for the variable layout [x, y, z] or [x, y, z, tau].
std::pair<Eigen::VectorXd, Eigen::VectorXd> variable_bounds(const SolverConfig& config, bool with_tau);

LocalSearchOptions local_options(const SolverConfig& config);

} // namespace jointloc
