#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "jointloc/geometry.hpp"
#include "jointloc/measurements.hpp"
#include "jointloc/solver.hpp"

namespace jointloc
{

/// AoA measurements resolved against their locators. Each term is the
/// von Mises-Fisher log density of the predicted direction u_b(x) with the
/// measured direction as mean:
///   ln c(kappa_b) + kappa_b * u_hat_b^T Omega_b^T (x - l_b) / |x - l_b|.
class AoaProblem
{
public:
  AoaProblem(std::span<const AoaLocator> locators, std::span<const AoaMeasurement> measurements);

  std::size_t size() const { return terms_.size(); }

  /// Number of distinct locators contributing a bearing.
  std::size_t distinct_locators() const { return distinct_; }

  /// @throws DegeneratePositionError when x coincides with a locator.
  double log_likelihood(const Eigen::Vector3d& x, Eigen::Vector3d* grad_x = nullptr) const;

private:
  struct Term
  {
    Eigen::Vector3d position;
    Eigen::Vector3d world_direction; // Omega_b * u_hat_b
    double kappa = 0.0;
    double log_normalizer = 0.0;
  };

  std::vector<Term> terms_;
  std::size_t distinct_ = 0;
};

double aoa_log_likelihood(std::span<const AoaLocator> locators, const Point3& x,
                          std::span<const AoaMeasurement> measurements);

/// Maximizes aoa_log_likelihood over x. The returned Estimate has no tau.
/// @throws InsufficientMeasurementsError with bearings from fewer than 2 locators.
Estimate aoa_estimate(std::span<const AoaLocator> locators, std::span<const AoaMeasurement> measurements,
                      const SolverConfig& config);

} // namespace jointloc
