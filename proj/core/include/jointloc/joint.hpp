#pragma once

#include <optional>
#include <span>

#include <Eigen/Core>

#include "jointloc/aoa.hpp"
#include "jointloc/scene.hpp"
#include "jointloc/solver.hpp"
#include "jointloc/toa.hpp"

namespace jointloc
{

struct JointGradient
{
  Eigen::Vector3d position = Eigen::Vector3d::Zero();
  double tau = 0.0;
};

/// Fused ToA + AoA log-likelihood over (x, tau). Either measurement list may be
/// empty (not both); the empty side contributes nothing.
class JointProblem
{
public:
  JointProblem(const Scene& scene, std::span<const ToaMeasurement> toa, std::span<const AoaMeasurement> aoa);

  bool has_toa() const { return toa_.has_value(); }
  bool has_aoa() const { return aoa_.has_value(); }
  const std::optional<ToaProblem>& toa() const { return toa_; }
  const std::optional<AoaProblem>& aoa() const { return aoa_; }

  double log_likelihood(const Eigen::Vector3d& x, double tau, JointGradient* grad = nullptr) const;

private:
  std::optional<ToaProblem> toa_;
  std::optional<AoaProblem> aoa_;
};

double joint_log_likelihood(const Scene& scene, const Point3& x, TransmitTime tau,
                            std::span<const ToaMeasurement> toa, std::span<const AoaMeasurement> aoa);

/// Analytic gradient of joint_log_likelihood with respect to x and tau.
/// @throws DegeneratePositionError when x coincides with a locator.
JointGradient joint_gradient(const Scene& scene, const Point3& x, TransmitTime tau,
                             std::span<const ToaMeasurement> toa, std::span<const AoaMeasurement> aoa);

/// Multi-start maximization of joint_log_likelihood. With no ToA input the
/// problem has no tau and the Estimate carries none.
/// @throws InsufficientMeasurementsError when the measurement set cannot fix a position.
Estimate joint_estimate(const Scene& scene, std::span<const ToaMeasurement> toa,
                        std::span<const AoaMeasurement> aoa, const SolverConfig& config);

} // namespace jointloc
