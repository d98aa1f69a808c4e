#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jointloc/geometry.hpp"
#include "jointloc/measurements.hpp"
#include "jointloc/probability.hpp"
#include "jointloc/solver.hpp"

namespace jointloc
{

/// ToA error model: t_k = |p_k - x| + tau + bias_k + n_k, n_k ~ N(0, sigma2),
/// bias_k drawn from a per-locator Gaussian mixture (or one shared mixture).
class ToaNoiseModel
{
public:
  ToaNoiseModel(double sigma2, GaussianMixture shared_bias);
  ToaNoiseModel(double sigma2, std::map<std::string, GaussianMixture> per_locator_bias,
                std::optional<GaussianMixture> shared_bias = std::nullopt);

  double sigma2() const { return sigma2_; }
  const std::optional<GaussianMixture>& shared_bias() const { return shared_; }
  const std::map<std::string, GaussianMixture>& per_locator_bias() const { return per_locator_; }

  /// Per-locator mixture if present, else the shared one.
  /// @throws UnknownLocatorError when neither exists.
  const GaussianMixture& bias_for(const std::string& locator_id) const;

private:
  double sigma2_;
  std::map<std::string, GaussianMixture> per_locator_;
  std::optional<GaussianMixture> shared_;
};

/// ToA measurements resolved against their locators, for repeated evaluation
/// inside an optimizer. Variables are the position x and the transmit time tau.
class ToaProblem
{
public:
  /// Least-squares only (no likelihood model).
  ToaProblem(std::span<const ToaLocator> locators, std::span<const ToaMeasurement> measurements);
  ToaProblem(std::span<const ToaLocator> locators, const ToaNoiseModel& noise,
             std::span<const ToaMeasurement> measurements);

  std::size_t size() const { return terms_.size(); }
  bool has_likelihood() const { return !likelihoods_.empty(); }

  /// Sum over measurements of ln p(t_k | x, tau); each factor is the bias
  /// mixture with sigma2 added to every component variance. Gradient outputs
  /// are optional.
  /// @throws DegeneratePositionError if a gradient is requested at a locator position.
  double log_likelihood(const Eigen::Vector3d& x, double tau, Eigen::Vector3d* grad_x = nullptr,
                        double* grad_tau = nullptr) const;

  /// Sum of squared residuals (|p_k - x| + tau - t_k)^2 and optional gradient.
  double sum_squared_residuals(const Eigen::Vector3d& x, double tau, Eigen::Vector3d* grad_x = nullptr,
                               double* grad_tau = nullptr) const;

  /// Least-squares optimal tau for a given x: mean of (t_k - |p_k - x|).
  double profiled_tau(const Eigen::Vector3d& x) const;

  /// Median of (t_k - |p_k - x| - E[bias_k]); a starting value for tau.
  double median_tau(const Eigen::Vector3d& x) const;

private:
  struct Term
  {
    Eigen::Vector3d position;
    double toa = 0.0;
    double bias_mean = 0.0;
  };

  std::vector<Term> terms_;
  std::vector<GaussianMixture> likelihoods_;
};

double toa_log_likelihood(std::span<const ToaLocator> locators, const ToaNoiseModel& noise, const Point3& x,
                          TransmitTime tau, std::span<const ToaMeasurement> measurements);

/// Least-squares cost sum_k (|p_k - x| + tau - t_k)^2.
double nls_cost(std::span<const ToaLocator> locators, const Point3& x, TransmitTime tau,
                std::span<const ToaMeasurement> measurements);

/// Nonlinear least squares over (x, tau) with tau profiled out in closed form
/// (then clamped to the configured interval). Needs 4 measurements, or 3 with
/// a fixed height.
Estimate nls_estimate(std::span<const ToaLocator> locators, std::span<const ToaMeasurement> measurements,
                      const SolverConfig& config);

/// Maximizes toa_log_likelihood over (x, tau) with the multi-start optimizer.
Estimate map_toa_estimate(std::span<const ToaLocator> locators, const ToaNoiseModel& noise,
                          std::span<const ToaMeasurement> measurements, const SolverConfig& config);

/// Minimum ToA count for a ToA-only fix under `config`.
std::size_t min_toa_measurements(const SolverConfig& config);

} // namespace jointloc
