#include "jointloc/toa.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace jointloc
{

namespace
{

std::unordered_map<std::string, const ToaLocator*> index_locators(std::span<const ToaLocator> locators)
{
  std::unordered_map<std::string, const ToaLocator*> index;
  for (const auto& loc : locators)
  {
    index.emplace(loc.id, &loc);
  }
  return index;
}

// Unit vector from locator to x and the range; throws when a derivative is needed at the locator.
double range_and_direction(const Eigen::Vector3d& x, const Eigen::Vector3d& p, Eigen::Vector3d* direction)
{
  const Eigen::Vector3d diff = x - p;
  const double d = diff.norm();
  if (direction != nullptr)
  {
    if (d <= kDegenerateDistance)
    {
      throw DegeneratePositionError("ToA gradient undefined at a locator position");
    }
    *direction = diff / d;
  }
  return d;
}

Estimate make_estimate(const Eigen::VectorXd& v, std::optional<TransmitTime> tau, const MultiStartResult& r)
{
  Estimate e;
  e.position = Point3(v.head<3>().eval());
  e.tau = tau;
  e.log_likelihood = r.best.value;
  e.converged = r.best.converged;
  e.iterations = r.best.iterations;
  e.start_index = r.start_index;
  return e;
}

} // namespace

ToaNoiseModel::ToaNoiseModel(double sigma2, GaussianMixture shared_bias)
  : ToaNoiseModel(sigma2, {}, std::move(shared_bias))
{
}

ToaNoiseModel::ToaNoiseModel(double sigma2, std::map<std::string, GaussianMixture> per_locator_bias,
                             std::optional<GaussianMixture> shared_bias)
  : sigma2_(sigma2), per_locator_(std::move(per_locator_bias)), shared_(std::move(shared_bias))
{
  if (!(sigma2_ > 0.0) || !std::isfinite(sigma2_))
  {
    throw std::invalid_argument("ToaNoiseModel: sigma2 must be positive");
  }
}

const GaussianMixture& ToaNoiseModel::bias_for(const std::string& locator_id) const
{
  if (auto it = per_locator_.find(locator_id); it != per_locator_.end())
  {
    return it->second;
  }
  if (shared_)
  {
    return *shared_;
  }
  throw UnknownLocatorError("ToaNoiseModel: no bias model for locator '" + locator_id + "'");
}

ToaProblem::ToaProblem(std::span<const ToaLocator> locators, std::span<const ToaMeasurement> measurements)
{
  if (measurements.empty())
  {
    throw InsufficientMeasurementsError("ToA: empty measurement list");
  }
  const auto index = index_locators(locators);
  terms_.reserve(measurements.size());
  for (const auto& m : measurements)
  {
    const auto it = index.find(m.locator_id);
    if (it == index.end())
    {
      throw UnknownLocatorError("ToA measurement references unknown locator '" + m.locator_id + "'");
    }
    if (!std::isfinite(m.toa_m))
    {
      throw std::invalid_argument("ToA measurement for '" + m.locator_id + "' is not finite");
    }
    terms_.push_back(Term{it->second->position.vec(), m.toa_m, 0.0});
  }
}

ToaProblem::ToaProblem(std::span<const ToaLocator> locators, const ToaNoiseModel& noise,
                       std::span<const ToaMeasurement> measurements)
  : ToaProblem(locators, measurements)
{
  likelihoods_.reserve(measurements.size());
  for (std::size_t k = 0; k < measurements.size(); ++k)
  {
    const GaussianMixture& bias = noise.bias_for(measurements[k].locator_id);
    likelihoods_.push_back(bias.with_added_variance(noise.sigma2()));
    terms_[k].bias_mean = bias.mean();
  }
}

double ToaProblem::log_likelihood(const Eigen::Vector3d& x, double tau, Eigen::Vector3d* grad_x,
                                  double* grad_tau) const
{
  if (!has_likelihood())
  {
    throw std::logic_error("ToaProblem: constructed without a noise model");
  }
  const bool want_grad = grad_x != nullptr || grad_tau != nullptr;
  Eigen::Vector3d gx = Eigen::Vector3d::Zero();
  double gt = 0.0;
  double total = 0.0;
  Eigen::Vector3d dir;
  for (std::size_t k = 0; k < terms_.size(); ++k)
  {
    const double d = range_and_direction(x, terms_[k].position, want_grad ? &dir : nullptr);
    const double residual = terms_[k].toa - d - tau;
    const auto [value, slope] = likelihoods_[k].log_pdf_with_derivative(residual);
    total += value;
    if (want_grad)
    {
      // d(residual)/dx = -dir, d(residual)/dtau = -1
      gx -= slope * dir;
      gt -= slope;
    }
  }
  if (grad_x != nullptr)
  {
    *grad_x = gx;
  }
  if (grad_tau != nullptr)
  {
    *grad_tau = gt;
  }
  return total;
}

double ToaProblem::sum_squared_residuals(const Eigen::Vector3d& x, double tau, Eigen::Vector3d* grad_x,
                                         double* grad_tau) const
{
  const bool want_grad = grad_x != nullptr || grad_tau != nullptr;
  Eigen::Vector3d gx = Eigen::Vector3d::Zero();
  double gt = 0.0;
  double total = 0.0;
  Eigen::Vector3d dir;
  for (const auto& term : terms_)
  {
    const double d = range_and_direction(x, term.position, want_grad ? &dir : nullptr);
    const double e = d + tau - term.toa;
    total += e * e;
    if (want_grad)
    {
      gx += 2.0 * e * dir;
      gt += 2.0 * e;
    }
  }
  if (grad_x != nullptr)
  {
    *grad_x = gx;
  }
  if (grad_tau != nullptr)
  {
    *grad_tau = gt;
  }
  return total;
}

double ToaProblem::profiled_tau(const Eigen::Vector3d& x) const
{
  double sum = 0.0;
  for (const auto& term : terms_)
  {
    sum += term.toa - (x - term.position).norm();
  }
  return sum / static_cast<double>(terms_.size());
}

double ToaProblem::median_tau(const Eigen::Vector3d& x) const
{
  std::vector<double> values;
  values.reserve(terms_.size());
  for (const auto& term : terms_)
  {
    values.push_back(term.toa - (x - term.position).norm() - term.bias_mean);
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double toa_log_likelihood(std::span<const ToaLocator> locators, const ToaNoiseModel& noise, const Point3& x,
                          TransmitTime tau, std::span<const ToaMeasurement> measurements)
{
  return ToaProblem(locators, noise, measurements).log_likelihood(x.vec(), tau.tau_m);
}

double nls_cost(std::span<const ToaLocator> locators, const Point3& x, TransmitTime tau,
                std::span<const ToaMeasurement> measurements)
{
  return ToaProblem(locators, measurements).sum_squared_residuals(x.vec(), tau.tau_m);
}

std::size_t min_toa_measurements(const SolverConfig& config)
{
  return config.fixed_z ? 3 : 4;
}

Estimate nls_estimate(std::span<const ToaLocator> locators, std::span<const ToaMeasurement> measurements,
                      const SolverConfig& config)
{
  config.validate();
  if (measurements.size() < min_toa_measurements(config))
  {
    throw InsufficientMeasurementsError("nls_estimate: too few ToA measurements");
  }
  const ToaProblem problem(locators, measurements);
  const auto clamp_tau = [&](double tau) { return std::clamp(tau, config.tau_min, config.tau_max); };

  // tau is fixed at its (clamped) optimum for each x, so by the envelope
  // theorem the x-gradient is the partial derivative at that tau.
  const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    const Eigen::Vector3d x = v.head<3>();
    const double tau = clamp_tau(problem.profiled_tau(x));
    Eigen::Vector3d gx;
    const double cost = problem.sum_squared_residuals(x, tau, grad != nullptr ? &gx : nullptr);
    if (grad != nullptr)
    {
      *grad = -gx;
    }
    return -cost;
  };

  const auto [lower, upper] = variable_bounds(config, false);
  std::vector<Eigen::VectorXd> starts;
  for (const auto& p : initial_positions(config))
  {
    starts.emplace_back(p);
  }
  const MultiStartResult r = maximize_multistart(objective, starts, lower, upper, local_options(config));
  const Eigen::Vector3d x = r.best.argmax.head<3>();
  return make_estimate(r.best.argmax, TransmitTime(clamp_tau(problem.profiled_tau(x))), r);
}

Estimate map_toa_estimate(std::span<const ToaLocator> locators, const ToaNoiseModel& noise,
                          std::span<const ToaMeasurement> measurements, const SolverConfig& config)
{
  config.validate();
  if (measurements.size() < min_toa_measurements(config))
  {
    throw InsufficientMeasurementsError("map_toa_estimate: too few ToA measurements");
  }
  const ToaProblem problem(locators, noise, measurements);
  const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    if (grad == nullptr)
    {
      return problem.log_likelihood(v.head<3>(), v[3]);
    }
    Eigen::Vector3d gx;
    double gt = 0.0;
    const double value = problem.log_likelihood(v.head<3>(), v[3], &gx, &gt);
    grad->resize(4);
    grad->head<3>() = gx;
    (*grad)[3] = gt;
    return value;
  };

  const auto [lower, upper] = variable_bounds(config, true);
  std::vector<Eigen::VectorXd> starts;
  for (const auto& p : initial_positions(config))
  {
    Eigen::VectorXd v(4);
    v.head<3>() = p;
    v[3] = std::clamp(problem.median_tau(p), config.tau_min, config.tau_max);
    starts.push_back(v);
  }
  const MultiStartResult r = maximize_multistart(objective, starts, lower, upper, local_options(config));
  return make_estimate(r.best.argmax, TransmitTime(r.best.argmax[3]), r);
}

} // namespace jointloc
