#include "jointloc/joint.hpp"

#include <algorithm>
#include <set>

namespace jointloc
{

void Scene::validate() const
{
  if (toa_locators.empty() && aoa_locators.empty())
  {
    throw std::invalid_argument("Scene: at least one locator required");
  }
  std::set<std::string> ids;
  for (const auto& loc : toa_locators)
  {
    if (!ids.insert(loc.id).second)
    {
      throw std::invalid_argument("Scene: duplicate ToA locator id '" + loc.id + "'");
    }
    if (!toa_noise.per_locator_bias().contains(loc.id) && !toa_noise.shared_bias())
    {
      throw std::invalid_argument("Scene: no bias model for ToA locator '" + loc.id + "'");
    }
  }
  ids.clear();
  for (const auto& loc : aoa_locators)
  {
    if (!ids.insert(loc.id()).second)
    {
      throw std::invalid_argument("Scene: duplicate AoA locator id '" + loc.id() + "'");
    }
  }
}

JointProblem::JointProblem(const Scene& scene, std::span<const ToaMeasurement> toa,
                           std::span<const AoaMeasurement> aoa)
{
  if (toa.empty() && aoa.empty())
  {
    throw InsufficientMeasurementsError("joint: both measurement lists are empty");
  }
  if (!toa.empty())
  {
    toa_.emplace(scene.toa_locators, scene.toa_noise, toa);
  }
  if (!aoa.empty())
  {
    aoa_.emplace(scene.aoa_locators, aoa);
  }
}

double JointProblem::log_likelihood(const Eigen::Vector3d& x, double tau, JointGradient* grad) const
{
  double total = 0.0;
  JointGradient g;
  if (toa_)
  {
    total = toa_->log_likelihood(x, tau, grad != nullptr ? &g.position : nullptr, grad != nullptr ? &g.tau : nullptr);
  }
  if (aoa_)
  {
    Eigen::Vector3d ga;
    const double value = aoa_->log_likelihood(x, grad != nullptr ? &ga : nullptr);
    if (toa_)
    {
      total += value;
      if (grad != nullptr)
      {
        g.position += ga;
      }
    }
    else
    {
      total = value;
      g.position = ga;
    }
  }
  if (grad != nullptr)
  {
    *grad = g;
  }
  return total;
}

double joint_log_likelihood(const Scene& scene, const Point3& x, TransmitTime tau,
                            std::span<const ToaMeasurement> toa, std::span<const AoaMeasurement> aoa)
{
  return JointProblem(scene, toa, aoa).log_likelihood(x.vec(), tau.tau_m);
}

JointGradient joint_gradient(const Scene& scene, const Point3& x, TransmitTime tau,
                             std::span<const ToaMeasurement> toa, std::span<const AoaMeasurement> aoa)
{
  JointGradient g;
  JointProblem(scene, toa, aoa).log_likelihood(x.vec(), tau.tau_m, &g);
  return g;
}

Estimate joint_estimate(const Scene& scene, std::span<const ToaMeasurement> toa,
                        std::span<const AoaMeasurement> aoa, const SolverConfig& config)
{
  config.validate();
  const JointProblem problem(scene, toa, aoa);
  if (!problem.has_aoa())
  {
    if (toa.size() < min_toa_measurements(config))
    {
      throw InsufficientMeasurementsError("joint_estimate: too few ToA measurements without AoA");
    }
  }
  else if (!problem.has_toa() && problem.aoa()->distinct_locators() < 2)
  {
    throw InsufficientMeasurementsError("joint_estimate: bearings from at least 2 locators required without ToA");
  }

  const bool with_tau = problem.has_toa();
  const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    const double tau = with_tau ? v[3] : 0.0;
    if (grad == nullptr)
    {
      return problem.log_likelihood(v.head<3>(), tau);
    }
    JointGradient g;
    const double value = problem.log_likelihood(v.head<3>(), tau, &g);
    grad->resize(v.size());
    grad->head<3>() = g.position;
    if (with_tau)
    {
      (*grad)[3] = g.tau;
    }
    return value;
  };

  const auto [lower, upper] = variable_bounds(config, with_tau);
  std::vector<Eigen::VectorXd> starts;
  for (const auto& p : initial_positions(config))
  {
    Eigen::VectorXd v(with_tau ? 4 : 3);
    v.head<3>() = p;
    if (with_tau)
    {
      v[3] = std::clamp(problem.toa()->median_tau(p), config.tau_min, config.tau_max);
    }
    starts.push_back(v);
  }
  const MultiStartResult r = maximize_multistart(objective, starts, lower, upper, local_options(config));

  Estimate e;
  e.position = Point3(r.best.argmax.head<3>().eval());
  if (with_tau)
  {
    e.tau = TransmitTime(r.best.argmax[3]);
  }
  e.log_likelihood = r.best.value;
  e.converged = r.best.converged;
  e.iterations = r.best.iterations;
  e.start_index = r.start_index;
  return e;
}

} // namespace jointloc
