#include "jointloc/aoa.hpp"

#include <set>
#include <unordered_map>

#include "jointloc/probability.hpp"

namespace jointloc
{

AoaProblem::AoaProblem(std::span<const AoaLocator> locators, std::span<const AoaMeasurement> measurements)
{
  if (measurements.empty())
  {
    throw InsufficientMeasurementsError("AoA: empty measurement list");
  }
  std::unordered_map<std::string, const AoaLocator*> index;
  for (const auto& loc : locators)
  {
    index.emplace(loc.id(), &loc);
  }
  std::set<std::string> seen;
  terms_.reserve(measurements.size());
  for (const auto& m : measurements)
  {
    const auto it = index.find(m.locator_id());
    if (it == index.end())
    {
      throw UnknownLocatorError("AoA measurement references unknown locator '" + m.locator_id() + "'");
    }
    const AoaLocator& loc = *it->second;
    const double kappa = m.concentration_override().value_or(loc.concentration());
    terms_.push_back(Term{loc.position().vec(), loc.orientation().apply(m.direction_est().vec()), kappa,
                          vmf_log_normalizer(kappa)});
    seen.insert(m.locator_id());
  }
  distinct_ = seen.size();
}

double AoaProblem::log_likelihood(const Eigen::Vector3d& x, Eigen::Vector3d* grad_x) const
{
  double total = 0.0;
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  for (const auto& term : terms_)
  {
    const Eigen::Vector3d diff = x - term.position;
    const double d = diff.norm();
    if (d <= kDegenerateDistance)
    {
      throw DegeneratePositionError("AoA likelihood undefined at a locator position");
    }
    const Eigen::Vector3d u = diff / d;
    total += term.log_normalizer + term.kappa * term.world_direction.dot(u);
    if (grad_x != nullptr)
    {
      // d/dx [(x - l) / |x - l|] = (I - u u^T) / |x - l|
      g += (term.kappa / d) * (term.world_direction - u * u.dot(term.world_direction));
    }
  }
  if (grad_x != nullptr)
  {
    *grad_x = g;
  }
  return total;
}

double aoa_log_likelihood(std::span<const AoaLocator> locators, const Point3& x,
                          std::span<const AoaMeasurement> measurements)
{
  return AoaProblem(locators, measurements).log_likelihood(x.vec());
}

Estimate aoa_estimate(std::span<const AoaLocator> locators, std::span<const AoaMeasurement> measurements,
                      const SolverConfig& config)
{
  config.validate();
  const AoaProblem problem(locators, measurements);
  if (problem.distinct_locators() < 2)
  {
    throw InsufficientMeasurementsError("aoa_estimate: bearings from at least 2 locators required");
  }
  const Objective objective = [&](const Eigen::VectorXd& v, Eigen::VectorXd* grad) {
    if (grad == nullptr)
    {
      return problem.log_likelihood(v.head<3>());
    }
    Eigen::Vector3d gx;
    const double value = problem.log_likelihood(v.head<3>(), &gx);
    *grad = gx;
    return value;
  };
  const auto [lower, upper] = variable_bounds(config, false);
  std::vector<Eigen::VectorXd> starts;
  for (const auto& p : initial_positions(config))
  {
    starts.emplace_back(p);
  }
  const MultiStartResult r = maximize_multistart(objective, starts, lower, upper, local_options(config));

  Estimate e;
  e.position = Point3(r.best.argmax.head<3>().eval());
  e.log_likelihood = r.best.value;
  e.converged = r.best.converged;
  e.iterations = r.best.iterations;
  e.start_index = r.start_index;
  return e;
}

} // namespace jointloc
