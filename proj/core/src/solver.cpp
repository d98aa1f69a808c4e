#include "jointloc/solver.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "jointloc/probability.hpp"

namespace jointloc
{

namespace
{

constexpr double kArmijo = 1e-4;
constexpr int kMaxBacktracks = 60;
constexpr double kWorldMargin = 2.0;

double safe_eval(const Objective& objective, const Eigen::VectorXd& v, Eigen::VectorXd* grad)
{
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  try
  {
    const double f = objective(v, grad);
    if (!std::isfinite(f) || (grad != nullptr && !grad->allFinite()))
    {
      return kNegInf;
    }
    return f;
  }
  catch (const DegeneratePositionError&)
  {
    return kNegInf;
  }
}

} // namespace

SolverConfig SolverConfig::for_world(const Box& world)
{
  SolverConfig config;
  config.bounds = world.inflated(kWorldMargin);
  return config;
}

void SolverConfig::validate() const
{
  if (starts < 1 || max_iters < 1)
  {
    throw std::invalid_argument("SolverConfig: starts and max_iters must be positive");
  }
  if (!(gradient_tolerance > 0.0) || !(step_initial > 0.0))
  {
    throw std::invalid_argument("SolverConfig: tolerances must be positive");
  }
  if (!(tau_min <= tau_max))
  {
    throw std::invalid_argument("SolverConfig: tau interval is empty");
  }
  if ((bounds.lower.array() > bounds.upper.array()).any())
  {
    throw std::invalid_argument("SolverConfig: position bounds are empty");
  }
  if (fixed_z && (*fixed_z < bounds.lower.z() || *fixed_z > bounds.upper.z()))
  {
    throw std::invalid_argument("SolverConfig: fixed_z lies outside the bounds");
  }
}

LocalSearchResult maximize_bounded(const Objective& objective, const Eigen::VectorXd& start,
                                   const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                   const LocalSearchOptions& options, std::vector<double>* trace)
{
  const Eigen::Index n = start.size();
  const auto project = [&](const Eigen::VectorXd& v) -> Eigen::VectorXd { return v.cwiseMax(lower).cwiseMin(upper); };
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(n, n);

  LocalSearchResult result;
  Eigen::VectorXd x = project(start);
  Eigen::VectorXd g(n);
  double f = safe_eval(objective, x, &g);
  result.argmax = x;
  result.value = f;
  if (!std::isfinite(f))
  {
    return result;
  }
  if (trace != nullptr)
  {
    trace->push_back(f);
  }

  // H approximates the inverse of the negated Hessian, so H g is an ascent direction.
  Eigen::MatrixXd H = identity;
  bool fresh = true;
  Eigen::VectorXd xn(n);
  Eigen::VectorXd gn(n);

  int it = 0;
  for (; it < options.max_iters; ++it)
  {
    const Eigen::VectorXd projected_gradient = project(x + g) - x;
    if (projected_gradient.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance)
    {
      result.converged = true;
      break;
    }

    // Variables held at a bound by the gradient are frozen for this step.
    Eigen::VectorXd free_gradient = g;
    for (Eigen::Index i = 0; i < n; ++i)
    {
      if ((x[i] <= lower[i] && g[i] < 0.0) || (x[i] >= upper[i] && g[i] > 0.0))
      {
        free_gradient[i] = 0.0;
      }
    }
    Eigen::VectorXd d = H * free_gradient;
    for (Eigen::Index i = 0; i < n; ++i)
    {
      if (free_gradient[i] == 0.0)
      {
        d[i] = 0.0;
      }
    }
    if (!(g.dot(d) > 0.0))
    {
      H = identity;
      fresh = true;
      d = free_gradient;
    }
    if (fresh)
    {
      const double len = d.norm();
      if (len > options.step_initial)
      {
        d *= options.step_initial / len;
      }
    }

    bool accepted = false;
    double fn = f;
    double alpha = 1.0;
    for (int ls = 0; ls < kMaxBacktracks; ++ls)
    {
      xn = project(x + alpha * d);
      const Eigen::VectorXd s = xn - x;
      if (s.lpNorm<Eigen::Infinity>() <= 1e-15 * (1.0 + x.lpNorm<Eigen::Infinity>()))
      {
        break;
      }
      fn = safe_eval(objective, xn, &gn);
      if (std::isfinite(fn) && fn >= f + kArmijo * g.dot(s))
      {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }

    if (!accepted)
    {
      if (!fresh)
      {
        H = identity;
        fresh = true;
        continue;
      }
      // Not even a projected gradient step improves the objective in double precision.
      result.converged = true;
      break;
    }

    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = g - gn; // gradient change of the minimized function -f
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm())
    {
      if (fresh)
      {
        H = (sy / y.squaredNorm()) * identity;
      }
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd left = identity - rho * s * y.transpose();
      H = left * H * left.transpose() + rho * s * s.transpose();
      fresh = false;
    }

    x = xn;
    f = fn;
    g = gn;
    if (trace != nullptr)
    {
      trace->push_back(f);
    }
  }

  result.argmax = x;
  result.value = f;
  result.iterations = it;
  return result;
}

MultiStartResult maximize_multistart(const Objective& objective, std::span<const Eigen::VectorXd> starts,
                                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                                     const LocalSearchOptions& options)
{
  if (starts.empty())
  {
    throw std::invalid_argument("maximize_multistart: no starting points");
  }
  MultiStartResult best;
  bool have_best = false;
  for (std::size_t i = 0; i < starts.size(); ++i)
  {
    LocalSearchResult local = maximize_bounded(objective, starts[i], lower, upper, options);
    if (!have_best || local.value > best.best.value)
    {
      best.best = std::move(local);
      best.start_index = static_cast<int>(i);
      have_best = true;
    }
  }
  return best;
}

std::vector<Eigen::Vector3d> initial_positions(const SolverConfig& config)
{
  const Box& box = config.bounds;
  std::vector<Eigen::Vector3d> points;
  points.reserve(static_cast<std::size_t>(config.starts));
  points.push_back(box.center());
  for (int corner = 0; corner < 8; ++corner)
  {
    points.emplace_back((corner & 1) ? box.upper.x() : box.lower.x(), (corner & 2) ? box.upper.y() : box.lower.y(),
                        (corner & 4) ? box.upper.z() : box.lower.z());
  }
  if (points.size() > static_cast<std::size_t>(config.starts))
  {
    points.resize(static_cast<std::size_t>(config.starts));
  }
  Rng rng(config.seed);
  while (points.size() < static_cast<std::size_t>(config.starts))
  {
    Eigen::Vector3d p;
    for (int axis = 0; axis < 3; ++axis)
    {
      p[axis] = box.lower[axis] + uniform01(rng) * (box.upper[axis] - box.lower[axis]);
    }
    points.push_back(p);
  }
  if (config.fixed_z)
  {
    for (auto& p : points)
    {
      p.z() = *config.fixed_z;
    }
  }
  return points;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> variable_bounds(const SolverConfig& config, bool with_tau)
{
  const Eigen::Index n = with_tau ? 4 : 3;
  Eigen::VectorXd lower(n);
  Eigen::VectorXd upper(n);
  lower.head<3>() = config.bounds.lower;
  upper.head<3>() = config.bounds.upper;
  if (config.fixed_z)
  {
    lower[2] = *config.fixed_z;
    upper[2] = *config.fixed_z;
  }
  if (with_tau)
  {
    lower[3] = config.tau_min;
    upper[3] = config.tau_max;
  }
  return {lower, upper};
}

LocalSearchOptions local_options(const SolverConfig& config)
{
  return LocalSearchOptions{config.max_iters, config.gradient_tolerance, config.step_initial};
}

} // namespace jointloc
