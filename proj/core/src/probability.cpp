#include "jointloc/probability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <Eigen/Geometry>

namespace jointloc
{

namespace
{

constexpr double kWeightSumTolerance = 1e-9;
const double kHalfLog2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

// Any unit vector orthogonal to n.
Eigen::Vector3d orthogonal_to(const Eigen::Vector3d& n)
{
  const Eigen::Vector3d helper = std::abs(n.x()) < 0.9 ? Eigen::Vector3d::UnitX() : Eigen::Vector3d::UnitY();
  return n.cross(helper).normalized();
}

} // namespace

double standard_normal(Rng& rng)
{
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

double uniform01(Rng& rng)
{
  return std::generate_canonical<double, std::numeric_limits<double>::digits>(rng);
}

GaussianMixture::GaussianMixture(std::vector<MixtureComponent> components) : components_(std::move(components))
{
  if (components_.empty())
  {
    throw std::invalid_argument("GaussianMixture: at least one component required");
  }
  double total = 0.0;
  for (const auto& c : components_)
  {
    if (!(c.weight > 0.0) || !std::isfinite(c.weight))
    {
      throw std::invalid_argument("GaussianMixture: weights must be positive");
    }
    if (!(c.std > 0.0) || !std::isfinite(c.std) || !std::isfinite(c.mean))
    {
      throw std::invalid_argument("GaussianMixture: stds must be positive and means finite");
    }
    total += c.weight;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance)
  {
    throw std::invalid_argument("GaussianMixture: weights must sum to 1");
  }
}

GaussianMixture GaussianMixture::single(double mean, double std)
{
  return GaussianMixture({MixtureComponent{1.0, mean, std}});
}

double GaussianMixture::log_pdf(double value) const
{
  return log_pdf_with_derivative(value).first;
}

std::pair<double, double> GaussianMixture::log_pdf_with_derivative(double value) const
{
  const auto log_term = [value](const MixtureComponent& c) {
    const double z = (value - c.mean) / c.std;
    return std::log(c.weight) - std::log(c.std) - kHalfLog2Pi - 0.5 * z * z;
  };
  if (components_.size() == 1)
  {
    const auto& c = components_.front();
    return {log_term(c), -(value - c.mean) / (c.std * c.std)};
  }
  double max_term = -std::numeric_limits<double>::infinity();
  for (const auto& c : components_)
  {
    max_term = std::max(max_term, log_term(c));
  }
  double sum = 0.0;
  double dsum = 0.0;
  for (const auto& c : components_)
  {
    const double r = std::exp(log_term(c) - max_term);
    sum += r;
    dsum += r * (-(value - c.mean) / (c.std * c.std));
  }
  return {max_term + std::log(sum), dsum / sum};
}

GaussianMixture GaussianMixture::with_added_variance(double variance) const
{
  if (!(variance >= 0.0))
  {
    throw std::invalid_argument("GaussianMixture: added variance must be non-negative");
  }
  std::vector<MixtureComponent> out = components_;
  for (auto& c : out)
  {
    c.std = std::sqrt(c.std * c.std + variance);
  }
  return GaussianMixture(std::move(out));
}

double GaussianMixture::mean() const
{
  double m = 0.0;
  for (const auto& c : components_)
  {
    m += c.weight * c.mean;
  }
  return m;
}

double GaussianMixture::variance() const
{
  const double m = mean();
  double second = 0.0;
  for (const auto& c : components_)
  {
    second += c.weight * (c.std * c.std + c.mean * c.mean);
  }
  return second - m * m;
}

double GaussianMixture::sample(Rng& rng) const
{
  const double u = uniform01(rng);
  double cumulative = 0.0;
  const MixtureComponent* chosen = &components_.back();
  for (const auto& c : components_)
  {
    cumulative += c.weight;
    if (u < cumulative)
    {
      chosen = &c;
      break;
    }
  }
  return chosen->mean + chosen->std * standard_normal(rng);
}

double gmm_log_pdf(const GaussianMixture& g, double value)
{
  return g.log_pdf(value);
}

double gmm_sample(const GaussianMixture& g, Rng& rng)
{
  return g.sample(rng);
}

double vmf_log_normalizer(double kappa)
{
  if (!(kappa > 0.0) || !std::isfinite(kappa))
  {
    throw std::invalid_argument("vmf_log_normalizer: concentration must be positive");
  }
  // ln(1 - e^{-2k}) via expm1 keeps precision when k is small.
  const double log_sinh = kappa - std::numbers::ln2 + std::log(-std::expm1(-2.0 * kappa));
  return std::log(kappa) - std::log(4.0 * std::numbers::pi) - log_sinh;
}

VonMisesFisher::VonMisesFisher(UnitVec3 mean_direction, double concentration)
  : mean_(mean_direction), kappa_(concentration), log_c_(vmf_log_normalizer(concentration))
{
}

double VonMisesFisher::log_pdf(const UnitVec3& u) const
{
  return log_c_ + kappa_ * mean_.dot(u);
}

UnitVec3 VonMisesFisher::sample(Rng& rng) const
{
  // Cosine t to the mean has density proportional to e^{kappa t} on [-1, 1];
  // invert its CDF, tracking 1 - t directly to avoid cancellation at large kappa.
  const double xi = 1.0 - uniform01(rng); // (0, 1]
  const double one_minus_t = -std::log(xi + (1.0 - xi) * std::exp(-2.0 * kappa_)) / kappa_;
  const double t = 1.0 - one_minus_t;
  const double s = std::sqrt(std::max(0.0, one_minus_t * (2.0 - one_minus_t)));
  const double phi = 2.0 * std::numbers::pi * uniform01(rng);

  const Eigen::Vector3d& mu = mean_.vec();
  const Eigen::Vector3d e1 = orthogonal_to(mu);
  const Eigen::Vector3d e2 = mu.cross(e1);
  return UnitVec3(t * mu + s * (std::cos(phi) * e1 + std::sin(phi) * e2));
}

double VonMisesFisher::uniform_log_pdf()
{
  return -std::log(4.0 * std::numbers::pi);
}

double vmf_log_pdf(const VonMisesFisher& v, const UnitVec3& u)
{
  return v.log_pdf(u);
}

UnitVec3 vmf_sample(const VonMisesFisher& v, Rng& rng)
{
  return v.sample(rng);
}

} // namespace jointloc
