#pragma once

#include <random>
#include <span>
#include <utility>
#include <vector>

#include "jointloc/geometry.hpp"

namespace jointloc
{

/// Random source used throughout the library. Callers own and seed it.
using Rng = std::mt19937_64;

struct MixtureComponent
{
  double weight = 1.0;
  double mean = 0.0; // meters
  double std = 1.0;  // meters
};

/// Gaussian mixture on the real line, used as the prior on the ranging bias
/// of a ToA locator.
class GaussianMixture
{
public:
  /// @throws std::invalid_argument unless there is at least one component,
  /// every weight is positive, weights sum to 1 within 1e-9 and every std > 0.
  explicit GaussianMixture(std::vector<MixtureComponent> components);

  static GaussianMixture single(double mean, double std);

  std::span<const MixtureComponent> components() const { return components_; }

  /// Log density, log-sum-exp over components.
  double log_pdf(double value) const;

  /// Log density and its derivative with respect to `value`.
  std::pair<double, double> log_pdf_with_derivative(double value) const;

  /// The mixture convolved with N(0, variance): every component variance grows by `variance`.
  GaussianMixture with_added_variance(double variance) const;

  double mean() const;
  double variance() const;

  double sample(Rng& rng) const;

private:
  std::vector<MixtureComponent> components_;
};

double gmm_log_pdf(const GaussianMixture& g, double value);
double gmm_sample(const GaussianMixture& g, Rng& rng);

/// ln c for the von Mises-Fisher density on S^2, c = kappa / (4 pi sinh kappa).
/// Uses ln sinh k = k - ln 2 + ln(1 - e^{-2k}) so it stays finite for large kappa.
double vmf_log_normalizer(double kappa);

/// von Mises-Fisher distribution on the unit sphere S^2.
class VonMisesFisher
{
public:
  /// @throws std::invalid_argument unless concentration is positive and finite.
  VonMisesFisher(UnitVec3 mean_direction, double concentration);

  const UnitVec3& mean_direction() const { return mean_; }
  double concentration() const { return kappa_; }
  double log_normalizer() const { return log_c_; }

  double log_pdf(const UnitVec3& u) const;

  /// Exact draw: inverse-CDF for the cosine to the mean, uniform angle around it.
  UnitVec3 sample(Rng& rng) const;

  /// The kappa -> 0 limit: uniform density on the sphere, ln(1 / 4 pi).
  static double uniform_log_pdf();

private:
  UnitVec3 mean_;
  double kappa_;
  double log_c_;
};

double vmf_log_pdf(const VonMisesFisher& v, const UnitVec3& u);
UnitVec3 vmf_sample(const VonMisesFisher& v, Rng& rng);

/// Draws one standard normal variate.
double standard_normal(Rng& rng);

/// Uniform on [0, 1).
double uniform01(Rng& rng);

} // namespace jointloc
