#pragma once

// Seeded generators and fixtures shared by the test binaries.

#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "jointloc/joint.hpp"
#include "jointloc/sim.hpp"
#include "oracles/oracles.hpp"

namespace testing_support
{

class Gen
{
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(rng_); }

  Eigen::Vector3d in_box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi)
  {
    return {uniform(lo.x(), hi.x()), uniform(lo.y(), hi.y()), uniform(lo.z(), hi.z())};
  }

  Eigen::Vector3d unit()
  {
    Eigen::Vector3d v;
    do
    {
      v = Eigen::Vector3d(normal(), normal(), normal());
    } while (v.norm() < 1e-6);
    return v.normalized();
  }

  jointloc::Rotation3 rotation()
  {
    return jointloc::rotation_from_euler(uniform(-std::numbers::pi, std::numbers::pi),
                                         uniform(-std::numbers::pi / 2, std::numbers::pi / 2),
                                         uniform(-std::numbers::pi, std::numbers::pi));
  }

  jointloc::GaussianMixture mixture(int max_components, double mean_range, double std_lo, double std_hi)
  {
    const int n = integer(1, max_components);
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& v : w)
    {
      v = uniform(0.1, 1.0);
      total += v;
    }
    std::vector<jointloc::MixtureComponent> c;
    for (int i = 0; i < n; ++i)
    {
      c.push_back({w[i] / total, uniform(-mean_range, mean_range), uniform(std_lo, std_hi)});
    }
    // Force an exact unit sum so validation never trips on rounding.
    double rest = 1.0;
    for (int i = 0; i + 1 < n; ++i)
    {
      rest -= c[i].weight;
    }
    c.back().weight = rest;
    return jointloc::GaussianMixture(c);
  }

  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
};

inline std::vector<oracle::Component> to_oracle(const jointloc::GaussianMixture& g)
{
  std::vector<oracle::Component> out;
  for (const auto& c : g.components())
  {
    out.push_back({c.weight, c.mean, c.std});
  }
  return out;
}

/// Copies the scene geometry and measurements into the oracle's plain representation.
inline oracle::Instance to_oracle(const jointloc::Scene& scene, const std::vector<jointloc::ToaMeasurement>& toa,
                                  const std::vector<jointloc::AoaMeasurement>& aoa)
{
  oracle::Instance inst;
  inst.sigma2 = scene.toa_noise.sigma2();
  for (const auto& m : toa)
  {
    for (const auto& l : scene.toa_locators)
    {
      if (l.id == m.locator_id)
      {
        inst.toa.push_back({l.position.vec(), m.toa_m, to_oracle(scene.toa_noise.bias_for(l.id))});
      }
    }
  }
  for (const auto& m : aoa)
  {
    for (const auto& l : scene.aoa_locators)
    {
      if (l.id() == m.locator_id())
      {
        inst.aoa.push_back({l.position().vec(), l.orientation().matrix(), m.direction_est().vec(),
                            m.concentration_override().value_or(l.concentration())});
      }
    }
  }
  return inst;
}

/// Four ToA locators at distinct heights plus four AoA locators, in a
/// 10 x 8 x 4 m box. Small enough for exhaustive 0.1 m grid searches.
inline jointloc::Scene small_scene(double sigma2 = 0.01, double bias_std = 0.3, double kappa = 50.0)
{
  using namespace jointloc;
  std::vector<ToaLocator> toa{
      {"t1", Point3(0, 0, 3.5)}, {"t2", Point3(10, 0, 1.0)}, {"t3", Point3(0, 8, 1.5)}, {"t4", Point3(10, 8, 3.8)}};
  std::vector<AoaLocator> aoa{
      AoaLocator("a1", Point3(0.2, 0.2, 3.9), rotation_from_euler(0.6, 0.5, 0.0), kappa),
      AoaLocator("a2", Point3(9.8, 0.2, 3.9), rotation_from_euler(2.5, 0.5, 0.1), kappa),
      AoaLocator("a3", Point3(0.2, 7.8, 3.9), rotation_from_euler(-0.6, 0.5, -0.1), kappa),
      AoaLocator("a4", Point3(9.8, 7.8, 3.9), rotation_from_euler(-2.5, 0.5, 0.0), kappa),
  };
  Scene scene{toa, aoa, ToaNoiseModel(sigma2, GaussianMixture::single(0.0, bias_std)),
              Box(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(10, 8, 4))};
  scene.validate();
  return scene;
}

} // namespace testing_support
