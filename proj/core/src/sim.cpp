#include "jointloc/sim.hpp"

#include <cmath>
#include <cstdio>
#include <set>

namespace jointloc
{

namespace
{

constexpr double kArenaLength = 20.0;
constexpr double kArenaWidth = 10.0;
constexpr double kArenaHeight = 7.3;
constexpr double kArenaKappa = 10.0;
constexpr double kArenaSigma2 = 1e-5;
constexpr double kTpInset = 1.5;
constexpr double kTpHeight = 1.0;

std::uint64_t splitmix64(std::uint64_t x)
{
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Boresight (local +x) toward target, no roll.
Rotation3 facing(const Eigen::Vector3d& from, const Eigen::Vector3d& target)
{
  const Eigen::Vector3d b = (target - from).normalized();
  const double yaw = std::atan2(b.y(), b.x());
  const double pitch = -std::asin(b.z());
  return rotation_from_euler(yaw, pitch, 0.0);
}

} // namespace

void TrialConfig::validate() const
{
  if (trials_per_point < 1)
  {
    throw std::invalid_argument("TrialConfig: trials_per_point must be >= 1");
  }
  if (!(sync_std_m >= 0.0) || !std::isfinite(sync_std_m))
  {
    throw std::invalid_argument("TrialConfig: sync_std_m must be non-negative");
  }
  std::set<std::string> labels;
  for (const auto& tp : test_points)
  {
    if (!labels.insert(tp.label).second)
    {
      throw std::invalid_argument("TrialConfig: duplicate test point label '" + tp.label + "'");
    }
  }
}

Scene arena_scene()
{
  const std::vector<Eigen::Vector3d> corners = {
      {0.0, 0.0, kArenaHeight},
      {kArenaLength, 0.0, kArenaHeight},
      {0.0, kArenaWidth, kArenaHeight},
      {kArenaLength, kArenaWidth, kArenaHeight},
  };
  const Eigen::Vector3d floor_center(kArenaLength / 2.0, kArenaWidth / 2.0, 0.0);

  std::vector<ToaLocator> toa;
  std::vector<AoaLocator> aoa;
  for (std::size_t i = 0; i < corners.size(); ++i)
  {
    const std::string n = std::to_string(i + 1);
    toa.push_back(ToaLocator{"toa-" + n, Point3(corners[i])});
    aoa.emplace_back("aoa-" + n, Point3(corners[i]), facing(corners[i], floor_center), kArenaKappa);
  }
  Scene scene{std::move(toa), std::move(aoa), ToaNoiseModel(kArenaSigma2, GaussianMixture::single(0.0, 1.0)),
              Box(Eigen::Vector3d::Zero(), Eigen::Vector3d(kArenaLength, kArenaWidth, kArenaHeight))};
  scene.validate();
  return scene;
}

std::vector<TestPoint> default_test_points()
{
  constexpr int kCols = 7;
  constexpr int kRows = 4;
  const double dx = (kArenaLength - 2.0 * kTpInset) / (kCols - 1);
  const double dy = (kArenaWidth - 2.0 * kTpInset) / (kRows - 1);
  std::vector<TestPoint> points;
  for (int r = 0; r < kRows; ++r)
  {
    for (int c = 0; c < kCols; ++c)
    {
      char label[8];
      std::snprintf(label, sizeof(label), "A%02d", r * kCols + c + 1);
      points.push_back(TestPoint{label, Point3(kTpInset + c * dx, kTpInset + r * dy, kTpHeight)});
    }
  }
  return points;
}

Scene with_degenerate_noise(const Scene& scene)
{
  std::vector<AoaLocator> aoa;
  for (const auto& loc : scene.aoa_locators)
  {
    aoa.emplace_back(loc.id(), loc.position(), loc.orientation(), 1e16);
  }
  return Scene{scene.toa_locators, std::move(aoa), ToaNoiseModel(1e-18, GaussianMixture::single(0.0, 1e-9)),
               scene.bounds};
}

std::vector<ToaMeasurement> synthesize_toa(const Scene& scene, const Point3& x, TransmitTime tau, double sync_std_m,
                                           Rng& rng)
{
  if (!(sync_std_m >= 0.0))
  {
    throw std::invalid_argument("synthesize_toa: sync_std_m must be non-negative");
  }
  const double sigma = std::sqrt(scene.toa_noise.sigma2());
  std::vector<ToaMeasurement> out;
  out.reserve(scene.toa_locators.size());
  for (const auto& loc : scene.toa_locators)
  {
    const double range = (loc.position.vec() - x.vec()).norm();
    const double bias = scene.toa_noise.bias_for(loc.id).sample(rng);
    const double thermal = sigma * standard_normal(rng);
    const double sync = sync_std_m * standard_normal(rng);
    out.push_back(ToaMeasurement{loc.id, range + tau.tau_m + bias + thermal + sync});
  }
  return out;
}

std::vector<AoaMeasurement> synthesize_aoa(const Scene& scene, const Point3& x, Rng& rng)
{
  std::vector<AoaMeasurement> out;
  out.reserve(scene.aoa_locators.size());
  for (const auto& loc : scene.aoa_locators)
  {
    const VonMisesFisher vmf(true_direction(loc, x), loc.concentration());
    out.emplace_back(loc.id(), vmf.sample(rng));
  }
  return out;
}

Rng substream(std::uint64_t seed, std::uint64_t tp_index, std::uint64_t epoch, Stream stream)
{
  std::uint64_t h = splitmix64(seed);
  h = splitmix64(h ^ tp_index);
  h = splitmix64(h ^ epoch);
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return Rng(h);
}

Epoch synthesize_epoch(const Scene& scene, const TestPoint& tp, std::size_t tp_index, int epoch, double sync_std_m,
                       std::uint64_t seed)
{
  const auto e = static_cast<std::uint64_t>(epoch);
  Rng tau_rng = substream(seed, tp_index, e, Stream::TransmitTime);
  Rng toa_rng = substream(seed, tp_index, e, Stream::Toa);
  Rng aoa_rng = substream(seed, tp_index, e, Stream::Aoa);

  Epoch out;
  out.tp_label = tp.label;
  out.tp_index = tp_index;
  out.epoch = epoch;
  out.truth = tp.position;
  out.tau = TransmitTime(kTransmitTimeSpread * (2.0 * uniform01(tau_rng) - 1.0));
  out.toa = synthesize_toa(scene, tp.position, out.tau, sync_std_m, toa_rng);
  out.aoa = synthesize_aoa(scene, tp.position, aoa_rng);
  return out;
}

} // namespace jointloc
