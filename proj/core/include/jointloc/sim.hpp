#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "jointloc/geometry.hpp"
#include "jointloc/measurements.hpp"
#include "jointloc/probability.hpp"
#include "jointloc/scene.hpp"

namespace jointloc
{

struct TestPoint
{
  std::string label;
  Point3 position;
};

struct TrialConfig
{
  std::vector<TestPoint> test_points;
  int trials_per_point = 1;
  double sync_std_m = 0.0; // extra zero-mean Gaussian on every ToA
  std::uint64_t seed = 0;

  /// @throws std::invalid_argument on duplicate labels, trials < 1 or negative sync std.
  void validate() const;
};

/// ARENA2036-style deployment. World frame: origin at one floor corner of the
/// 20 m x 10 m area, x along the long side, z up. Co-located ToA/AoA pairs at
/// the four ceiling corners (z = 7.3 m). Each AoA locator's local +x axis (its
/// boresight) points at the area center on the floor. Noise: one zero-mean
/// bias component with unit variance, sigma2 = 1e-5, kappa = 10.
Scene arena_scene();

/// 7 x 4 grid inset 1.5 m from the area edges at z = 1 m, labeled A01..A28
/// row by row (x fastest).
std::vector<TestPoint> default_test_points();

/// Copy of `scene` with every noise source at its degenerate limit:
/// sigma2 = 1e-18, bias N(0, (1e-9)^2), kappa = 1e16.
Scene with_degenerate_noise(const Scene& scene);

/// Forward ToA model: per locator (in scene order) draws bias, thermal noise
/// and sync noise, in that order. The sync draw is a standard normal scaled by
/// sync_std_m, so the stream consumed does not depend on sync_std_m.
std::vector<ToaMeasurement> synthesize_toa(const Scene& scene, const Point3& x, TransmitTime tau, double sync_std_m,
                                           Rng& rng);

/// Forward AoA model: per locator, a VMF draw around true_direction(x).
/// @throws DegeneratePositionError when x coincides with an AoA locator.
std::vector<AoaMeasurement> synthesize_aoa(const Scene& scene, const Point3& x, Rng& rng);

/// Substream identifiers for substream().
enum class Stream : std::uint64_t
{
  TransmitTime = 0,
  Toa = 1,
  Aoa = 2,
};

/// Independent generator for one (test point, epoch, stream) cell: the master
/// seed and the three indices are folded through SplitMix64, and the result
/// seeds an mt19937_64. Every cell is reproducible on its own.
Rng substream(std::uint64_t seed, std::uint64_t tp_index, std::uint64_t epoch, Stream stream);

/// One epoch of paired measurements at one test point.
struct Epoch
{
  std::string tp_label;
  std::size_t tp_index = 0;
  int epoch = 0;
  Point3 truth;
  TransmitTime tau;
  std::vector<ToaMeasurement> toa;
  std::vector<AoaMeasurement> aoa;
};

/// Half-width (meters) of the uniform distribution of the per-epoch transmit time.
inline constexpr double kTransmitTimeSpread = 10.0;

Epoch synthesize_epoch(const Scene& scene, const TestPoint& tp, std::size_t tp_index, int epoch, double sync_std_m,
                       std::uint64_t seed);

} // namespace jointloc
