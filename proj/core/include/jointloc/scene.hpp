#pragma once

#include <vector>

#include "jointloc/geometry.hpp"
#include "jointloc/toa.hpp"

namespace jointloc
{

/// A deployment: locators, the ToA noise model and the world box.
/// ToA and AoA locators may share a position (co-located pairs).
struct Scene
{
  std::vector<ToaLocator> toa_locators;
  std::vector<AoaLocator> aoa_locators;
  ToaNoiseModel toa_noise;
  Box bounds;

  /// @throws std::invalid_argument on duplicate ids, no locators at all, or a
  /// ToA locator without a bias model.
  void validate() const;
};

} // namespace jointloc
