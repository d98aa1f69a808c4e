#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "jointloc/geometry.hpp"

namespace jointloc
{

/// Thrown when a measurement names a locator the scene does not contain.
class UnknownLocatorError : public std::out_of_range
{
public:
  using std::out_of_range::out_of_range;
};

/// Thrown when there are too few measurements for a well-posed fix.
class InsufficientMeasurementsError : public std::invalid_argument
{
public:
  using std::invalid_argument::invalid_argument;
};

/// Unknown transmit-time offset of the device, multiplied by the speed of light (meters).
struct TransmitTime
{
  double tau_m = 0.0;

  TransmitTime() = default;
  explicit TransmitTime(double tau) : tau_m(tau) {}

  friend bool operator==(const TransmitTime&, const TransmitTime&) = default;
};

/// Time of arrival at one ToA locator, already converted to meters.
struct ToaMeasurement
{
  std::string locator_id;
  double toa_m = 0.0;
};

/// Direction estimate at one AoA locator, in that locator's local frame.
class AoaMeasurement
{
public:
  AoaMeasurement(std::string locator_id, UnitVec3 direction,
                 std::optional<double> concentration_override = std::nullopt)
    : locator_id_(std::move(locator_id)), direction_(direction), override_(concentration_override)
  {
    if (override_ && !(*override_ > 0.0))
    {
      throw std::invalid_argument("AoaMeasurement: concentration override must be positive");
    }
  }

  const std::string& locator_id() const { return locator_id_; }
  const UnitVec3& direction_est() const { return direction_; }
  const std::optional<double>& concentration_override() const { return override_; }

private:
  std::string locator_id_;
  UnitVec3 direction_;
  std::optional<double> override_;
};

} // namespace jointloc
