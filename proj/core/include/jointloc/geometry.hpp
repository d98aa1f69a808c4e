#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

namespace jointloc
{

/// Thrown when a position coincides with a locator, so that a direction or a
/// range derivative is undefined.
class DegeneratePositionError : public std::domain_error
{
public:
  using std::domain_error::domain_error;
};

/// Minimum distance (meters) between a position and a locator.
inline constexpr double kDegenerateDistance = 1e-9;

/// A position in the World frame, meters.
class Point3
{
public:
  Point3() = default;
  Point3(double x, double y, double z);
  explicit Point3(const Eigen::Vector3d& v);

  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  const Eigen::Vector3d& vec() const { return v_; }

  friend bool operator==(const Point3& a, const Point3& b) { return a.v_ == b.v_; }

private:
  Eigen::Vector3d v_ = Eigen::Vector3d::Zero();
};

/// A direction on the unit sphere. Construction normalizes its input; the
/// zero vector (or anything non-finite) is rejected.
class UnitVec3
{
public:
  explicit UnitVec3(const Eigen::Vector3d& v);
  UnitVec3(double x, double y, double z);

  const Eigen::Vector3d& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const UnitVec3& other) const { return v_.dot(other.v_); }

private:
  Eigen::Vector3d v_;
};

/// Proper rotation (orthonormal, det +1). Maps locator-frame vectors to the
/// World frame.
class Rotation3
{
public:
  Rotation3();
  /// Validates orthonormality and determinant within 1e-9.
  explicit Rotation3(const Eigen::Matrix3d& m);

  static Rotation3 identity() { return Rotation3(); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  Eigen::Vector3d apply(const Eigen::Vector3d& v) const { return m_ * v; }
  Eigen::Vector3d apply_inverse(const Eigen::Vector3d& v) const { return m_.transpose() * v; }

  Rotation3 operator*(const Rotation3& rhs) const;

private:
  Eigen::Matrix3d m_;
};

/// Intrinsic Z-Y-X (yaw, pitch, roll) rotation, R = Rz(yaw) Ry(pitch) Rx(roll).
Rotation3 rotation_from_euler(double yaw, double pitch, double roll);

/// Inverse of rotation_from_euler. Returns {yaw, pitch, roll}, pitch in [-pi/2, pi/2].
std::array<double, 3> euler_from_rotation(const Rotation3& r);

/// Axis-aligned box, meters.
struct Box
{
  Eigen::Vector3d lower = Eigen::Vector3d::Zero();
  Eigen::Vector3d upper = Eigen::Vector3d::Zero();

  Box() = default;
  Box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi);

  bool contains(const Point3& p) const;
  Box inflated(double margin) const;
  Eigen::Vector3d center() const { return 0.5 * (lower + upper); }
};

struct ToaLocator
{
  std::string id;
  Point3 position;
};

class AoaLocator
{
public:
  /// @throws std::invalid_argument if concentration is not a positive finite number.
  AoaLocator(std::string id, Point3 position, Rotation3 orientation, double concentration);

  const std::string& id() const { return id_; }
  const Point3& position() const { return position_; }
  const Rotation3& orientation() const { return orientation_; }
  double concentration() const { return concentration_; }

private:
  std::string id_;
  Point3 position_;
  Rotation3 orientation_;
  double concentration_;
};

/// Direction of x as seen from the locator, in the locator's local frame:
/// orientation^T (x - l) / |x - l|.
/// @throws DegeneratePositionError when |x - l| <= kDegenerateDistance.
UnitVec3 true_direction(const AoaLocator& locator, const Point3& x);

/// 2-D error in the x-y plane; z is ignored.
double horizontal_error(const Point3& estimate, const Point3& truth);

} // namespace jointloc
