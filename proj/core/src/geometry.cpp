#include "jointloc/geometry.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Geometry>

namespace jointloc
{

namespace
{
constexpr double kRotationTolerance = 1e-9;
} // namespace

Point3::Point3(double x, double y, double z) : Point3(Eigen::Vector3d(x, y, z)) {}

Point3::Point3(const Eigen::Vector3d& v) : v_(v)
{
  if (!v_.allFinite())
  {
    throw std::invalid_argument("Point3: coordinates must be finite");
  }
}

UnitVec3::UnitVec3(const Eigen::Vector3d& v)
{
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0)
  {
    throw std::invalid_argument("UnitVec3: cannot normalize a zero or non-finite vector");
  }
  v_ = v / n;
}

UnitVec3::UnitVec3(double x, double y, double z) : UnitVec3(Eigen::Vector3d(x, y, z)) {}

Rotation3::Rotation3() : m_(Eigen::Matrix3d::Identity()) {}

Rotation3::Rotation3(const Eigen::Matrix3d& m) : m_(m)
{
  if (!m_.allFinite())
  {
    throw std::invalid_argument("Rotation3: matrix must be finite");
  }
  const double ortho_err = (m_.transpose() * m_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kRotationTolerance)
  {
    throw std::invalid_argument("Rotation3: matrix is not orthonormal");
  }
  if (std::abs(m_.determinant() - 1.0) > kRotationTolerance)
  {
    throw std::invalid_argument("Rotation3: determinant is not +1");
  }
}

Rotation3 Rotation3::operator*(const Rotation3& rhs) const
{
  Rotation3 out;
  out.m_ = m_ * rhs.m_;
  return out;
}

Rotation3 rotation_from_euler(double yaw, double pitch, double roll)
{
  if (!std::isfinite(yaw) || !std::isfinite(pitch) || !std::isfinite(roll))
  {
    throw std::invalid_argument("rotation_from_euler: angles must be finite");
  }
  const Eigen::Matrix3d m = (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) *
                             Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
                             Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
                                .toRotationMatrix();
  return Rotation3(m);
}

std::array<double, 3> euler_from_rotation(const Rotation3& r)
{
  const Eigen::Matrix3d& m = r.matrix();
  const double pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  double yaw = 0.0;
  double roll = 0.0;
  if (std::abs(m(2, 0)) < 1.0 - 1e-12)
  {
    yaw = std::atan2(m(1, 0), m(0, 0));
    roll = std::atan2(m(2, 1), m(2, 2));
  }
  else
  {
    // Gimbal lock: only yaw - roll (or yaw + roll) is defined; put it all in yaw.
    yaw = std::atan2(-m(0, 1), m(1, 1));
  }
  return {yaw, pitch, roll};
}

Box::Box(const Eigen::Vector3d& lo, const Eigen::Vector3d& hi) : lower(lo), upper(hi)
{
  if (!lower.allFinite() || !upper.allFinite() || (lower.array() > upper.array()).any())
  {
    throw std::invalid_argument("Box: bounds must be finite with lower <= upper");
  }
}

bool Box::contains(const Point3& p) const
{
  return (p.vec().array() >= lower.array()).all() && (p.vec().array() <= upper.array()).all();
}

Box Box::inflated(double margin) const
{
  const Eigen::Vector3d m = Eigen::Vector3d::Constant(margin);
  return Box(lower - m, upper + m);
}

AoaLocator::AoaLocator(std::string id, Point3 position, Rotation3 orientation, double concentration)
  : id_(std::move(id)), position_(position), orientation_(orientation), concentration_(concentration)
{
  if (!std::isfinite(concentration_) || concentration_ <= 0.0)
  {
    throw std::invalid_argument("AoaLocator '" + id_ + "': concentration must be positive");
  }
}

UnitVec3 true_direction(const AoaLocator& locator, const Point3& x)
{
  const Eigen::Vector3d diff = x.vec() - locator.position().vec();
  const double dist = diff.norm();
  if (dist <= kDegenerateDistance)
  {
    throw DegeneratePositionError("true_direction: position coincides with AoA locator '" + locator.id() + "'");
  }
  return UnitVec3(locator.orientation().apply_inverse(diff / dist));
}

double horizontal_error(const Point3& estimate, const Point3& truth)
{
  return std::hypot(estimate.x() - truth.x(), estimate.y() - truth.y());
}

} // namespace jointloc
