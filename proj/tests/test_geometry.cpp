#include <cmath>
#include <numbers>

#include <Eigen/LU>
#include <gtest/gtest.h>

#include "jointloc/geometry.hpp"
#include "support.hpp"

using namespace jointloc;

namespace
{

AoaLocator at_origin(const Rotation3& r) { return AoaLocator("a", Point3(0, 0, 0), r, 10.0); }

} // namespace

TEST(TrueDirection, NormalizesOffset)
{
  const UnitVec3 u = true_direction(at_origin(Rotation3::identity()), Point3(3, 4, 0));
  EXPECT_NEAR(u.x(), 0.6, 1e-15);
  EXPECT_NEAR(u.y(), 0.8, 1e-15);
  EXPECT_NEAR(u.z(), 0.0, 1e-15);
}

TEST(TrueDirection, AppliesInverseOrientation)
{
  const Rotation3 quarter_turn_z = rotation_from_euler(std::numbers::pi / 2, 0, 0);
  const UnitVec3 u = true_direction(at_origin(quarter_turn_z), Point3(0, 1, 0));
  EXPECT_NEAR(u.x(), 1.0, 1e-12);
  EXPECT_NEAR(u.y(), 0.0, 1e-12);
  EXPECT_NEAR(u.z(), 0.0, 1e-12);
}

TEST(TrueDirection, RejectsCoincidentPosition)
{
  const AoaLocator loc("a", Point3(1, 2, 3), Rotation3::identity(), 10.0);
  EXPECT_THROW(true_direction(loc, Point3(1, 2, 3)), DegeneratePositionError);
  EXPECT_THROW(true_direction(loc, Point3(1, 2, 3 + 1e-10)), DegeneratePositionError);
  EXPECT_NO_THROW(true_direction(loc, Point3(1, 2, 3 + 1e-6)));
}

TEST(RotationFromEuler, ZeroIsIdentity)
{
  EXPECT_TRUE(rotation_from_euler(0, 0, 0).matrix().isApprox(Eigen::Matrix3d::Identity(), 0.0));
}

TEST(RotationFromEuler, YawQuarterTurnMapsXToY)
{
  const Eigen::Vector3d v = rotation_from_euler(std::numbers::pi / 2, 0, 0).apply(Eigen::Vector3d::UnitX());
  EXPECT_LT((v - Eigen::Vector3d::UnitY()).norm(), 1e-15);
}

TEST(RotationFromEuler, HalfTurnsComposeToIdentity)
{
  const Rotation3 half = rotation_from_euler(std::numbers::pi, 0, 0);
  EXPECT_LT(((half * half).matrix() - Eigen::Matrix3d::Identity()).norm(), 1e-12);
}

TEST(RotationFromEuler, IntrinsicZyxOrder)
{
  // Pitch +90 deg about the (yawed) y axis sends local x to world -z.
  const Eigen::Vector3d v = rotation_from_euler(0.3, std::numbers::pi / 2, 0).apply(Eigen::Vector3d::UnitX());
  EXPECT_LT((v - Eigen::Vector3d(0, 0, -1)).norm(), 1e-12);
  // Roll leaves the local x axis fixed.
  const Eigen::Vector3d w = rotation_from_euler(0, 0, 1.1).apply(Eigen::Vector3d::UnitX());
  EXPECT_LT((w - Eigen::Vector3d::UnitX()).norm(), 1e-15);
}

TEST(RotationFromEuler, EulerRoundTrip)
{
  testing_support::Gen gen(11);
  for (int i = 0; i < 200; ++i)
  {
    const double yaw = gen.uniform(-3.0, 3.0);
    const double pitch = gen.uniform(-1.5, 1.5);
    const double roll = gen.uniform(-3.0, 3.0);
    const auto back = euler_from_rotation(rotation_from_euler(yaw, pitch, roll));
    EXPECT_NEAR(back[0], yaw, 1e-9);
    EXPECT_NEAR(back[1], pitch, 1e-9);
    EXPECT_NEAR(back[2], roll, 1e-9);
  }
}

TEST(RotationFromEuler, ThousandRandomTriplesAreProper)
{
  testing_support::Gen gen(1);
  for (int i = 0; i < 1000; ++i)
  {
    const Rotation3 r = rotation_from_euler(gen.uniform(-10, 10), gen.uniform(-10, 10), gen.uniform(-10, 10));
    EXPECT_NEAR(r.matrix().determinant(), 1.0, 1e-9);
    EXPECT_LT((r.matrix().transpose() * r.matrix() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Rotation3, RejectsNonRotations)
{
  Eigen::Matrix3d scaled = 2.0 * Eigen::Matrix3d::Identity();
  EXPECT_THROW(Rotation3{scaled}, std::invalid_argument);
  Eigen::Matrix3d reflection = Eigen::Matrix3d::Identity();
  reflection(2, 2) = -1.0;
  EXPECT_THROW(Rotation3{reflection}, std::invalid_argument);
}

TEST(HorizontalError, IgnoresHeight)
{
  EXPECT_EQ(horizontal_error(Point3(1, 1, 5), Point3(1, 1, 0)), 0.0);
}

TEST(HorizontalError, ThreeFourFive)
{
  EXPECT_DOUBLE_EQ(horizontal_error(Point3(4, 6, 2), Point3(1, 2, 2)), 5.0);
}

TEST(HorizontalError, IdenticalPoints)
{
  const Point3 p(-3.5, 2.25, 9.0);
  EXPECT_EQ(horizontal_error(p, p), 0.0);
}

TEST(UnitVec3, NormalizesAndRejectsZero)
{
  const UnitVec3 u(0, 3, 4);
  EXPECT_NEAR(u.vec().norm(), 1.0, 1e-15);
  EXPECT_NEAR(u.z(), 0.8, 1e-15);
  EXPECT_THROW(UnitVec3(0, 0, 0), std::invalid_argument);
  EXPECT_THROW(UnitVec3(std::nan(""), 0, 1), std::invalid_argument);
}

TEST(Point3, RejectsNonFinite)
{
  EXPECT_THROW(Point3(std::numeric_limits<double>::infinity(), 0, 0), std::invalid_argument);
}

TEST(AoaLocator, RejectsNonPositiveConcentration)
{
  EXPECT_THROW(AoaLocator("a", Point3(), Rotation3::identity(), 0.0), std::invalid_argument);
  EXPECT_THROW(AoaLocator("a", Point3(), Rotation3::identity(), -1.0), std::invalid_argument);
}

TEST(GeometryProperty, TrueDirectionHasUnitNorm)
{
  testing_support::Gen gen(2);
  for (int i = 0; i < 1000; ++i)
  {
    const AoaLocator loc("a", Point3(gen.in_box({-50, -50, -50}, {50, 50, 50})), gen.rotation(), 1.0);
    const Point3 x(gen.in_box({-50, -50, -50}, {50, 50, 50}));
    EXPECT_NEAR(true_direction(loc, x).vec().norm(), 1.0, 1e-9);
  }
}

TEST(GeometryProperty, FrameRoundTrip)
{
  testing_support::Gen gen(3);
  for (int i = 0; i < 1000; ++i)
  {
    const Rotation3 omega = gen.rotation();
    const Eigen::Vector3d l = gen.in_box({-20, -20, -20}, {20, 20, 20});
    const Eigen::Vector3d u = gen.unit();
    const AoaLocator loc("a", Point3(l), omega, 1.0);
    const double range = gen.uniform(0.01, 100.0);
    const UnitVec3 back = true_direction(loc, Point3(l + range * omega.apply(u)));
    EXPECT_LT((back.vec() - u).norm(), 1e-9);
  }
}

TEST(Box, ContainsAndInflates)
{
  const Box b(Eigen::Vector3d(0, 0, 0), Eigen::Vector3d(20, 10, 7.3));
  EXPECT_TRUE(b.contains(Point3(20, 10, 7.3)));
  EXPECT_FALSE(b.contains(Point3(20.1, 5, 1)));
  const Box g = b.inflated(2.0);
  EXPECT_EQ(g.lower, Eigen::Vector3d(-2, -2, -2));
  EXPECT_EQ(g.upper, Eigen::Vector3d(22, 12, 9.3));
  EXPECT_THROW(Box(Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 1, 1)), std::invalid_argument);
}
