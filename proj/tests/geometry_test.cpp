#include "bnbloc/geometry.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "bnbloc/rng.hpp"

namespace bnbloc {
namespace {

constexpr double kPi = 3.14159265358979323846;

// Independent rotation oracle: Rz, Ry, Rx built separately and multiplied
// the long way. Kept apart from pose_to_transform's fused expressions.
std::array<double, 9> matmul(const std::array<double, 9>& a, const std::array<double, 9>& b) {
  std::array<double, 9> c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[3 * i + j] += a[3 * i + k] * b[3 * k + j];
  return c;
}

std::array<double, 9> oracle_rotation(double roll, double pitch, double yaw) {
  const double ca = std::cos(roll), sa = std::sin(roll);
  const double cb = std::cos(pitch), sb = std::sin(pitch);
  const double cg = std::cos(yaw), sg = std::sin(yaw);
  const std::array<double, 9> rx = {1, 0, 0, 0, ca, -sa, 0, sa, ca};
  const std::array<double, 9> ry = {cb, 0, sb, 0, 1, 0, -sb, 0, cb};
  const std::array<double, 9> rz = {cg, -sg, 0, sg, cg, 0, 0, 0, 1};
  return matmul(rz, matmul(ry, rx));
}

TEST(PoseToTransform, IdentityPose) {
  const Transform t = pose_to_transform(Pose6{});
  const std::array<double, 9> eye = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  for (int i = 0; i < 9; ++i) EXPECT_DOUBLE_EQ(eye[i], t.rotation[i]);
  EXPECT_DOUBLE_EQ(0.0, t.translation.x);
  EXPECT_DOUBLE_EQ(0.0, t.translation.y);
  EXPECT_DOUBLE_EQ(0.0, t.translation.z);
}

TEST(PoseToTransform, QuarterTurnAboutZ) {
  const Transform t = pose_to_transform(Pose6{0, 0, 0, 0, 0, kPi / 2});
  const Point3 p = t.apply({1, 0, 0});
  EXPECT_NEAR(0.0, p.x, 1e-15);
  EXPECT_NEAR(1.0, p.y, 1e-15);
  EXPECT_NEAR(0.0, p.z, 1e-15);
}

TEST(PoseToTransform, MatchesCompositionOracle) {
  const Pose6 pose{1, 2, 3, 0.01, -0.02, 1.0};
  const Transform t = pose_to_transform(pose);
  const auto expected = oracle_rotation(pose.roll, pose.pitch, pose.yaw);
  for (int i = 0; i < 9; ++i) EXPECT_NEAR(expected[i], t.rotation[i], 1e-15);
  EXPECT_DOUBLE_EQ(1.0, t.translation.x);
  EXPECT_DOUBLE_EQ(2.0, t.translation.y);
  EXPECT_DOUBLE_EQ(3.0, t.translation.z);
}

TEST(TransformPoint, Basics) {
  const Point3 p = transform_point(Transform{}, {5, -1, 2});
  EXPECT_DOUBLE_EQ(5.0, p.x);
  EXPECT_DOUBLE_EQ(-1.0, p.y);
  EXPECT_DOUBLE_EQ(2.0, p.z);

  Transform shift;
  shift.translation = {1, 1, 1};
  const Point3 q = transform_point(shift, {0, 0, 0});
  EXPECT_DOUBLE_EQ(1.0, q.x);
  EXPECT_DOUBLE_EQ(1.0, q.y);
  EXPECT_DOUBLE_EQ(1.0, q.z);

  const Point3 s = transform_point(pose_to_transform(Pose6{0, 0, 0, 0, 0, kPi / 2}), {1, 0, 0});
  EXPECT_NEAR(0.0, s.x, 1e-15);
  EXPECT_NEAR(1.0, s.y, 1e-15);
}

TEST(RotationError, SingleAxisAndIdentity) {
  const Pose6 a{4, 5, 6, 0.1, 0.2, 1.0};
  EXPECT_DOUBLE_EQ(0.0, rotation_error(a, a));

  Pose6 b = a;
  b.yaw += 0.04;
  b.roll = b.pitch = 0.0;
  Pose6 a2 = a;
  a2.roll = a2.pitch = 0.0;
  EXPECT_NEAR(0.04, rotation_error(a2, b), 1e-9);
}

TEST(RotationError, MatchesTraceFormulaOnRandomPairs) {
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    const Pose6 a{0, 0, 0, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, kTwoPi)};
    const Pose6 b{0, 0, 0, rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0, kTwoPi)};
    const auto ra = oracle_rotation(a.roll, a.pitch, a.yaw);
    const auto rb = oracle_rotation(b.roll, b.pitch, b.yaw);
    // trace(Ra^T Rb) computed element-wise the slow way
    double tr = 0.0;
    for (int d = 0; d < 3; ++d)
      for (int k = 0; k < 3; ++k) tr += ra[3 * k + d] * rb[3 * k + d];
    const double expected = std::acos(std::clamp(0.5 * (tr - 1.0), -1.0, 1.0));
    EXPECT_NEAR(expected, rotation_error(a, b), 1e-12);
  }
}

TEST(TranslationError, Cases) {
  const Pose6 a{0, 0, 0, 0, 0, 0};
  EXPECT_DOUBLE_EQ(0.0, translation_error(a, a));
  EXPECT_DOUBLE_EQ(3.0, translation_error(a, Pose6{1, 2, 2, 0.5, 0.1, 0.2}));

  Rng rng(11);
  for (int i = 0; i < 100; ++i) {
    const Pose6 p{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50), 0, 0, 0};
    const Pose6 q{rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50), 0, 0, 0};
    const double dx = p.x - q.x, dy = p.y - q.y, dz = p.z - q.z;
    EXPECT_DOUBLE_EQ(std::sqrt(dx * dx + dy * dy + dz * dz), translation_error(p, q));
  }
}

TEST(GeometryProperties, OriginMapsToTranslationExactly) {
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const Pose6 p{rng.uniform(-100, 100), rng.uniform(-100, 100), rng.uniform(-100, 100),
                  rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(0, kTwoPi)};
    const Point3 o = transform_point(pose_to_transform(p), {0, 0, 0});
    EXPECT_EQ(p.x, o.x);
    EXPECT_EQ(p.y, o.y);
    EXPECT_EQ(p.z, o.z);
  }
}

TEST(GeometryProperties, RotationsAreOrthonormal) {
  Rng rng(5);
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const Transform t = pose_to_transform(
        Pose6{0, 0, 0, rng.uniform(-kPi, kPi), rng.uniform(-kPi, kPi), rng.uniform(0, kTwoPi)});
    const auto& r = t.rotation;
    // R^T R == I
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double dot = 0.0;
        for (int k = 0; k < 3; ++k) dot += r[3 * k + a] * r[3 * k + b];
        worst = std::max(worst, std::abs(dot - (a == b ? 1.0 : 0.0)));
      }
    }
    const double det = r[0] * (r[4] * r[8] - r[5] * r[7]) - r[1] * (r[3] * r[8] - r[5] * r[6]) +
                       r[2] * (r[3] * r[7] - r[4] * r[6]);
    worst = std::max(worst, std::abs(det - 1.0));
  }
  EXPECT_LT(worst, 1e-9);
}

TEST(GeometryProperties, RotationErrorIsAMetricOnSamples) {
  Rng rng(13);
  for (int i = 0; i < 300; ++i) {
    const auto rand_pose = [&] {
      return Pose6{0, 0, 0, rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5),
                   rng.uniform(0, kTwoPi)};
    };
    const Pose6 a = rand_pose(), b = rand_pose(), c = rand_pose();
    EXPECT_NEAR(rotation_error(a, b), rotation_error(b, a), 1e-12);
    EXPECT_LE(rotation_error(a, c), rotation_error(a, b) + rotation_error(b, c) + 1e-9);
  }
}

TEST(NormalizeAngle, FoldsIntoRange) {
  EXPECT_DOUBLE_EQ(0.0, normalize_angle(0.0));
  EXPECT_DOUBLE_EQ(0.0, normalize_angle(kTwoPi));
  EXPECT_NEAR(1.0, normalize_angle(1.0 + 2 * kTwoPi), 1e-12);
  EXPECT_NEAR(kTwoPi - 0.5, normalize_angle(-0.5), 1e-12);
  for (double a : {-100.0, -6.3, -1e-9, 0.25, 6.2831, 400.0}) {
    const double n = normalize_angle(a);
    EXPECT_GE(n, 0.0);
    EXPECT_LT(n, kTwoPi);
  }
}

}  // namespace
}  // namespace bnbloc
