#ifndef BNBLOC_GEOMETRY_HPP
#define BNBLOC_GEOMETRY_HPP

#include <array>
#include <cmath>

namespace bnbloc {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// A 3D point, meters.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend Point3 operator+(const Point3& a, const Point3& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend Point3 operator-(const Point3& a, const Point3& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend Point3 operator*(double s, const Point3& p) {
    return {s * p.x, s * p.y, s * p.z};
  }
  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

/// Maps an angle to [0, 2*pi).
inline double normalize_angle(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  // fmod can return exactly 2*pi after the correction when a is a tiny
  // negative value; fold that back to zero.
  if (r >= kTwoPi) r = 0.0;
  return r;
}

/// A 6DoF pose: translation in meters, roll/pitch/yaw in radians.
/// Rotation convention: R = Rz(yaw) * Ry(pitch) * Rx(roll) applied to
/// column vectors.
struct Pose6 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  /// Same pose with yaw folded into [0, 2*pi).
  Pose6 normalized() const {
    Pose6 p = *this;
    p.yaw = normalize_angle(yaw);
    return p;
  }
};

/// Row-major 3x3 rotation matrix plus translation.
struct Transform {
  std::array<double, 9> rotation = {1, 0, 0, 0, 1, 0, 0, 0, 1};
  Point3 translation;

  Point3 apply(const Point3& p) const {
    const auto& r = rotation;
    return {r[0] * p.x + r[1] * p.y + r[2] * p.z + translation.x,
            r[3] * p.x + r[4] * p.y + r[5] * p.z + translation.y,
            r[6] * p.x + r[7] * p.y + r[8] * p.z + translation.z};
  }

  /// this * other (apply `other` first).
  Transform compose(const Transform& o) const {
    Transform t;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int k = 0; k < 3; ++k) s += rotation[3 * i + k] * o.rotation[3 * k + j];
        t.rotation[3 * i + j] = s;
      }
    }
    t.translation = apply(o.translation);
    return t;
  }

  /// Rigid inverse (transpose rotation, rotate-negate translation).
  Transform inverse() const {
    Transform t;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) t.rotation[3 * i + j] = rotation[3 * j + i];
    const Point3 nt{-translation.x, -translation.y, -translation.z};
    t.translation = {t.rotation[0] * nt.x + t.rotation[1] * nt.y + t.rotation[2] * nt.z,
                     t.rotation[3] * nt.x + t.rotation[4] * nt.y + t.rotation[5] * nt.z,
                     t.rotation[6] * nt.x + t.rotation[7] * nt.y + t.rotation[8] * nt.z};
    return t;
  }
};

/// Builds the rigid transform of a pose: R = Rz(yaw)*Ry(pitch)*Rx(roll),
/// t = (x, y, z).
inline Transform pose_to_transform(const Pose6& p) {
  const double ca = std::cos(p.roll), sa = std::sin(p.roll);
  const double cb = std::cos(p.pitch), sb = std::sin(p.pitch);
  const double cg = std::cos(p.yaw), sg = std::sin(p.yaw);
  Transform t;
  t.rotation = {cg * cb, cg * sb * sa - sg * ca, cg * sb * ca + sg * sa,
                sg * cb, sg * sb * sa + cg * ca, sg * sb * ca - cg * sa,
                -sb,     cb * sa,                cb * ca};
  t.translation = {p.x, p.y, p.z};
  return t;
}

inline Point3 transform_point(const Transform& t, const Point3& p) {
  return t.apply(p);
}

/// Geodesic angle between the rotations of two poses, in [0, pi].
inline double rotation_error(const Pose6& a, const Pose6& b) {
  const Transform ta = pose_to_transform(a);
  const Transform tb = pose_to_transform(b);
  // trace(Ra^T * Rb)
  double tr = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) tr += ta.rotation[3 * k + i] * tb.rotation[3 * k + i];
  double c = 0.5 * (tr - 1.0);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return std::acos(c);
}

/// Euclidean distance between the translations of two poses.
inline double translation_error(const Pose6& a, const Pose6& b) {
  return (Point3{a.x, a.y, a.z} - Point3{b.x, b.y, b.z}).norm();
}

}  // namespace bnbloc

#endif  // BNBLOC_GEOMETRY_HPP
