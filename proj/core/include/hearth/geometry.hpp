#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hearth {

/// Point or direction in meters. y is up; the floor plane is x/z.
struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }
  double planar_norm() const { return std::hypot(x, z); }
  bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }

  bool operator==(const Vec3&) const = default;
};

inline double planar_distance(const Vec3& a, const Vec3& b) { return (a - b).planar_norm(); }

/// Axis-aligned rectangle on the floor plane.
struct Rect {
  double min_x = 0.0;
  double min_z = 0.0;
  double max_x = 0.0;
  double max_z = 0.0;

  double width() const { return max_x - min_x; }
  double depth() const { return max_z - min_z; }
  double area() const { return width() * depth(); }
  Vec3 center() const { return {(min_x + max_x) / 2, 0.0, (min_z + max_z) / 2}; }

  Rect inflated(double r) const { return {min_x - r, min_z - r, max_x + r, max_z + r}; }

  bool contains(double x, double z, double eps = 0.0) const {
    return x >= min_x - eps && x <= max_x + eps && z >= min_z - eps && z <= max_z + eps;
  }
  /// Strict interior test (points on the boundary are outside).
  bool strictly_contains(double x, double z) const {
    return x > min_x && x < max_x && z > min_z && z < max_z;
  }
  bool contains(const Rect& o, double eps = 1e-9) const {
    return o.min_x >= min_x - eps && o.max_x <= max_x + eps && o.min_z >= min_z - eps &&
           o.max_z <= max_z + eps;
  }
  /// Positive-area intersection.
  bool overlaps(const Rect& o, double eps = 1e-9) const {
    return std::min(max_x, o.max_x) - std::max(min_x, o.min_x) > eps &&
           std::min(max_z, o.max_z) - std::max(min_z, o.min_z) > eps;
  }
  /// Euclidean distance from a point to the rectangle (0 inside).
  double distance_to(double x, double z) const {
    double dx = std::max({min_x - x, 0.0, x - max_x});
    double dz = std::max({min_z - z, 0.0, z - max_z});
    return std::hypot(dx, dz);
  }

  bool operator==(const Rect&) const = default;
};

struct AABB {
  Vec3 min;
  Vec3 max;

  Vec3 center() const { return (min + max) * 0.5; }
  Rect footprint() const { return {min.x, min.z, max.x, max.z}; }
  /// Positive-volume intersection.
  bool overlaps(const AABB& o, double eps = 1e-9) const {
    return std::min(max.x, o.max.x) - std::max(min.x, o.min.x) > eps &&
           std::min(max.y, o.max.y) - std::max(min.y, o.min.y) > eps &&
           std::min(max.z, o.max.z) - std::max(min.z, o.min.z) > eps;
  }

  bool operator==(const AABB&) const = default;
};

inline double deg_to_rad(double d) { return d * std::numbers::pi / 180.0; }
inline double rad_to_deg(double r) { return r * 180.0 / std::numbers::pi; }

/// Maps any angle in degrees into [-180, 180).
inline double normalize_yaw(double deg) {
  double r = std::fmod(deg + 180.0, 360.0);
  if (r < 0) r += 360.0;
  r -= 180.0;
  if (r >= 180.0) r -= 360.0;
  return r;
}

/// Horizontal heading (degrees) of a planar direction. Yaw 0 faces +z, yaw 90 faces +x.
inline double heading_of(double dx, double dz) { return rad_to_deg(std::atan2(dx, dz)); }

inline Vec3 planar_forward(double yaw_deg) {
  double r = deg_to_rad(yaw_deg);
  return {std::sin(r), 0.0, std::cos(r)};
}

/// Rounds to the millimetre grid used by every generated coordinate.
inline double quantize_mm(double v) {
  double q = std::round(v * 1000.0) / 1000.0;
  return q == 0.0 ? 0.0 : q;
}

}  // namespace hearth
