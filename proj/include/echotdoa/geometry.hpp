#pragma once

#include <vector>

namespace echotdoa {

/// Cartesian point/vector in meters.  Planar scenes keep z = 0.
struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

Point3 operator+(const Point3& a, const Point3& b);
Point3 operator-(const Point3& a, const Point3& b);
Point3 operator*(double s, const Point3& a);
double dot(const Point3& a, const Point3& b);
double norm(const Point3& a);

/// Fixed transmitting node.  The boresight direction orients the
/// transducer for the directivity model and must be unit length.
struct Anchor {
  int id = 0;
  Point3 position;
  Point3 boresight{0.0, 1.0, 0.0};
};

/// One deployment: anchors, the mobile node, and the propagation speed.
struct Scene {
  std::vector<Anchor> anchors;
  Point3 mobile;
  double speed_of_sound = 343.0;  // m/s

  /// Looks up an anchor by id; throws std::out_of_range for unknown ids.
  const Anchor& anchor(int id) const;

  /// Checks structural invariants (anchor count, distinct positions,
  /// unique ids, unit boresights, positive speed); throws
  /// std::invalid_argument naming the violated condition.
  void validate() const;
};

/// Euclidean distance between two points in meters.
double range(const Point3& a, const Point3& b);

/// Range difference R_i - R_j seen from the mobile node, in meters.
/// Antisymmetric in (i, j); zero when i == j.
double true_range_diff(const Scene& scene, int anchor_i, int anchor_j);

/// Angle in radians between an anchor's boresight and the direction to
/// the mobile node, in [0, pi].  Throws std::invalid_argument when the
/// mobile coincides with the anchor (direction undefined).
double incidence_angle(const Anchor& anchor, const Point3& mobile);

}  // namespace echotdoa
