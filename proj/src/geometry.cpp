#include "echotdoa/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_set>

namespace echotdoa {

Point3 operator+(const Point3& a, const Point3& b) {
  return {a.x + b.x, a.y + b.y, a.z + b.z};
}

Point3 operator-(const Point3& a, const Point3& b) {
  return {a.x - b.x, a.y - b.y, a.z - b.z};
}

Point3 operator*(double s, const Point3& a) {
  return {s * a.x, s * a.y, s * a.z};
}

double dot(const Point3& a, const Point3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

double norm(const Point3& a) { return std::sqrt(dot(a, a)); }

double range(const Point3& a, const Point3& b) { return norm(a - b); }

const Anchor& Scene::anchor(int id) const {
  auto it = std::find_if(anchors.begin(), anchors.end(),
                         [id](const Anchor& a) { return a.id == id; });
  if (it == anchors.end()) {
    throw std::out_of_range("scene has no anchor with id " +
                            std::to_string(id));
  }
  return *it;
}

void Scene::validate() const {
  if (anchors.size() < 2) {
    throw std::invalid_argument("scene needs at least two anchors");
  }
  if (!(speed_of_sound > 0.0)) {
    throw std::invalid_argument("speed of sound must be positive");
  }
  std::unordered_set<int> ids;
  for (const Anchor& a : anchors) {
    if (!ids.insert(a.id).second) {
      throw std::invalid_argument("duplicate anchor id " +
                                  std::to_string(a.id));
    }
    if (std::abs(norm(a.boresight) - 1.0) > 1e-9) {
      throw std::invalid_argument("anchor " + std::to_string(a.id) +
                                  " boresight is not unit length");
    }
  }
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    for (std::size_t j = i + 1; j < anchors.size(); ++j) {
      if (range(anchors[i].position, anchors[j].position) == 0.0) {
        throw std::invalid_argument(
            "anchors " + std::to_string(anchors[i].id) + " and " +
            std::to_string(anchors[j].id) + " share a position");
      }
    }
  }
}

double true_range_diff(const Scene& scene, int anchor_i, int anchor_j) {
  const Anchor& ai = scene.anchor(anchor_i);
  const Anchor& aj = scene.anchor(anchor_j);
  return range(ai.position, scene.mobile) - range(aj.position, scene.mobile);
}

double incidence_angle(const Anchor& anchor, const Point3& mobile) {
  Point3 d = mobile - anchor.position;
  double r = norm(d);
  if (r == 0.0) {
    throw std::invalid_argument("mobile coincides with anchor " +
                                std::to_string(anchor.id) +
                                "; incidence angle undefined");
  }
  double c = dot(d, anchor.boresight) / (r * norm(anchor.boresight));
  return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace echotdoa
