#include "omnisafe/geometry.hpp"

#include <algorithm>

namespace omnisafe {

double point_segment_distance(const Vec3& x, const Vec3& a, const Vec3& b) {
  const Vec3 d = b - a;
  const double len2 = d.squaredNorm();
  if (len2 == 0.0) return (x - a).norm();
  const double t = std::clamp((x - a).dot(d) / len2, 0.0, 1.0);
  return (x - (a + t * d)).norm();
}

double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1,
                        const Vec3& q2) {
  const Vec3 d1 = p2 - p1, d2 = q2 - q1, r = p1 - q1;
  const double a = d1.squaredNorm(), e = d2.squaredNorm();
  const double f = d2.dot(r);
  if (a == 0.0 && e == 0.0) return r.norm();
  if (a == 0.0) return point_segment_distance(p1, q1, q2);
  if (e == 0.0) return point_segment_distance(q1, p1, p2);
  const double c = d1.dot(r), b = d1.dot(d2);
  const double denom = a * e - b * b;
  double s = denom > 1e-14 * a * e ? std::clamp((b * f - c * e) / denom, 0.0, 1.0)
                                   : 0.0;
  double t = (b * s + f) / e;
  if (t < 0.0) {
    t = 0.0;
    s = std::clamp(-c / a, 0.0, 1.0);
  } else if (t > 1.0) {
    t = 1.0;
    s = std::clamp((b - c) / a, 0.0, 1.0);
  }
  const double best = (p1 + s * d1 - (q1 + t * d2)).norm();
  // Endpoint checks guard the near-parallel branch.
  return std::min({best, point_segment_distance(p1, q1, q2),
                   point_segment_distance(p2, q1, q2),
                   point_segment_distance(q1, p1, p2),
                   point_segment_distance(q2, p1, p2)});
}

}  // namespace omnisafe
