#pragma once

#include "omnisafe/linalg.hpp"

namespace omnisafe {

double point_segment_distance(const Vec3& x, const Vec3& a, const Vec3& b);

// Minimum distance between segments [p1, p2] and [q1, q2]. Either segment may
// be a point.
double segment_distance(const Vec3& p1, const Vec3& p2, const Vec3& q1,
                        const Vec3& q2);

}  // namespace omnisafe
