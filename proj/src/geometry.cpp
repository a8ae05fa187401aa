#include "pcfcm/geometry.hpp"

#include <algorithm>

namespace pcfcm {

bool clip_segment(const Segment& s, const Box& box, Segment& out) {
  const Vec2 d = s.b - s.a;
  double t0 = 0.0;
  double t1 = 1.0;
  for (int axis = 0; axis < 2; ++axis) {
    const double p = d[axis];
    const double lo = box.lo[axis] - s.a[axis];
    const double hi = box.hi[axis] - s.a[axis];
    if (p == 0.0) {
      if (lo > 0.0 || hi < 0.0) return false;
      continue;
    }
    double ta = lo / p;
    double tb = hi / p;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 >= t1) return false;
  }
  out.a = s.a + t0 * d;
  out.b = s.a + t1 * d;
  return true;
}

}  // namespace pcfcm
