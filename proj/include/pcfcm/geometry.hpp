#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pcfcm {

using Vec2 = Eigen::Vector2d;

// Error kinds used across the library. Everything derives from Error so a
// front end can catch one type.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : Error {
  using Error::Error;
};
struct ArgumentError : Error {
  using Error::Error;
};
struct DegenerateGeometry : Error {
  using Error::Error;
};
struct IntegrationError : Error {
  using Error::Error;
};
struct SolverError : Error {
  using Error::Error;
};
struct QueryError : Error {
  using Error::Error;
};

/// Axis-aligned rectangle [lo.x, hi.x] x [lo.y, hi.y].
struct Box {
  Vec2 lo = Vec2::Zero();
  Vec2 hi = Vec2::Ones();

  Box() = default;
  Box(const Vec2& lower, const Vec2& upper) : lo(lower), hi(upper) {}
  Box(double x0, double y0, double x1, double y1) : lo(x0, y0), hi(x1, y1) {}

  [[nodiscard]] Vec2 center() const { return 0.5 * (lo + hi); }
  [[nodiscard]] Vec2 size() const { return hi - lo; }
  [[nodiscard]] double area() const { return (hi.x() - lo.x()) * (hi.y() - lo.y()); }
  [[nodiscard]] double half_diagonal() const { return 0.5 * (hi - lo).norm(); }

  [[nodiscard]] bool contains(const Vec2& x) const {
    return x.x() >= lo.x() && x.x() <= hi.x() && x.y() >= lo.y() && x.y() <= hi.y();
  }

  /// Child quadrant q in {0,1,2,3}: bit 0 selects the upper x half, bit 1 the upper y half.
  [[nodiscard]] Box quadrant(int q) const {
    const Vec2 c = center();
    Box b;
    b.lo.x() = (q & 1) ? c.x() : lo.x();
    b.hi.x() = (q & 1) ? hi.x() : c.x();
    b.lo.y() = (q & 2) ? c.y() : lo.y();
    b.hi.y() = (q & 2) ? hi.y() : c.y();
    return b;
  }

  /// Physical point for reference coordinates (xi, eta) in [-1,1]^2.
  [[nodiscard]] Vec2 map(double xi, double eta) const {
    return {lo.x() + 0.5 * (xi + 1.0) * (hi.x() - lo.x()),
            lo.y() + 0.5 * (eta + 1.0) * (hi.y() - lo.y())};
  }

  /// Reference coordinates of a physical point.
  [[nodiscard]] Vec2 local(const Vec2& x) const {
    return {2.0 * (x.x() - lo.x()) / (hi.x() - lo.x()) - 1.0,
            2.0 * (x.y() - lo.y()) / (hi.y() - lo.y()) - 1.0};
  }

  /// Determinant of the reference-to-physical map.
  [[nodiscard]] double jacobian() const { return 0.25 * area(); }
};

/// Straight line piece between two points.
struct Segment {
  Vec2 a;
  Vec2 b;
  [[nodiscard]] double length() const { return (b - a).norm(); }
};

/// Liang-Barsky clip of a segment against a closed box. Returns false if
/// nothing (or only a single point) survives.
bool clip_segment(const Segment& s, const Box& box, Segment& out);

}  // namespace pcfcm
