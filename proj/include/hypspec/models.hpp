#pragma once

#include "hypspec/common.hpp"

namespace hypspec {

// Point of H^{n+1} in the Poincare ball model: Euclidean coordinates with
// |x| < 1. Points within 1e-14 of the sphere are accepted but flagged, since
// boundary-asymptotic sampling has to evaluate very close to |x| = 1.
struct BallPoint {
  Vec x;

  BallPoint() = default;
  explicit BallPoint(Vec coords) : x(std::move(coords)) {
    const double r = x.norm();
    if (!(r < 1.0)) throw domain_error("BallPoint: |x| must be < 1, got " + std::to_string(r));
  }

  int ambient_dim() const { return static_cast<int>(x.size()); }
  bool near_boundary() const { return x.norm() >= kNearBoundaryFlag; }
};

// Point of the upper half-space model: horizontal coordinates and height y > 0.
struct HalfSpacePoint {
  Vec x;
  double y = 1.0;

  HalfSpacePoint() = default;
  HalfSpacePoint(Vec horizontal, double height) : x(std::move(horizontal)), y(height) {
    if (!(y > 0.0)) throw domain_error("HalfSpacePoint: height must be > 0");
  }
};

// Conformal factor of the ball model and its Euclidean gradient.
// value = (1 - |x|^2)/2, gradient = -x.
struct ConformalFactor {
  double value = 0.0;
  Vec gradient;
};

inline ConformalFactor conformal_factor(const BallPoint& p) {
  ConformalFactor f;
  f.value = 0.5 * (1.0 - p.x.squaredNorm());
  f.gradient = -p.x;
  return f;
}

// Ball-model hyperbolic distance,
// d(p,q) = acosh(1 + 2|p-q|^2 / ((1-|p|^2)(1-|q|^2))).
inline double hyperbolic_distance(const BallPoint& p, const BallPoint& q) {
  const double dd = (p.x - q.x).squaredNorm();
  if (dd == 0.0) return 0.0;
  const double a = 1.0 - p.x.squaredNorm();
  const double b = 1.0 - q.x.squaredNorm();
  return std::acosh(1.0 + 2.0 * dd / (a * b));
}

inline double hyperbolic_distance(const HalfSpacePoint& p, const HalfSpacePoint& q) {
  const double dd = (p.x - q.x).squaredNorm() + sq(p.y - q.y);
  if (dd == 0.0) return 0.0;
  return std::acosh(1.0 + dd / (2.0 * p.y * q.y));
}

// Hyperbolic distance from the ball-model origin; robust near the boundary.
inline double radius_from_origin(const BallPoint& p) {
  return 2.0 * std::atanh(p.x.norm());
}

// Isometry between the ball and upper half-space models. The anchor is the
// boundary point sent to infinity; geometrically this is the inversion through
// the sphere of radius sqrt(2) centred at the anchor, followed by a rotation
// that makes the anchor direction the height axis. The normalisation is fixed
// so that the ball origin maps to height exactly 1.
class BallHalfSpaceMap {
 public:
  explicit BallHalfSpaceMap(Vec anchor) : a_(std::move(anchor)) {
    const int n1 = static_cast<int>(a_.size());
    const double norm = a_.norm();
    if (std::abs(norm - 1.0) > 1e-12)
      throw input_error("BallHalfSpaceMap: anchor must be a unit vector");
    a_ /= norm;
    // Householder frame: columns 0..n-1 span the anchor's orthogonal
    // complement, used as horizontal axes of the half-space model.
    basis_ = Mat::Identity(n1, n1);
    Vec v = a_;
    v[n1 - 1] -= 1.0;
    const double vv = v.squaredNorm();
    if (vv > 1e-28) basis_ -= (2.0 / vv) * (v * v.transpose());
    // After the reflection, column n1-1 is the anchor itself.
  }

  HalfSpacePoint to_halfspace(const BallPoint& p) const {
    Vec d = p.x - a_;
    const double dd = d.squaredNorm();
    if (dd < 1e-28)
      throw near_singular_transform_error("ball_to_halfspace: point coincides with the anchor");
    Vec u = a_ + (2.0 / dd) * d;  // inversion; unit sphere -> {<u,a> = 0}
    const double height = -u.dot(a_);
    if (!(height > 0.0))
      throw near_singular_transform_error("ball_to_halfspace: image height is not positive");
    const int n = static_cast<int>(a_.size()) - 1;
    Vec horizontal(n);
    for (int i = 0; i < n; ++i) horizontal[i] = u.dot(basis_.col(i));
    return HalfSpacePoint(std::move(horizontal), height);
  }

  BallPoint to_ball(const HalfSpacePoint& q) const {
    const int n1 = static_cast<int>(a_.size());
    Vec u = -q.y * a_;
    for (int i = 0; i < n1 - 1; ++i) u += q.x[i] * basis_.col(i);
    Vec d = u - a_;
    const double dd = d.squaredNorm();
    Vec x = a_ + (2.0 / dd) * d;  // the inversion is an involution
    return BallPoint(std::move(x));
  }

  // Image of a boundary direction (|z| = 1, z != anchor) in the plane {y = 0}.
  Vec boundary_to_plane(const Vec& z) const {
    Vec d = z - a_;
    const double dd = d.squaredNorm();
    if (dd < 1e-28)
      throw near_singular_transform_error("boundary_to_plane: point coincides with the anchor");
    Vec u = a_ + (2.0 / dd) * d;
    const int n = static_cast<int>(a_.size()) - 1;
    Vec horizontal(n);
    for (int i = 0; i < n; ++i) horizontal[i] = u.dot(basis_.col(i));
    return horizontal;
  }

  const Vec& anchor() const { return a_; }

 private:
  Vec a_;
  Mat basis_;
};

inline HalfSpacePoint ball_to_halfspace(const BallPoint& p, const Vec& anchor) {
  return BallHalfSpaceMap(anchor).to_halfspace(p);
}

inline BallPoint halfspace_to_ball(const HalfSpacePoint& q, const Vec& anchor) {
  return BallHalfSpaceMap(anchor).to_ball(q);
}

}  // namespace hypspec
