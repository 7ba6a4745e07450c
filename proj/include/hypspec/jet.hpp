#pragma once

#include "hypspec/common.hpp"

namespace hypspec {

// Second-order forward-mode jet: value, gradient and Hessian with respect to a
// fixed set of m seed variables. Propagating charts through Jet2 arithmetic
// yields first and second chart derivatives that are exact up to rounding,
// which is what the curvature code needs to hit 1e-6 residual tolerances.
struct Jet2 {
  double v = 0.0;
  Vec g;
  Mat h;

  Jet2() = default;
  explicit Jet2(int m) : v(0.0), g(Vec::Zero(m)), h(Mat::Zero(m, m)) {}
  Jet2(double value, int m) : v(value), g(Vec::Zero(m)), h(Mat::Zero(m, m)) {}

  int dim() const { return static_cast<int>(g.size()); }

  static Jet2 constant(double value, int m) { return Jet2(value, m); }

  static Jet2 variable(double value, int i, int m) {
    Jet2 j(value, m);
    j.g[i] = 1.0;
    return j;
  }
};

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v += b.v;
  r.g += b.g;
  r.h += b.h;
  return r;
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
  Jet2 r = a;
  r.v -= b.v;
  r.g -= b.g;
  r.h -= b.h;
  return r;
}
inline Jet2 operator-(const Jet2& a) {
  Jet2 r = a;
  r.v = -r.v;
  r.g = -r.g;
  r.h = -r.h;
  return r;
}
inline Jet2 operator+(const Jet2& a, double c) {
  Jet2 r = a;
  r.v += c;
  return r;
}
inline Jet2 operator+(double c, const Jet2& a) { return a + c; }
inline Jet2 operator-(const Jet2& a, double c) { return a + (-c); }
inline Jet2 operator-(double c, const Jet2& a) { return (-a) + c; }

inline Jet2 operator*(const Jet2& a, const Jet2& b) {
  Jet2 r(a.dim());
  r.v = a.v * b.v;
  r.g = a.v * b.g + b.v * a.g;
  r.h = a.v * b.h + b.v * a.h + a.g * b.g.transpose() + b.g * a.g.transpose();
  return r;
}
inline Jet2 operator*(const Jet2& a, double c) {
  Jet2 r = a;
  r.v *= c;
  r.g *= c;
  r.h *= c;
  return r;
}
inline Jet2 operator*(double c, const Jet2& a) { return a * c; }

// Chain rule for a scalar function given (f, f', f'') at a.v.
inline Jet2 jet_apply(const Jet2& a, double f, double fp, double fpp) {
  Jet2 r(a.dim());
  r.v = f;
  r.g = fp * a.g;
  r.h = fp * a.h + fpp * (a.g * a.g.transpose());
  return r;
}

inline Jet2 inv(const Jet2& a) {
  const double w = 1.0 / a.v;
  return jet_apply(a, w, -w * w, 2.0 * w * w * w);
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) { return a * inv(b); }
inline Jet2 operator/(const Jet2& a, double c) { return a * (1.0 / c); }
inline Jet2 operator/(double c, const Jet2& a) { return inv(a) * c; }

inline Jet2 sqrt(const Jet2& a) {
  const double s = std::sqrt(a.v);
  return jet_apply(a, s, 0.5 / s, -0.25 / (s * a.v));
}
inline Jet2 exp(const Jet2& a) {
  const double e = std::exp(a.v);
  return jet_apply(a, e, e, e);
}
inline Jet2 log(const Jet2& a) {
  return jet_apply(a, std::log(a.v), 1.0 / a.v, -1.0 / (a.v * a.v));
}
inline Jet2 sin(const Jet2& a) {
  return jet_apply(a, std::sin(a.v), std::cos(a.v), -std::sin(a.v));
}
inline Jet2 cos(const Jet2& a) {
  return jet_apply(a, std::cos(a.v), -std::sin(a.v), -std::cos(a.v));
}
inline Jet2 sinh(const Jet2& a) {
  return jet_apply(a, std::sinh(a.v), std::cosh(a.v), std::sinh(a.v));
}
inline Jet2 cosh(const Jet2& a) {
  return jet_apply(a, std::cosh(a.v), std::sinh(a.v), std::cosh(a.v));
}
inline Jet2 tanh(const Jet2& a) {
  const double th = std::tanh(a.v);
  const double sech2 = 1.0 - th * th;
  return jet_apply(a, th, sech2, -2.0 * th * sech2);
}
inline Jet2 pow_int(const Jet2& a, int n) {
  Jet2 r = Jet2::constant(1.0, a.dim());
  for (int i = 0; i < n; ++i) r = r * a;
  return r;
}

// Analytic-at-zero radial helpers. Each one is a function of q = t^2 that stays
// smooth through q = 0, so polar-style charts u -> f(|u|^2) u have exact jets
// at the pole. Series branches are used where the closed form loses digits.

// cos(sqrt(q))
inline Jet2 cos_sqrt(const Jet2& q) {
  if (std::abs(q.v) < 1e-8) {
    // 1 - q/2 + q^2/24 - q^3/720
    double f = 1.0 - q.v / 2 + q.v * q.v / 24 - q.v * q.v * q.v / 720;
    double fp = -0.5 + q.v / 12 - q.v * q.v / 240;
    double fpp = 1.0 / 12 - q.v / 120;
    return jet_apply(q, f, fp, fpp);
  }
  const double t = std::sqrt(q.v);
  const double c = std::cos(t), s = std::sin(t);
  const double fp = -s / (2 * t);
  const double fpp = (s / t - c) / (4 * q.v);
  return jet_apply(q, c, fp, fpp);
}

// sin(sqrt(q))/sqrt(q)
inline Jet2 sinc_sqrt(const Jet2& q) {
  if (std::abs(q.v) < 1e-8) {
    double f = 1.0 - q.v / 6 + q.v * q.v / 120 - q.v * q.v * q.v / 5040;
    double fp = -1.0 / 6 + q.v / 60 - q.v * q.v / 1680;
    double fpp = 1.0 / 60 - q.v / 840;
    return jet_apply(q, f, fp, fpp);
  }
  const double t = std::sqrt(q.v);
  const double c = std::cos(t), s = std::sin(t);
  const double f = s / t;
  const double fp = (c - f) / (2 * q.v);
  const double fpp = (-s / t - 3 * (c - f) / q.v) / (4 * q.v);
  return jet_apply(q, f, fp, fpp);
}

// tanh(sqrt(q))/sqrt(q)
inline Jet2 tanhc_sqrt(const Jet2& q) {
  if (std::abs(q.v) < 1e-6) {
    // tanh(t)/t = 1 - q/3 + 2q^2/15 - 17q^3/315
    double f = 1.0 - q.v / 3 + 2 * q.v * q.v / 15 - 17 * q.v * q.v * q.v / 315;
    double fp = -1.0 / 3 + 4 * q.v / 15 - 17 * q.v * q.v / 105;
    double fpp = 4.0 / 15 - 34 * q.v / 105;
    return jet_apply(q, f, fp, fpp);
  }
  const double t = std::sqrt(q.v);
  const double th = std::tanh(t);
  const double sech2 = 1.0 - th * th;
  const double f = th / t;
  // df/dq and d2f/dq2 via df/dt = (sech2 - f)/t
  const double ft = (sech2 - f) / t;
  const double ftt = (-2 * th * sech2 - 2 * ft) / t;
  const double fp = ft / (2 * t);
  const double fpp = (ftt - ft / t) / (4 * q.v);
  return jet_apply(q, f, fp, fpp);
}

}  // namespace hypspec
