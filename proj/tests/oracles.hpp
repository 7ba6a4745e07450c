#pragma once

// Test-only oracles: independent routes used to freeze expected values.
// Nothing here is included by the library.

#include "hypspec/common.hpp"

#include <random>

namespace oracle {

using hypspec::Vec;

// Central finite differences of a scalar callable.
template <class F>
double fd1(F&& f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

template <class F>
double fd2(F&& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

// Gradient and Hessian of f: R^m -> R by central differences.
template <class F>
Vec fd_gradient(F&& f, const Vec& x, double h = 1e-6) {
  Vec g(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    g[i] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

template <class F>
hypspec::Mat fd_hessian(F&& f, const Vec& x, double h = 1e-4) {
  const int m = static_cast<int>(x.size());
  hypspec::Mat H(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j <= i; ++j) {
      Vec a = x, b = x, c = x, d = x;
      a[i] += h; a[j] += h;
      b[i] += h; b[j] -= h;
      c[i] -= h; c[j] += h;
      d[i] -= h; d[j] -= h;
      H(i, j) = H(j, i) = (f(a) - f(b) - f(c) + f(d)) / (4.0 * h * h);
    }
  }
  return H;
}

// Dirichlet bottom of the geodesic hyperbolic disk of radius R, via the
// 1-D radial problem -(sinh t f')' / sinh t = lambda f, f(R) = 0: P1 elements
// with the sinh weight and shifted inverse (Thomas) iteration. Independent of
// the 2-D FEM path entirely.
inline double radial_disk_lambda0(double R, int N = 20000, double shift = 0.2) {
  std::vector<double> kd(N, 0.0), ko(N - 1, 0.0);  // stiffness diag/offdiag
  std::vector<double> md(N, 0.0), mo(N - 1, 0.0);  // mass diag/offdiag
  const double h = R / N;
  const double gx[3] = {-std::sqrt(3.0 / 5.0), 0.0, std::sqrt(3.0 / 5.0)};
  const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (int e = 0; e < N; ++e) {
    const double a = e * h, b = a + h;
    double ke = 0.0, maa = 0.0, mbb = 0.0, mab = 0.0;
    for (int q = 0; q < 3; ++q) {
      const double t = 0.5 * (a + b) + 0.5 * h * gx[q];
      const double w = 0.5 * h * gw[q] * std::sinh(t);
      const double la = (b - t) / h, lb = (t - a) / h;
      ke += w / (h * h);
      maa += w * la * la;
      mbb += w * lb * lb;
      mab += w * la * lb;
    }
    // unknowns are nodes 0..N-1 (node N carries the Dirichlet condition)
    if (e + 1 < N) {
      kd[e] += ke;
      kd[e + 1] += ke;
      ko[e] -= ke;
      md[e] += maa;
      md[e + 1] += mbb;
      mo[e] += mab;
    } else {
      kd[e] += ke;
      md[e] += maa;
    }
  }
  // inverse iteration on (K - shift M) x = M x
  std::vector<double> ad(N), ao(N - 1);
  for (int i = 0; i < N; ++i) ad[i] = kd[i] - shift * md[i];
  for (int i = 0; i + 1 < N; ++i) ao[i] = ko[i] - shift * mo[i];
  std::vector<double> x(N, 1.0), y(N), c(N - 1), d(N);
  double lambda = shift;
  for (int it = 0; it < 200; ++it) {
    // rhs = M x
    for (int i = 0; i < N; ++i) {
      y[i] = md[i] * x[i];
      if (i > 0) y[i] += mo[i - 1] * x[i - 1];
      if (i + 1 < N) y[i] += mo[i] * x[i + 1];
    }
    // Thomas solve (A tridiagonal symmetric)
    c[0] = ao[0] / ad[0];
    d[0] = y[0] / ad[0];
    for (int i = 1; i < N; ++i) {
      const double m = ad[i] - ao[i - 1] * c[i - 1];
      if (i + 1 < N) c[i] = ao[i] / m;
      d[i] = (y[i] - ao[i - 1] * d[i - 1]) / m;
    }
    x[N - 1] = d[N - 1];
    for (int i = N - 2; i >= 0; --i) x[i] = d[i] - c[i] * x[i + 1];
    double nrm = 0.0;
    for (double v : x) nrm += v * v;
    nrm = std::sqrt(nrm);
    for (double& v : x) v /= nrm;
    // Rayleigh quotient
    double xkx = 0.0, xmx = 0.0;
    for (int i = 0; i < N; ++i) {
      double kx = kd[i] * x[i], mx = md[i] * x[i];
      if (i > 0) {
        kx += ko[i - 1] * x[i - 1];
        mx += mo[i - 1] * x[i - 1];
      }
      if (i + 1 < N) {
        kx += ko[i] * x[i + 1];
        mx += mo[i] * x[i + 1];
      }
      xkx += x[i] * kx;
      xmx += x[i] * mx;
    }
    lambda = xkx / xmx;
  }
  return lambda;
}

// Deterministic RNG helpers for property-style tests.
inline std::mt19937_64 rng(std::uint64_t seed = 0x5eed1234abcdefULL) {
  return std::mt19937_64(seed);
}

inline Vec random_unit(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = normal(gen);
  return v / v.norm();
}

inline Vec random_in_ball(std::mt19937_64& gen, int n, double rmax = 0.95) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double r = rmax * std::pow(uni(gen), 1.0 / n);
  return r * random_unit(gen, n);
}

}  // namespace oracle
