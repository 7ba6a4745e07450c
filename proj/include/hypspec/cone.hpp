#pragma once

#include "hypspec/patch.hpp"
#include "hypspec/radial.hpp"

namespace hypspec {

// Cone over a link in the boundary sphere: generators tau * z, tau in (0,1].
// For m = 2 the link is a circle on S^2 carried explicitly; for higher m only
// round equatorial links (closed-form volume) are supported.
struct Cone {
  int m = 2;
  double omega = 0.0;  // (m-1)-volume of the link in the round metric
  std::function<Vec(double)> link_chart;   // m = 2 only
  std::function<Vec(double)> link_dchart;  // derivative in the link parameter
  std::string name;
};

// Circle at latitude phi0 on S^2: z(t) = (cos(phi0) cos t, cos(phi0) sin t,
// sin(phi0)). Link volume measured by arclength quadrature at the configured
// resolution; the closed form is 2 pi cos(phi0).
inline Cone cone_over_circle(double latitude, double arclength_resolution = 1e-4) {
  Cone c;
  c.m = 2;
  c.name = "circle_lat" + std::to_string(latitude);
  const double cl = std::cos(latitude), sl = std::sin(latitude);
  c.link_chart = [cl, sl](double t) {
    Vec z(3);
    z << cl * std::cos(t), cl * std::sin(t), sl;
    return z;
  };
  c.link_dchart = [cl](double t) {
    Vec d(3);
    d << -cl * std::sin(t), cl * std::cos(t), 0.0;
    return d;
  };
  const int segs = std::max(16, static_cast<int>(2.0 * M_PI / arclength_resolution));
  double len = 0.0;
  Vec prev = c.link_chart(0.0);
  for (int i = 1; i <= segs; ++i) {
    Vec cur = c.link_chart(2.0 * M_PI * i / segs);
    len += (cur - prev).norm();
    prev = cur;
  }
  c.omega = len;
  return c;
}

// Round equatorial S^{m-1} link; omega = 2 pi^{m/2} / Gamma(m/2).
inline Cone cone_over_equator(int m) {
  Cone c;
  c.m = m;
  c.name = "equator_m" + std::to_string(m);
  c.omega = 2.0 * std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m);
  return c;
}

// Radial part of the (geometer, nonnegative) Laplacian on an m-cone:
// -Delta f = f''(r) + (m-1) coth(r) f'(r).
inline Complex cone_radial_laplacian(int m, const RadialProfile& f, double r) {
  if (!(r > 0.0)) throw domain_error("cone_radial_laplacian: r must be positive");
  const RadialValue v = f(r);
  return v.d2 + (m - 1.0) / std::tanh(r) * v.d1;
}

// ---------------------------------------------------------------------------
// Weyl sequence residuals on the cone.
// ---------------------------------------------------------------------------

struct WeylRow {
  int k = 0;
  double R = 0.0;
  double residual = 0.0;  // int |Delta f - lambda f|^2 dVol
  double norm = 0.0;      // int |f|^2 dVol
  double ratio = 0.0;
  double eps_k = 0.0;     // 4 epsilon_{R_k}
  bool pass = false;
};

struct WeylReport {
  std::vector<WeylRow> rows;
  bool ratios_decreasing = false;
  bool all_pass = false;
};

// Residuals of the windowed test functions on the cone. The volume integral
// factorises through the link volume, which multiplies both sides and cancels
// from the ratio. sigma > 0 smooths the windows first.
inline WeylReport cone_weyl_residual(const Cone& cone, double lambda,
                                     const std::vector<double>& R_sequence, double sigma_frac = 0.0) {
  if (R_sequence.empty()) throw input_error("cone_weyl_residual: empty R sequence");
  for (std::size_t i = 1; i < R_sequence.size(); ++i)
    if (!(R_sequence[i] > 2.0 * R_sequence[i - 1]))
      throw input_error("cone_weyl_residual: sequence must double, R[" + std::to_string(i) +
                        "] <= 2 R[" + std::to_string(i - 1) + "]");
  WeylReport rep;
  rep.ratios_decreasing = true;
  rep.all_pass = true;
  double prev_ratio = kInf;
  for (std::size_t k = 0; k < R_sequence.size(); ++k) {
    const double R = R_sequence[k];
    RadialProfile u = upsilon_profile(cone.m, lambda, R);
    if (sigma_frac > 0.0) u = mollify(u, sigma_frac * R);
    const ProfileIntegrals I = profile_integrals(u);
    WeylRow row;
    row.k = static_cast<int>(k);
    row.R = R;
    row.residual = cone.omega * I.op_sq;
    row.norm = cone.omega * I.norm_sq;
    row.ratio = row.residual / row.norm;
    row.eps_k = 4.0 * epsilon_R(cone.m, lambda, R);
    row.pass = row.residual <= row.eps_k * row.norm;
    rep.ratios_decreasing = rep.ratios_decreasing && row.ratio < prev_ratio;
    prev_ratio = row.ratio;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }
  rep.all_pass = rep.all_pass && rep.ratios_decreasing;
  return rep;
}

// ---------------------------------------------------------------------------
// Band patches with Euclidean-scaled parameters. Their Gram matrices stay
// well-conditioned arbitrarily close to the boundary sphere, which is what
// deep-radius volume integrals need.
// ---------------------------------------------------------------------------

// Piece of the cone over a circle link: (tau, t) -> tau z(t), tau in the given
// Euclidean range.
inline ImmersedPatch cone_band_patch(double latitude, double tau_lo, double tau_hi) {
  const double cl = std::cos(latitude), sl = std::sin(latitude);
  auto chart = [cl, sl](const std::vector<Jet2>& u) {
    std::vector<Jet2> out;
    out.reserve(3);
    out.push_back(u[0] * (cos(u[1]) * cl));
    out.push_back(u[0] * (sin(u[1]) * cl));
    out.push_back(u[0] * sl);
    return out;
  };
  Vec lo(2), hi(2);
  lo << tau_lo, 0.0;
  hi << tau_hi, 2.0 * M_PI;
  return ImmersedPatch::analytic(2, 3, chart, lo, hi, "cone_band");
}

// Band of the sphere cap at the given meeting angle, spherical polar angle s
// in [s_lo, s_hi] from the apex.
inline ImmersedPatch cap_band_patch(double theta, double s_lo, double s_hi, double rho = 1.0) {
  const double mu = std::sqrt(1.0 + rho * rho - 2.0 * rho * std::cos(theta));
  auto chart = [mu, rho](const std::vector<Jet2>& u) {
    std::vector<Jet2> out;
    out.reserve(3);
    out.push_back(sin(u[0]) * cos(u[1]) * rho);
    out.push_back(sin(u[0]) * sin(u[1]) * rho);
    out.push_back(cos(u[0]) * (-rho) + mu);
    return out;
  };
  Vec lo(2), hi(2);
  lo << s_lo, 0.0;
  hi << s_hi, 2.0 * M_PI;
  return ImmersedPatch::analytic(2, 3, chart, lo, hi, "cap_band");
}

// Radius of the chart point along the first parameter at the mid value of the
// second; used to grade integration panels in hyperbolic radius.
inline double patch_ray_radius(const ImmersedPatch& patch, double u0) {
  Vec u(2);
  u << u0, 0.5 * (patch.param_lo()[1] + patch.param_hi()[1]);
  const double nx = patch.value(u).norm();
  return 2.0 * std::atanh(std::min(nx, 1.0 - 1e-16));
}

// Panel edges in the first parameter that are uniform in hyperbolic radius
// across the support of f (assumes radius increases along u0, as it does for
// all band patches here).
inline std::vector<double> radial_panel_edges(const ImmersedPatch& patch, const RadialProfile& f,
                                              int panels) {
  const double u_lo = patch.param_lo()[0], u_hi = patch.param_hi()[0];
  const double r_lo = patch_ray_radius(patch, u_lo), r_hi = patch_ray_radius(patch, u_hi);
  const double a = std::max(r_lo, f.support_lo - 0.25);
  const double b = std::min(r_hi, f.support_hi + 0.25);
  std::vector<double> edges = {u_lo};
  if (b > a) {
    for (int j = 0; j <= panels; ++j) {
      const double target = a + (b - a) * j / panels;
      double lo = u_lo, hi = u_hi;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (patch_ray_radius(patch, mid) < target ? lo : hi) = mid;
      }
      edges.push_back(0.5 * (lo + hi));
    }
  }
  edges.push_back(u_hi);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double x, double y) { return std::abs(x - y) < 1e-15; }),
              edges.end());
  return edges;
}

// Annular band of a graph over the geodesic disk, polar parameters
// (t, theta) with t the geodesic radius of the base point.
inline ImmersedPatch graph_band_patch(const JetHeight& height, double t_lo, double t_hi) {
  auto chart = [height](const std::vector<Jet2>& u) {
    Jet2 radial = tanh(u[0] * 0.5);
    std::vector<Jet2> z = {radial * cos(u[1]), radial * sin(u[1])};
    std::vector<Jet2> out;
    out.reserve(3);
    out.push_back(z[0]);
    out.push_back(z[1]);
    out.push_back(height(z));
    return out;
  };
  Vec lo(2), hi(2);
  lo << t_lo, 0.0;
  hi << t_hi, 2.0 * M_PI;
  return ImmersedPatch::analytic(2, 3, chart, lo, hi, "graph_band");
}

// Integral of a real radial profile over a patch against the induced
// hyperbolic volume: int f(r(x(u))) sqrt(det G_hyp(u)) du. Panels along the
// first parameter follow the supplied edges (graded in radius); the second
// parameter is split uniformly.
inline double patch_radial_integral(const ImmersedPatch& patch, const RadialProfile& f,
                                    std::vector<double> u0_edges = {}, int panels_u1 = 48,
                                    int order = 10) {
  const GaussLegendre& gl = (order >= 16) ? GaussLegendre::order20() : GaussLegendre::order10();
  if (patch.dim() != 2) throw input_error("patch_radial_integral: only 2-parameter patches");
  const Vec lo = patch.param_lo(), hi = patch.param_hi();
  if (u0_edges.empty()) u0_edges = radial_panel_edges(patch, f, 96);
  const int panels_u0 = static_cast<int>(u0_edges.size()) - 1;
  std::vector<double> panel_sums;
  panel_sums.reserve(panels_u0 * panels_u1);
  for (int p0 = 0; p0 < panels_u0; ++p0) {
    const double a0 = u0_edges[p0];
    const double b0 = u0_edges[p0 + 1];
    for (int p1 = 0; p1 < panels_u1; ++p1) {
      const double a1 = lo[1] + (hi[1] - lo[1]) * p1 / panels_u1;
      const double b1 = lo[1] + (hi[1] - lo[1]) * (p1 + 1) / panels_u1;
      double s = 0.0;
      for (std::size_t q0 = 0; q0 < gl.nodes.size(); ++q0) {
        for (std::size_t q1 = 0; q1 < gl.nodes.size(); ++q1) {
          Vec u(2);
          u << 0.5 * (a0 + b0) + 0.5 * (b0 - a0) * gl.nodes[q0],
              0.5 * (a1 + b1) + 0.5 * (b1 - a1) * gl.nodes[q1];
          const PatchDerivatives d = patch.eval(u);
          const double nx = d.point.norm();
          if (nx >= 1.0) continue;
          const double r = 2.0 * std::atanh(nx);
          if (r <= f.support_lo || r >= f.support_hi) continue;
          const double phi = 0.5 * (1.0 - nx * nx);
          const Mat G = d.jacobian.transpose() * d.jacobian;
          const double vol = std::sqrt(G.determinant()) / (phi * phi);
          s += gl.weights[q0] * gl.weights[q1] * f(r).f.real() * vol;
        }
      }
      panel_sums.push_back(s * 0.25 * (b0 - a0) * (b1 - a1));
    }
  }
  return pairwise_sum(panel_sums);
}

// Direct two-parameter quadrature of the windowed residual over the cone,
// using the embedded band patch; cross-checks the link-volume factorisation.
inline double cone_residual_direct_2d(const Cone& cone, double lambda, double R,
                                      int panels_t = 0, int panels_theta = 64) {
  if (cone.m != 2 || !cone.link_chart)
    throw input_error("cone_residual_direct_2d: needs an explicit m = 2 link");
  RadialProfile u = upsilon_profile(2, lambda, R);
  QuadratureRule t_rule = profile_rule(u);
  if (panels_t > 0) t_rule = QuadratureRule(u.support_lo, u.support_hi, panels_t);
  // arclength factor |z'(t)| integrated numerically over the link parameter
  const GaussLegendre& gl = GaussLegendre::order10();
  double link_len = 0.0;
  for (int p = 0; p < panels_theta; ++p) {
    const double a = 2.0 * M_PI * p / panels_theta, b = 2.0 * M_PI * (p + 1) / panels_theta;
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double t = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
      link_len += 0.5 * (b - a) * gl.weights[q] * cone.link_dchart(t).norm();
    }
  }
  const double radial = t_rule.integrate_weighted(
      [&](double t) {
        const RadialValue v = u(t);
        return std::norm(radial_operator(u, v, t));
      },
      1.0);
  return link_len * radial;
}

// ---------------------------------------------------------------------------
// Volume comparison between a surface and its asymptotic cone.
// ---------------------------------------------------------------------------

struct VolumeComparison {
  double sigma_integral = 0.0;
  double cone_integral = 0.0;
  double eps_hat = 0.0;  // |sigma/cone - 1|
};

inline VolumeComparison volume_comparison(const ImmersedPatch& sigma, const Cone& cone,
                                          const RadialProfile& f, double R_guard,
                                          int panels_u0 = 96, int panels_u1 = 48) {
  if (f.support_lo < R_guard - 1e-12)
    throw precondition_error("volume_comparison: profile support starts below the guard radius");
  VolumeComparison out;
  QuadratureRule rule = profile_rule(f);
  out.cone_integral =
      cone.omega * rule.integrate_weighted([&](double t) { return f(t).f.real(); },
                                           cone.m - 1.0);
  out.sigma_integral =
      patch_radial_integral(sigma, f, radial_panel_edges(sigma, f, panels_u0), panels_u1);
  if (out.cone_integral == 0.0 && out.sigma_integral == 0.0) {
    out.eps_hat = 0.0;
  } else if (out.cone_integral == 0.0) {
    out.eps_hat = kInf;
  } else {
    out.eps_hat = std::abs(out.sigma_integral / out.cone_integral - 1.0);
  }
  return out;
}

}  // namespace hypspec
