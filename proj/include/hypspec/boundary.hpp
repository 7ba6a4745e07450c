#pragma once

#include "hypspec/models.hpp"

#include <Eigen/Dense>
#include <fstream>
#include <set>
#include <sstream>

namespace hypspec {

// Curve (k = 1 surface) in the plane {y = 0} of the half-space model,
// represented by dense ordered samples plus an optional analytic chart.
struct BoundaryCurve {
  int k = 1;
  int n = 2;  // dimension of the plane the curve lives in
  std::vector<Vec> samples;
  bool closed = false;
  std::function<Vec(double)> chart;   // optional
  std::function<Vec(double)> dchart;  // optional, first derivative
  std::vector<double> params;         // chart parameter per sample
  std::string name;

  Vec tangent_at(std::size_t i) const {
    Vec t;
    if (dchart) {
      t = dchart(params[i]);
    } else {
      const std::size_t prev = (i == 0) ? (closed ? samples.size() - 1 : 0) : i - 1;
      const std::size_t next = (i + 1 == samples.size()) ? (closed ? 0 : i) : i + 1;
      t = samples[next] - samples[prev];
    }
    const double nrm = t.norm();
    if (!(nrm > 0.0)) throw input_error("BoundaryCurve: zero tangent");
    return t / nrm;
  }
};

inline BoundaryCurve line_curve(double half_length = 40.0, int samples = 4001) {
  BoundaryCurve g;
  g.n = 2;
  g.name = "line";
  g.chart = [](double t) {
    Vec p(2);
    p << t, 0.0;
    return p;
  };
  g.dchart = [](double) {
    Vec d(2);
    d << 1.0, 0.0;
    return d;
  };
  for (int i = 0; i < samples; ++i) {
    const double t = -half_length + 2.0 * half_length * i / (samples - 1);
    g.params.push_back(t);
    g.samples.push_back(g.chart(t));
  }
  return g;
}

inline BoundaryCurve circle_curve(double radius = 1.0, int samples = 4096) {
  BoundaryCurve g;
  g.n = 2;
  g.closed = true;
  g.name = "circle";
  g.chart = [radius](double t) {
    Vec p(2);
    p << radius * std::cos(t), radius * std::sin(t);
    return p;
  };
  g.dchart = [radius](double t) {
    Vec d(2);
    d << -radius * std::sin(t), radius * std::cos(t);
    return d;
  };
  for (int i = 0; i < samples; ++i) {
    const double t = 2.0 * M_PI * i / samples;
    g.params.push_back(t);
    g.samples.push_back(g.chart(t));
  }
  return g;
}

// C^1 but not C^2 graph t -> (t, |t|^{3/2}); the origin is sample index
// (samples-1)/2.
inline BoundaryCurve cusp_curve(double half_length = 2.0, int samples = 8001) {
  BoundaryCurve g;
  g.n = 2;
  g.name = "cusp";
  g.chart = [](double t) {
    Vec p(2);
    p << t, std::pow(std::abs(t), 1.5);
    return p;
  };
  g.dchart = [](double t) {
    Vec d(2);
    d << 1.0, 1.5 * std::sqrt(std::abs(t)) * (t < 0 ? -1.0 : 1.0);
    return d;
  };
  for (int i = 0; i < samples; ++i) {
    const double t = -half_length + 2.0 * half_length * i / (samples - 1);
    g.params.push_back(t);
    g.samples.push_back(g.chart(t));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Distance to a curve: nearest-sample search refined by golden-section
// minimisation along the chart parameter.
// ---------------------------------------------------------------------------

namespace detail {

template <class F>
double golden_minimise(F&& f, double a, double b, int iters = 80) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < iters; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

inline double dist_to_curve(const BoundaryCurve& g, const Vec& q) {
  std::size_t best = 0;
  double bd = kInf;
  for (std::size_t i = 0; i < g.samples.size(); ++i) {
    const double d = (g.samples[i] - q).squaredNorm();
    if (d < bd) {
      bd = d;
      best = i;
    }
  }
  if (!g.chart) {
    // refine on the two adjacent polyline segments
    double dmin = std::sqrt(bd);
    for (int off : {-1, 0}) {
      const long a = static_cast<long>(best) + off;
      if (a < 0 || a + 1 >= static_cast<long>(g.samples.size())) continue;
      const Vec& p0 = g.samples[a];
      const Vec& p1 = g.samples[a + 1];
      const Vec e = p1 - p0;
      const double t = std::clamp((q - p0).dot(e) / e.squaredNorm(), 0.0, 1.0);
      dmin = std::min(dmin, (p0 + t * e - q).norm());
    }
    return dmin;
  }
  const std::size_t nb = g.samples.size();
  double t_lo, t_hi;
  if (g.closed) {
    const double period = 2.0 * M_PI;
    const double tc = g.params[best];
    const double step = period / nb;
    t_lo = tc - 1.5 * step;
    t_hi = tc + 1.5 * step;
  } else {
    const std::size_t lo = best == 0 ? 0 : best - 1;
    const std::size_t hi = std::min(best + 1, nb - 1);
    t_lo = g.params[lo];
    t_hi = g.params[hi];
  }
  auto f = [&](double t) { return (g.chart(t) - q).squaredNorm(); };
  const double t_star = detail::golden_minimise(f, t_lo, t_hi);
  return std::min(std::sqrt(bd), (g.chart(t_star) - q).norm());
}

// ---------------------------------------------------------------------------
// delta(p, r)/r: normal probe distance ratio.
// ---------------------------------------------------------------------------

struct DeltaRatio {
  double value = 0.0;
  bool resolution_warning = false;
};

// Unit normals of the curve at sample i; for curves in the plane this is the
// pair of rotated tangents, in higher ambient dimension a grid on the normal
// sphere would be required.
inline std::vector<Vec> normal_grid(const BoundaryCurve& g, std::size_t i) {
  const Vec t = g.tangent_at(i);
  if (g.n == 2) {
    Vec nu(2);
    nu << -t[1], t[0];
    return {nu, -nu};
  }
  throw input_error("normal_grid: only plane curves are built in");
}

inline DeltaRatio delta_ratio(const BoundaryCurve& g, std::size_t p_index, double r) {
  if (!(r > 0.0)) throw input_error("delta_ratio: r must be positive");
  const Vec p = g.samples[p_index];
  DeltaRatio out;
  double inf_d = kInf;
  for (const Vec& nu : normal_grid(g, p_index))
    inf_d = std::min(inf_d, dist_to_curve(g, p + r * nu));
  out.value = inf_d / r;
  // sampled curves without a chart cannot resolve probes below the spacing
  const std::size_t j = std::min(p_index + 1, g.samples.size() - 1);
  const double spacing = (g.samples[j] - g.samples[p_index == j ? p_index - 1 : p_index]).norm();
  out.resolution_warning = !g.chart && spacing > 0.5 * r;
  return out;
}

// Largest admissible slab height: binary search on r until the sampled minimum
// of delta(p,r)/r over the curve clears 1/2 with a 10% margin.
inline double rho_gamma_search(const BoundaryCurve& g, int probe_count = 64) {
  std::vector<std::size_t> probes;
  for (int i = 0; i < probe_count; ++i)
    probes.push_back(i * g.samples.size() / probe_count);
  auto min_ratio = [&](double r) {
    double m = kInf;
    for (std::size_t i : probes) m = std::min(m, delta_ratio(g, i, r).value);
    return m;
  };
  const double target = 0.5 * 1.1;
  double r = 1.0;
  while (r > 1e-8 && min_ratio(r) <= target) r *= 0.5;
  if (r <= 1e-8) throw resolution_error("rho_gamma_search: no admissible radius found");
  // refine upward: largest r' in [r, 2r] still above target at a few fractions
  double lo = r, hi = 2.0 * r;
  for (int it = 0; it < 30; ++it) {
    const double mid = 0.5 * (lo + hi);
    bool ok = true;
    for (double frac : {1.0, 0.6, 0.3, 0.1})
      ok = ok && min_ratio(mid * frac) > target;
    (ok ? lo : hi) = mid;
  }
  return 0.5 * lo;
}

// ---------------------------------------------------------------------------
// The exclusion set W.
// ---------------------------------------------------------------------------

struct MembershipOptions {
  int grid_per_axis = 48;  // excluded-ball centre grid around the query
};

// q in W iff 0 < y < rho and q avoids every ball B_{min(2 rho, d(x'))}(x', 0).
// Ball centres are tested on a finite grid around the query; the grid always
// contains the query's own horizontal projection.
inline bool membership_W(const BoundaryCurve& g, const HalfSpacePoint& q, double rho,
                         const MembershipOptions& opt = {}) {
  if (!(q.y > 0.0) || q.y >= rho) return false;
  if (q.y >= 2.0 * rho) return false;
  const double half = 2.0 * rho;
  const int nside = opt.grid_per_axis | 1;  // odd, so the centre is on the grid
  Vec x0 = q.x;
  std::vector<double> offsets(nside);
  for (int i = 0; i < nside; ++i) offsets[i] = -half + 2.0 * half * i / (nside - 1);
  const double y2 = q.y * q.y;
  Vec xp(2);
  for (int i = 0; i < nside; ++i) {
    for (int j = 0; j < nside; ++j) {
      xp << x0[0] + offsets[i], x0[1] + offsets[j];
      const double horiz2 = sq(offsets[i]) + sq(offsets[j]);
      if (horiz2 + y2 >= 4.0 * rho * rho) continue;  // even the largest ball misses
      const double rad = std::min(2.0 * rho, dist_to_curve(g, xp));
      if (horiz2 + y2 < rad * rad) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Barrier (empty half-ball) check.
// ---------------------------------------------------------------------------

struct BarrierReport {
  bool empty = true;
  std::vector<std::size_t> violations;
};

inline BarrierReport barrier_check(const std::vector<HalfSpacePoint>& cloud, const Vec& centre,
                                   double r) {
  BarrierReport rep;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const double d2 = (cloud[i].x - centre).squaredNorm() + sq(cloud[i].y);
    if (d2 < r * r) {
      rep.empty = false;
      rep.violations.push_back(i);
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Tangent cone estimation.
// ---------------------------------------------------------------------------

struct DirectionRecord {
  Vec direction;  // unit vector in R^{n+1}
  std::vector<std::pair<double, Vec>> witnesses;  // (scale, cloud point)
  std::vector<int> scale_ids;
};

struct TangentConeEstimate {
  Vec base;  // boundary point (x, 0) as an (n+1)-vector
  std::vector<DirectionRecord> directions;
  Mat fitted_tangent;  // n+1 x k basis of the fitted horizontal subspace
  double opening_angle_deg = 0.0;
  double defect_out_deg = 0.0;       // estimated directions vs reference cone
  double defect_coverage_deg = 0.0;  // reference cone vs estimated directions
  double hausdorff_defect_deg = 0.0;
  bool equality_pass = false;
};

struct TangentConeOptions {
  double cluster_tol_deg = 1.0;
  int min_consecutive_scales = 3;
  int min_points_smallest_scale = 8;
  double equality_tol_deg = 1.0;
};

// Angle from a unit vector to the half-space cone spanned by the columns of T
// (horizontal) and the upward axis. atan2 form, exact for tiny angles.
inline double angle_to_cone_deg(const Vec& u, const Mat& T) {
  const int n1 = static_cast<int>(u.size());
  Vec proj = Vec::Zero(n1);
  for (int c = 0; c < T.cols(); ++c) proj += T.col(c).dot(u) * T.col(c);
  if (u[n1 - 1] > 0.0) proj[n1 - 1] = u[n1 - 1];
  const double nrm = proj.norm();
  if (nrm < 1e-14) return 90.0;
  const Vec unit = proj / nrm;
  const double c = unit.dot(u);
  const double s = (u - c * unit).norm();
  return std::atan2(s, c) * 180.0 / M_PI;
}

inline TangentConeEstimate tangent_cone_estimate(const std::vector<HalfSpacePoint>& cloud,
                                                 const Vec& base_plane,
                                                 std::vector<double> scales,
                                                 const Vec& reference_tangent,
                                                 const TangentConeOptions& opt = {}) {
  if (scales.size() < 3) throw input_error("tangent_cone_estimate: need at least 3 scales");
  std::sort(scales.begin(), scales.end(), std::greater<double>());
  if (scales.front() / scales.back() < 1000.0 - 1e-9)
    throw input_error("tangent_cone_estimate: scales must span at least 3 decades");

  const int n = static_cast<int>(base_plane.size());
  const int n1 = n + 1;
  Vec base(n1);
  base.head(n) = base_plane;
  base[n] = 0.0;

  const double tol = opt.cluster_tol_deg * M_PI / 180.0;
  std::vector<DirectionRecord> clusters;
  std::vector<int> counts;
  for (int si = 0; si < static_cast<int>(scales.size()); ++si) {
    const double s = scales[si];
    int points_here = 0;
    for (const HalfSpacePoint& hp : cloud) {
      Vec p(n1);
      p.head(n) = hp.x;
      p[n] = hp.y;
      const Vec d = p - base;
      const double dist = d.norm();
      if (dist <= 0.0 || dist > s) continue;
      ++points_here;
      const Vec u = d / dist;
      bool merged = false;
      for (std::size_t c = 0; c < clusters.size(); ++c) {
        const double cosang = std::clamp(clusters[c].direction.dot(u), -1.0, 1.0);
        if (std::acos(cosang) < tol) {
          Vec mean = clusters[c].direction * counts[c] + u;
          clusters[c].direction = mean / mean.norm();
          ++counts[c];
          if (clusters[c].scale_ids.empty() || clusters[c].scale_ids.back() != si) {
            clusters[c].scale_ids.push_back(si);
            clusters[c].witnesses.emplace_back(s, p);
          }
          merged = true;
          break;
        }
      }
      if (!merged) {
        DirectionRecord rec;
        rec.direction = u;
        rec.scale_ids = {si};
        rec.witnesses = {{s, p}};
        clusters.push_back(std::move(rec));
        counts.push_back(1);
      }
    }
    if (si + 1 == static_cast<int>(scales.size()) &&
        points_here < opt.min_points_smallest_scale)
      throw resolution_error("tangent_cone_estimate: too few samples at the smallest scale");
  }

  TangentConeEstimate est;
  est.base = base;
  // A limit direction must keep reappearing all the way down: require a run of
  // consecutive scales that reaches the finest one. Coarse-only secants (whole
  // chords of the surface seen at large radii) are discarded by this rule.
  const int last = static_cast<int>(scales.size()) - 1;
  for (const DirectionRecord& rec : clusters) {
    if (rec.scale_ids.empty() || rec.scale_ids.back() != last) continue;
    int run = 1;
    for (std::size_t i = rec.scale_ids.size() - 1; i > 0; --i) {
      if (rec.scale_ids[i - 1] + 1 == rec.scale_ids[i])
        ++run;
      else
        break;
    }
    if (run >= opt.min_consecutive_scales) est.directions.push_back(rec);
  }
  if (est.directions.empty())
    throw resolution_error("tangent_cone_estimate: no scale-consistent directions");

  // Reference cone basis: the curve tangent embedded horizontally.
  Mat T = Mat::Zero(n1, 1);
  T.block(0, 0, n, 1) = reference_tangent / reference_tangent.norm();
  est.fitted_tangent = T;

  double opening = 0.0, out = 0.0;
  for (const DirectionRecord& rec : est.directions) {
    opening = std::max(opening, std::asin(std::clamp(rec.direction[n], -1.0, 1.0)) * 180.0 / M_PI);
    out = std::max(out, angle_to_cone_deg(rec.direction, T));
  }
  est.opening_angle_deg = opening;
  est.defect_out_deg = out;

  // Coverage: reference directions cos(b) t + sin(b) e_y, b in [0, pi].
  double cov = 0.0;
  for (int bi = 0; bi <= 180; ++bi) {
    const double b = bi * M_PI / 180.0;
    Vec ref = std::cos(b) * T.col(0);
    ref[n] += std::sin(b);
    double best = 180.0;
    for (const DirectionRecord& rec : est.directions) {
      const double cosang = std::clamp(ref.dot(rec.direction), -1.0, 1.0);
      best = std::min(best, std::acos(cosang) * 180.0 / M_PI);
    }
    cov = std::max(cov, best);
  }
  est.defect_coverage_deg = cov;
  est.hausdorff_defect_deg = std::max(out, cov);
  est.equality_pass = est.hausdorff_defect_deg < opt.equality_tol_deg;
  return est;
}

// ---------------------------------------------------------------------------
// Height-ratio diagnostics along a sequence approaching the boundary.
// ---------------------------------------------------------------------------

struct RatioProfile {
  std::vector<double> heights;
  std::vector<double> ratios;  // d(x_i) / y_i
  bool decreasing_trend = false;
};

inline RatioProfile c01_ratio_profile(const std::vector<HalfSpacePoint>& pts,
                                      const BoundaryCurve& g, double rho) {
  RatioProfile rp;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (i > 0 && pts[i].y > pts[i - 1].y + 1e-12)
      throw precondition_error("c01_ratio_profile: heights must be non-increasing at point " +
                               std::to_string(i));
    if (!membership_W(g, pts[i], rho))
      throw precondition_error("c01_ratio_profile: point " + std::to_string(i) +
                               " lies outside W");
    rp.heights.push_back(pts[i].y);
    rp.ratios.push_back(dist_to_curve(g, pts[i].x) / pts[i].y);
  }
  const std::size_t n = rp.ratios.size();
  if (n >= 4) {
    auto median = [](std::vector<double> v) {
      std::sort(v.begin(), v.end());
      return v[v.size() / 2];
    };
    std::vector<double> first(rp.ratios.begin(), rp.ratios.begin() + n / 4);
    std::vector<double> last(rp.ratios.end() - n / 4, rp.ratios.end());
    rp.decreasing_trend = median(last) < median(first);
  }
  return rp;
}

// ---------------------------------------------------------------------------
// Built-in point clouds (half-space coordinates) and file I/O.
// ---------------------------------------------------------------------------

namespace detail {

// Direction fan at every dyadic level: a geometric ladder in the "raising"
// coordinate against a linear sweep in the "grazing" one, so secant angles
// from the focus cover [~0.5 deg, 90 deg] with sub-degree gaps.
template <class Push>
void graded_fan(double base_scale, int levels, Push&& push) {
  constexpr int kLadder = 8;
  constexpr int kSweep = 32;
  for (int l = 0; l < levels; ++l) {
    const double delta = base_scale * std::pow(0.5, l);
    for (int a = 0; a <= kLadder; ++a) {
      const double up = delta * std::pow(0.5, a);
      for (int j = -kSweep; j <= kSweep; ++j) push(up, delta * j / kSweep);
    }
    for (int i = 1; i <= kSweep; ++i) push(delta * i / kSweep, 0.0);
  }
}

}  // namespace detail

// Totally geodesic hemisphere |P| = 1, y > 0 over the unit circle, sampled on
// a multiresolution grid concentrated near the focus boundary point
// (cos zeta0, sin zeta0, 0).
inline std::vector<HalfSpacePoint> hemisphere_cloud(double zeta0 = 0.0, int levels = 18) {
  std::vector<HalfSpacePoint> cloud;
  auto push = [&](double alpha, double zeta) {
    if (alpha <= 0.0 || alpha > M_PI / 2.0) return;
    Vec x(2);
    x << std::cos(alpha) * std::cos(zeta0 + zeta), std::cos(alpha) * std::sin(zeta0 + zeta);
    cloud.emplace_back(x, std::sin(alpha));
  };
  // coarse global coverage
  for (int i = 1; i <= 24; ++i)
    for (int j = 0; j < 48; ++j) push(0.5 * M_PI * i / 24, 2.0 * M_PI * j / 48);
  detail::graded_fan(0.5, levels, push);
  return cloud;
}

// Strip over the x-axis: points (t, s sin(tilt), s cos(tilt)); vertical when
// tilt = 0, in which case the strip is its own tangent cone.
inline std::vector<HalfSpacePoint> strip_cloud(double tilt_rad = 0.0, int levels = 18,
                                               double extent = 2.0) {
  std::vector<HalfSpacePoint> cloud;
  auto push = [&](double s, double t) {
    if (s <= 0.0) return;
    Vec x(2);
    x << t, s * std::sin(tilt_rad);
    cloud.emplace_back(x, s * std::cos(tilt_rad));
  };
  detail::graded_fan(extent, levels, push);
  return cloud;
}

inline std::vector<HalfSpacePoint> load_cloud(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("load_cloud: cannot open '" + path + "'");
  std::vector<HalfSpacePoint> cloud;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    std::vector<double> vals;
    double v;
    while (ss >> v) vals.push_back(v);
    if (vals.empty()) continue;
    if (vals.size() < 2) throw input_error("load_cloud: need at least 2 columns in '" + path + "'");
    Vec x(vals.size() - 1);
    for (std::size_t i = 0; i + 1 < vals.size(); ++i) x[i] = vals[i];
    if (!(vals.back() > 0.0))
      throw input_error("load_cloud: non-positive height in '" + path + "'");
    cloud.emplace_back(std::move(x), vals.back());
  }
  if (cloud.empty()) throw input_error("load_cloud: no points in '" + path + "'");
  return cloud;
}

inline void save_cloud(const std::string& path, const std::vector<HalfSpacePoint>& cloud) {
  std::ofstream out(path);
  if (!out) throw input_error("save_cloud: cannot open '" + path + "'");
  out.precision(17);
  for (const HalfSpacePoint& p : cloud) {
    for (int i = 0; i < p.x.size(); ++i) out << p.x[i] << ' ';
    out << p.y << '\n';
  }
}

}  // namespace hypspec
