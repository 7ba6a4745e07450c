#pragma once

#include "hypspec/jet.hpp"
#include "hypspec/models.hpp"

#include <Eigen/Dense>

namespace hypspec {

enum class MetricTag { Euclidean, Hyperbolic };
enum class Smoothness { C1, C2 };

// Chart value with first and second parameter derivatives.
struct PatchDerivatives {
  Vec point;                  // ball coordinates, length n+1
  Mat jacobian;               // (n+1) x m
  std::vector<Mat> hessians;  // n+1 entries, each m x m
};

// A parametrised piece of a submanifold of the ball. Charts are either
// jet-evaluable (analytic derivatives) or plain maps differentiated by central
// differences with a configurable step.
class ImmersedPatch {
 public:
  using JetChart = std::function<std::vector<Jet2>(const std::vector<Jet2>&)>;
  using ValueChart = std::function<Vec(const Vec&)>;

  static ImmersedPatch analytic(int m, int n1, JetChart chart, Vec lo, Vec hi,
                                std::string name = {}, Smoothness s = Smoothness::C2) {
    ImmersedPatch p(m, n1, std::move(lo), std::move(hi), std::move(name), s);
    p.jet_chart_ = std::move(chart);
    return p;
  }

  static ImmersedPatch numeric(int m, int n1, ValueChart chart, Vec lo, Vec hi,
                               std::string name = {}, double fd_step = 1e-5,
                               bool richardson = false, Smoothness s = Smoothness::C2) {
    ImmersedPatch p(m, n1, std::move(lo), std::move(hi), std::move(name), s);
    p.value_chart_ = std::move(chart);
    p.fd_step_ = fd_step;
    p.richardson_ = richardson;
    return p;
  }

  int dim() const { return m_; }
  int ambient_dim() const { return n1_; }
  bool is_analytic() const { return static_cast<bool>(jet_chart_); }
  Smoothness smoothness() const { return smoothness_; }
  const std::string& name() const { return name_; }
  const Vec& param_lo() const { return lo_; }
  const Vec& param_hi() const { return hi_; }
  double sample_norm_cap() const { return norm_cap_; }
  ImmersedPatch& set_sample_norm_cap(double cap) {
    norm_cap_ = cap;
    return *this;
  }

  Vec value(const Vec& u) const {
    if (value_chart_) return value_chart_(u);
    std::vector<Jet2> seed = seed_jets(u);
    std::vector<Jet2> out = jet_chart_(seed);
    Vec x(n1_);
    for (int c = 0; c < n1_; ++c) x[c] = out[c].v;
    return x;
  }

  BallPoint point(const Vec& u) const { return BallPoint(value(u)); }

  PatchDerivatives eval(const Vec& u) const {
    PatchDerivatives d = jet_chart_ ? eval_jets(u) : eval_fd(u);
    // Full-rank guard: condition number of the Euclidean Gram matrix.
    Eigen::SelfAdjointEigenSolver<Mat> es(d.jacobian.transpose() * d.jacobian);
    const double lo = es.eigenvalues().minCoeff(), hi = es.eigenvalues().maxCoeff();
    if (!(lo > 0.0) || hi / lo > 1e12)
      throw degenerate_immersion_error("ImmersedPatch '" + name_ +
                                       "': rank-deficient chart Jacobian");
    return d;
  }

  // Uniform grid over the parameter box, k points per axis.
  std::vector<Vec> sample_grid(int per_axis) const {
    std::vector<Vec> pts;
    std::vector<int> idx(m_, 0);
    const long total = static_cast<long>(std::pow(per_axis, m_));
    pts.reserve(total);
    for (long t = 0; t < total; ++t) {
      long rem = t;
      Vec u(m_);
      for (int a = 0; a < m_; ++a) {
        const int i = rem % per_axis;
        rem /= per_axis;
        u[a] = lo_[a] + (hi_[a] - lo_[a]) * (i + 0.5) / per_axis;
      }
      if (u.norm() <= norm_cap_) pts.push_back(std::move(u));
    }
    return pts;
  }

 private:
  ImmersedPatch(int m, int n1, Vec lo, Vec hi, std::string name, Smoothness s)
      : m_(m), n1_(n1), lo_(std::move(lo)), hi_(std::move(hi)),
        name_(std::move(name)), smoothness_(s) {
    if (m < 1 || n1 <= m) throw input_error("ImmersedPatch: need 1 <= m < n+1");
  }

  std::vector<Jet2> seed_jets(const Vec& u) const {
    std::vector<Jet2> seed;
    seed.reserve(m_);
    for (int i = 0; i < m_; ++i) seed.push_back(Jet2::variable(u[i], i, m_));
    return seed;
  }

  PatchDerivatives eval_jets(const Vec& u) const {
    std::vector<Jet2> out = jet_chart_(seed_jets(u));
    PatchDerivatives d;
    d.point = Vec(n1_);
    d.jacobian = Mat(n1_, m_);
    d.hessians.resize(n1_);
    for (int c = 0; c < n1_; ++c) {
      d.point[c] = out[c].v;
      d.jacobian.row(c) = out[c].g.transpose();
      d.hessians[c] = out[c].h;
    }
    return d;
  }

  PatchDerivatives eval_fd(const Vec& u) const {
    PatchDerivatives d;
    d.point = value_chart_(u);
    d.jacobian = fd_jacobian(u, fd_step_);
    if (richardson_) {
      const Mat coarse = fd_jacobian(u, 2.0 * fd_step_);
      d.jacobian = (4.0 * d.jacobian - coarse) / 3.0;
    }
    const double h = std::max(fd_step_, 1e-5);  // second differences need a larger step
    d.hessians.assign(n1_, Mat(m_, m_));
    for (int a = 0; a < m_; ++a) {
      for (int b = 0; b <= a; ++b) {
        Vec mixed(n1_);
        if (a == b) {
          Vec up = u, dn = u;
          up[a] += h;
          dn[a] -= h;
          mixed = (value_chart_(up) - 2.0 * d.point + value_chart_(dn)) / (h * h);
        } else {
          Vec pp = u, pm = u, mp = u, mm = u;
          pp[a] += h; pp[b] += h;
          pm[a] += h; pm[b] -= h;
          mp[a] -= h; mp[b] += h;
          mm[a] -= h; mm[b] -= h;
          mixed = (value_chart_(pp) - value_chart_(pm) - value_chart_(mp) + value_chart_(mm)) /
                  (4.0 * h * h);
        }
        for (int c = 0; c < n1_; ++c) d.hessians[c](a, b) = d.hessians[c](b, a) = mixed[c];
      }
    }
    return d;
  }

  Mat fd_jacobian(const Vec& u, double h) const {
    Mat J(n1_, m_);
    for (int a = 0; a < m_; ++a) {
      Vec up = u, dn = u;
      up[a] += h;
      dn[a] -= h;
      J.col(a) = (value_chart_(up) - value_chart_(dn)) / (2.0 * h);
    }
    return J;
  }

  int m_, n1_;
  Vec lo_, hi_;
  std::string name_;
  Smoothness smoothness_;
  JetChart jet_chart_;
  ValueChart value_chart_;
  double fd_step_ = 1e-5;
  bool richardson_ = false;
  double norm_cap_ = kInf;  // grid samples outside |u| <= cap are skipped
};

// Orthonormal frames at a chart point in the tagged metric.
struct FrameData {
  BallPoint point;
  Mat tangent;  // (n+1) x m, columns orthonormal
  Mat normal;   // (n+1) x (n+1-m)
  MetricTag tag = MetricTag::Euclidean;
};

namespace detail {

// Everything the curvature formulas need at one chart point. The Euclidean
// frames come from a QR factorisation of the Jacobian; hyperbolic frames are
// the same columns scaled by the conformal factor.
struct FramedPoint {
  Vec x;
  double phi = 0.0;
  Mat J;
  std::vector<Mat> S;  // second chart derivatives per ambient coordinate
  Mat Q1;              // Euclidean orthonormal tangent frame
  Mat N;               // Euclidean orthonormal normal frame
  Mat R;               // frame change: Q1 = J * R
};

inline FramedPoint frame_point(const ImmersedPatch& patch, const Vec& u) {
  FramedPoint fp;
  PatchDerivatives d = patch.eval(u);
  fp.x = d.point;
  fp.phi = 0.5 * (1.0 - fp.x.squaredNorm());
  if (!(fp.phi > 0.0))
    throw domain_error("frame_point: chart point left the unit ball");
  fp.J = d.jacobian;
  fp.S = std::move(d.hessians);
  const int m = patch.dim(), n1 = patch.ambient_dim();
  Eigen::HouseholderQR<Mat> qr(fp.J);
  Mat Q = qr.householderQ() * Mat::Identity(n1, n1);
  fp.Q1 = Q.leftCols(m);
  fp.N = Q.rightCols(n1 - m);
  Mat Rtri = qr.matrixQR().topRows(m).triangularView<Eigen::Upper>();
  fp.R = Rtri.inverse();
  return fp;
}

// Second derivative vector contracted against a pair of parameter directions,
// projected on one normal direction: M^alpha_ab = n_alpha . S_ab.
inline Mat normal_component(const FramedPoint& fp, int alpha) {
  const int m = static_cast<int>(fp.R.rows());
  Mat M(m, m);
  for (int a = 0; a < m; ++a)
    for (int b = 0; b < m; ++b) {
      double s = 0.0;
      for (int c = 0; c < fp.x.size(); ++c) s += fp.N(c, alpha) * fp.S[c](a, b);
      M(a, b) = s;
    }
  return M;
}

// Connection correction of the conformal (hyperbolic) metric applied to a pair
// of coordinate directions: (u . grad w) v + (v . grad w) u - (u . v) grad w,
// with grad w = x / phi.
inline Vec conformal_correction(const FramedPoint& fp, const Vec& ju, const Vec& jv) {
  const Vec gw = fp.x / fp.phi;
  return ju.dot(gw) * jv + jv.dot(gw) * ju - ju.dot(jv) * gw;
}

}  // namespace detail

inline FrameData compute_frames(const ImmersedPatch& patch, const Vec& u, MetricTag tag) {
  detail::FramedPoint fp = detail::frame_point(patch, u);
  FrameData f;
  f.tag = tag;
  f.point = BallPoint(fp.x);
  if (tag == MetricTag::Euclidean) {
    f.tangent = fp.Q1;
    f.normal = fp.N;
  } else {
    f.tangent = fp.phi * fp.Q1;
    f.normal = fp.phi * fp.N;
  }
  return f;
}

// Second fundamental form in the tagged metric, one m x m matrix per normal
// direction, components in the orthonormal frames of that metric.
inline std::vector<Mat> second_fundamental_form(const ImmersedPatch& patch, const Vec& u,
                                                MetricTag tag) {
  detail::FramedPoint fp = detail::frame_point(patch, u);
  const int m = patch.dim(), n1 = patch.ambient_dim();
  std::vector<Mat> forms;
  forms.reserve(n1 - m);
  for (int alpha = 0; alpha < n1 - m; ++alpha) {
    Mat M = detail::normal_component(fp, alpha);
    if (tag == MetricTag::Hyperbolic) {
      for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
          M(a, b) += fp.N.col(alpha).dot(detail::conformal_correction(fp, fp.J.col(a), fp.J.col(b)));
      forms.push_back(fp.phi * (fp.R.transpose() * M * fp.R));
    } else {
      forms.push_back(fp.R.transpose() * M * fp.R);
    }
  }
  return forms;
}

// Mean curvature in both metrics, computed independently: the Euclidean route
// uses the plain second derivatives, the hyperbolic route the conformal
// connection. The residual compares them through the conformal relation
//   H_euc^a = phi^{-1} (H_hyp^a - m n_a(phi)).
struct CurvatureReport {
  Vec H_euclidean;        // components in the Euclidean normal frame
  Vec H_hyperbolic;       // components in the hyperbolic normal frame
  double norm_euclidean = 0.0;
  double norm_hyperbolic = 0.0;
  double conformal_residual = 0.0;
  bool residual_flagged = false;  // above tolerance for the derivative class
};

inline CurvatureReport mean_curvature(const ImmersedPatch& patch, const Vec& u) {
  detail::FramedPoint fp = detail::frame_point(patch, u);
  const int m = patch.dim(), n1 = patch.ambient_dim();
  const int codim = n1 - m;
  CurvatureReport rep;
  rep.H_euclidean = Vec(codim);
  rep.H_hyperbolic = Vec(codim);
  double res = 0.0;
  for (int alpha = 0; alpha < codim; ++alpha) {
    Mat Me = detail::normal_component(fp, alpha);
    Mat Mg = Me;
    for (int a = 0; a < m; ++a)
      for (int b = 0; b < m; ++b)
        Mg(a, b) += fp.N.col(alpha).dot(detail::conformal_correction(fp, fp.J.col(a), fp.J.col(b)));
    const double He = (fp.R.transpose() * Me * fp.R).trace();
    const double Hg = fp.phi * (fp.R.transpose() * Mg * fp.R).trace();
    rep.H_euclidean[alpha] = He;
    rep.H_hyperbolic[alpha] = Hg;
    const double grad_phi_alpha = fp.N.col(alpha).dot(-fp.x);
    res = std::max(res, std::abs(He - (Hg - m * grad_phi_alpha) / fp.phi));
  }
  rep.norm_euclidean = rep.H_euclidean.norm();
  rep.norm_hyperbolic = rep.H_hyperbolic.norm();
  rep.conformal_residual = res;
  rep.residual_flagged = res > (patch.is_analytic() ? 1e-6 : 1e-3);
  return rep;
}

// Norm of the normal component of the conformal-factor gradient at a chart
// point; tends to zero exactly when the surface meets the boundary sphere
// orthogonally.
inline double orthogonality_defect(const ImmersedPatch& patch, const Vec& u) {
  detail::FramedPoint fp = detail::frame_point(patch, u);
  return (fp.N.transpose() * (-fp.x)).norm();
}

// Sampled sup of |H_hyperbolic| outside the ball of radius r about p.
// Returns +inf when no admissible sample lies outside.
struct EpsilonROptions {
  int per_axis = 48;
  double boundary_cutoff = kBoundaryCutoff;
};

inline double epsilon_r(const std::vector<ImmersedPatch>& patches, const BallPoint& p, double r,
                        const EpsilonROptions& opt = {}) {
  if (patches.empty()) throw input_error("epsilon_r: empty patch set");
  if (!(r > 0.0)) throw input_error("epsilon_r: r must be positive");
  double sup = -1.0;
  for (const ImmersedPatch& patch : patches) {
    const std::vector<Vec> grid = patch.sample_grid(opt.per_axis);
    std::vector<double> vals(grid.size(), -1.0);
    parallel_for(grid.size(), [&](std::size_t i) {
      Vec x = patch.value(grid[i]);
      const double nx = x.norm();
      if (nx >= opt.boundary_cutoff || nx >= 1.0) return;
      BallPoint bp(x);
      if (hyperbolic_distance(bp, p) <= r) return;
      vals[i] = mean_curvature(patch, grid[i]).norm_hyperbolic;
    });
    for (double v : vals) sup = std::max(sup, v);
  }
  return sup < 0.0 ? kInf : sup;
}

// ---------------------------------------------------------------------------
// Built-in patch library.
// ---------------------------------------------------------------------------

// Affine patch u -> p0 + A u (test geometry; Euclidean forms vanish).
inline ImmersedPatch affine_patch(const Vec& p0, const Mat& A, Vec lo, Vec hi) {
  const int n1 = static_cast<int>(p0.size());
  const int m = static_cast<int>(A.cols());
  auto chart = [p0, A, n1, m](const std::vector<Jet2>& u) {
    std::vector<Jet2> out(n1, Jet2::constant(0.0, m));
    for (int c = 0; c < n1; ++c) {
      Jet2 acc = Jet2::constant(p0[c], m);
      for (int a = 0; a < m; ++a) acc = acc + A(c, a) * u[a];
      out[c] = acc;
    }
    return out;
  };
  return ImmersedPatch::analytic(m, n1, chart, std::move(lo), std::move(hi), "affine");
}

// Totally geodesic disk through the origin, chart u -> tanh(|u|/2) u/|u|
// embedded in the first m coordinates. The parameter norm is exactly the
// geodesic distance from the origin, so boxes in u are geodesic truncations.
inline ImmersedPatch geodesic_disk(int m, int n1, double param_radius = 14.0) {
  auto chart = [m, n1](const std::vector<Jet2>& u) {
    Jet2 w = Jet2::constant(0.0, m);
    for (int a = 0; a < m; ++a) w = w + u[a] * u[a];
    Jet2 scale = tanhc_sqrt(w * 0.25) * 0.5;  // tanh(|u|/2)/|u|
    std::vector<Jet2> out(n1, Jet2::constant(0.0, m));
    for (int a = 0; a < m; ++a) out[a] = scale * u[a];
    return out;
  };
  Vec lo = Vec::Constant(m, -param_radius), hi = Vec::Constant(m, param_radius);
  return ImmersedPatch::analytic(m, n1, chart, lo, hi, "geodesic_disk")
      .set_sample_norm_cap(param_radius);
}

namespace detail {

// Orthonormal basis of the orthogonal complement of a unit vector, via the
// Householder reflection exchanging e_{n} and the vector.
inline Mat complement_basis(const Vec& axis) {
  const int n1 = static_cast<int>(axis.size());
  Mat B = Mat::Identity(n1, n1);
  Vec v = axis;
  v[n1 - 1] -= 1.0;
  const double vv = v.squaredNorm();
  if (vv > 1e-28) B -= (2.0 / vv) * (v * v.transpose());
  return B.leftCols(n1 - 1);
}

}  // namespace detail

// Cap of the Euclidean sphere |x - c| = rho meeting the unit sphere at angle
// theta (normal-angle convention: theta = pi/2 is orthogonal incidence, i.e. a
// totally geodesic cap). Parametrised from the apex by a tanh-compressed polar
// angle, so parameter grids stay usable out to the rim. Hypersurface: m = n.
inline ImmersedPatch sphere_cap(int n1, double theta, double rho = 1.0,
                                double param_radius = 16.0, double grading = 0.5) {
  const int m = n1 - 1;
  const double mu2 = 1.0 + rho * rho - 2.0 * rho * std::cos(theta);
  const double mu = std::sqrt(mu2);
  if (!(mu > 1e-12)) throw input_error("sphere_cap: degenerate centre");
  Vec axis = Vec::Zero(n1);
  axis[n1 - 1] = 1.0;
  const Vec c = mu * axis;
  // rim polar angle: |x|^2 = mu^2 + rho^2 - 2 mu rho cos(s) hits 1
  const double cos_rim = (mu2 + rho * rho - 1.0) / (2.0 * mu * rho);
  if (!(cos_rim > -1.0 && cos_rim < 1.0))
    throw input_error("sphere_cap: cap does not reach the boundary sphere");
  const double s_max = std::acos(cos_rim);
  const Mat B = detail::complement_basis(axis);

  auto chart = [m, n1, c, axis, rho, s_max, grading, B](const std::vector<Jet2>& u) {
    Jet2 w = Jet2::constant(0.0, m);
    for (int a = 0; a < m; ++a) w = w + u[a] * u[a];
    // angle kappa(|u|) = s_max tanh(grading |u|), as a function of w = |u|^2
    Jet2 p = tanhc_sqrt(w * (grading * grading)) * (s_max * grading);  // kappa/|u|
    Jet2 kappa2 = w * p * p;
    Jet2 ck = cos_sqrt(kappa2);
    Jet2 sk_over_t = sinc_sqrt(kappa2) * p;  // sin(kappa)/|u|
    std::vector<Jet2> out(n1, Jet2::constant(0.0, m));
    for (int cidx = 0; cidx < n1; ++cidx) {
      Jet2 acc = Jet2::constant(c[cidx], m) - (ck * (rho * axis[cidx]));
      for (int a = 0; a < m; ++a) acc = acc + sk_over_t * (rho * B(cidx, a)) * u[a];
      out[cidx] = acc;
    }
    return out;
  };
  Vec lo = Vec::Constant(m, -param_radius), hi = Vec::Constant(m, param_radius);
  const std::string name = "sphere_cap_theta" + std::to_string(theta);
  return ImmersedPatch::analytic(m, n1, chart, lo, hi, name).set_sample_norm_cap(param_radius);
}

// Euclidean round sphere of radius rho centred at the origin (hypersurface),
// polar chart around -axis. Curvature oracle geometry.
inline ImmersedPatch sphere_patch(int n1, double rho, double angle_span = 2.6) {
  const int m = n1 - 1;
  Vec axis = Vec::Zero(n1);
  axis[n1 - 1] = 1.0;
  const Mat B = detail::complement_basis(axis);
  auto chart = [m, n1, rho, axis, B](const std::vector<Jet2>& u) {
    Jet2 w = Jet2::constant(0.0, m);
    for (int a = 0; a < m; ++a) w = w + u[a] * u[a];
    Jet2 ck = cos_sqrt(w);
    Jet2 sk = sinc_sqrt(w);
    std::vector<Jet2> out(n1, Jet2::constant(0.0, m));
    for (int c = 0; c < n1; ++c) {
      Jet2 acc = ck * (-rho * axis[c]);
      for (int a = 0; a < m; ++a) acc = acc + sk * (rho * B(c, a)) * u[a];
      out[c] = acc;
    }
    return out;
  };
  Vec lo = Vec::Constant(m, -angle_span), hi = Vec::Constant(m, angle_span);
  return ImmersedPatch::analytic(m, n1, chart, lo, hi, "sphere");
}

// Graph over the totally geodesic disk: u -> (z(u), h(z(u))) with z the
// geodesic-disk chart in R^m and h a user height function on jets.
using JetHeight = std::function<Jet2(const std::vector<Jet2>&)>;

inline ImmersedPatch graph_patch(int m, JetHeight height, std::string name,
                                 double param_radius = 14.0) {
  const int n1 = m + 1;
  auto chart = [m, n1, height](const std::vector<Jet2>& u) {
    Jet2 w = Jet2::constant(0.0, m);
    for (int a = 0; a < m; ++a) w = w + u[a] * u[a];
    Jet2 scale = tanhc_sqrt(w * 0.25) * 0.5;
    std::vector<Jet2> z(m, Jet2::constant(0.0, m));
    for (int a = 0; a < m; ++a) z[a] = scale * u[a];
    std::vector<Jet2> out(n1, Jet2::constant(0.0, m));
    for (int a = 0; a < m; ++a) out[a] = z[a];
    out[m] = height(z);
    return out;
  };
  Vec lo = Vec::Constant(m, -param_radius), hi = Vec::Constant(m, param_radius);
  return ImmersedPatch::analytic(m, n1, chart, lo, hi, std::move(name))
      .set_sample_norm_cap(param_radius);
}

// Built-in height functions for graph perturbations. All of them vanish to
// second order at the rim |z| = 1, so the graphs meet the boundary sphere
// orthogonally and their curvature decays at infinity.
inline JetHeight height_flat_quartic(double amplitude) {
  return [amplitude](const std::vector<Jet2>& z) {
    const int m = static_cast<int>(z.size());
    Jet2 r2 = Jet2::constant(0.0, m);
    for (const Jet2& zi : z) r2 = r2 + zi * zi;
    Jet2 q = 1.0 - r2;
    return q * q * amplitude;
  };
}

inline JetHeight height_skewed(double amplitude) {
  return [amplitude](const std::vector<Jet2>& z) {
    const int m = static_cast<int>(z.size());
    Jet2 r2 = Jet2::constant(0.0, m);
    for (const Jet2& zi : z) r2 = r2 + zi * zi;
    Jet2 q = 1.0 - r2;
    return q * q * (1.0 + z[0] * 0.5) * amplitude;
  };
}

inline JetHeight height_wavy(double amplitude) {
  return [amplitude](const std::vector<Jet2>& z) {
    const int m = static_cast<int>(z.size());
    Jet2 r2 = Jet2::constant(0.0, m);
    for (const Jet2& zi : z) r2 = r2 + zi * zi;
    Jet2 q = 1.0 - r2;
    return q * q * (sin(z[0] * 3.0) * 0.4 + 1.0) * amplitude;
  };
}

}  // namespace hypspec
