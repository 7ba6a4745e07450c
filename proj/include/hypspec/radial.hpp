#pragma once

#include "hypspec/common.hpp"
#include "hypspec/quadrature.hpp"

#include <array>
#include <memory>

namespace hypspec {

// Zero-order term of the radial operator: alpha(t) = (m-1)(m-3)/(4 sinh^2 t).
inline double radial_alpha(int m, double t) {
  if (m == 3) return 0.0;
  const double s = std::sinh(t);
  return 0.25 * (m - 1) * (m - 3) / (s * s);
}

// beta = sqrt(lambda - (m-1)^2/4); requires lambda strictly above the bottom.
inline double radial_beta(int m, double lambda) {
  const double bottom = 0.25 * sq(m - 1.0);
  if (!(lambda > bottom))
    throw input_error("radial_beta: lambda must exceed (m-1)^2/4 = " + std::to_string(bottom));
  return std::sqrt(lambda - bottom);
}

struct RadialValue {
  Complex f, d1, d2;
};

// A scalar (complex-valued) function of the geodesic distance, with two
// derivatives. Profiles are immutable; mollification returns a new profile.
struct RadialProfile {
  std::function<RadialValue(double)> eval;
  double support_lo = 0.0;
  double support_hi = kInf;
  int m = 2;
  double lambda = 0.0;
  double beta = 0.0;
  double R = 0.0;
  double sigma = 0.0;

  RadialValue operator()(double t) const { return eval(t); }
};

namespace detail {

// psi(t) = sinh(t)^{-(m-1)/2} exp(i beta t), evaluated with its derivatives via
// the logarithmic derivative mu = -nu coth t + i beta, nu = (m-1)/2.
inline RadialValue eval_psi(int m, double beta, double t) {
  const double nu = 0.5 * (m - 1);
  const double ct = 1.0 / std::tanh(t);
  const double inv_s2 = 1.0 / sq(std::sinh(t));
  const double mag = std::exp(-nu * log_sinh(t));
  const Complex phase(std::cos(beta * t), std::sin(beta * t));
  const Complex psi = mag * phase;
  const Complex mu(-nu * ct, beta);
  RadialValue v;
  v.f = psi;
  v.d1 = psi * mu;
  v.d2 = psi * (mu * mu + nu * inv_s2);
  return v;
}

// Window w(t) = sin^2((2pi/R)(t - R/2)) on [R/2, R], zero elsewhere.
inline RadialValue eval_window(double R, double t) {
  RadialValue v{0.0, 0.0, 0.0};
  if (t < 0.5 * R || t > R) return v;
  const double k = 2.0 * M_PI / R;
  const double u = k * (t - 0.5 * R);
  const double s = std::sin(u);
  v.f = s * s;
  v.d1 = k * std::sin(2.0 * u);
  v.d2 = 2.0 * k * k * std::cos(2.0 * u);
  return v;
}

}  // namespace detail

inline RadialProfile psi_profile(int m, double lambda) {
  RadialProfile p;
  p.m = m;
  p.lambda = lambda;
  p.beta = radial_beta(m, lambda);
  p.eval = [m, beta = p.beta](double t) {
    if (!(t > 0.0)) throw domain_error("psi: t must be positive");
    return detail::eval_psi(m, beta, t);
  };
  return p;
}

// upsilon_R = psi * window, supported on [R/2, R].
inline RadialProfile upsilon_profile(int m, double lambda, double R) {
  if (!(R > 0.0)) throw input_error("upsilon_profile: R must be positive");
  RadialProfile p;
  p.m = m;
  p.lambda = lambda;
  p.beta = radial_beta(m, lambda);
  p.R = R;
  p.support_lo = 0.5 * R;
  p.support_hi = R;
  p.eval = [m, beta = p.beta, R](double t) -> RadialValue {
    if (t <= 0.0 || t < 0.5 * R || t > R) return {0.0, 0.0, 0.0};
    const RadialValue psi = detail::eval_psi(m, beta, t);
    const RadialValue w = detail::eval_window(R, t);
    RadialValue v;
    v.f = psi.f * w.f;
    v.d1 = psi.d1 * w.f + psi.f * w.d1;
    v.d2 = psi.d2 * w.f + 2.0 * psi.d1 * w.d1 + psi.f * w.d2;
    return v;
  };
  return p;
}

// Real nonnegative sin^2 bump on [a,b]; used as the weight in volume
// comparisons.
inline RadialProfile bump_profile(double a, double b) {
  if (!(b > a && a >= 0.0)) throw input_error("bump_profile: need 0 <= a < b");
  RadialProfile p;
  p.support_lo = a;
  p.support_hi = b;
  p.eval = [a, b](double t) -> RadialValue {
    if (t < a || t > b) return {0.0, 0.0, 0.0};
    const double k = M_PI / (b - a);
    const double u = k * (t - a);
    const double s = std::sin(u);
    return {s * s, k * std::sin(2.0 * u), 2.0 * k * k * std::cos(2.0 * u)};
  };
  return p;
}

// f(t) = t; handy as a probe whose radial Laplacian is (m-1) coth(t).
inline RadialProfile ramp_profile() {
  RadialProfile p;
  p.eval = [](double t) -> RadialValue { return {t, 1.0, 0.0}; };
  return p;
}

// Residual of the exact radial equation satisfied by psi:
// |psi'' + (m-1) coth(t) psi' + (lambda + alpha(t)) psi|.
inline double psi_residual(int m, double lambda, double t) {
  if (!(t > 0.0)) throw domain_error("psi_residual: t must be positive");
  const double beta = radial_beta(m, lambda);
  const RadialValue v = detail::eval_psi(m, beta, t);
  const double ct = 1.0 / std::tanh(t);
  const Complex lhs = v.d2 + (m - 1.0) * ct * v.d1 + (lambda + radial_alpha(m, t)) * v.f;
  return std::abs(lhs);
}

// epsilon_R = 2 max{ alpha^2(R/2), 16 beta^2 (2pi/R)^2, 16 (2pi/R)^4 }.
inline double epsilon_R(int m, double lambda, double R) {
  if (!(R > 0.0)) throw input_error("epsilon_R: R must be positive");
  const double beta2 = lambda - 0.25 * sq(m - 1.0);
  const double k = 2.0 * M_PI / R;
  const double a = radial_alpha(m, 0.5 * R);
  return 2.0 * std::max({a * a, 16.0 * beta2 * k * k, 16.0 * k * k * k * k});
}

enum class MollifierKernel { Bump, TruncatedGaussian };

namespace detail {

inline double kernel_value(MollifierKernel kind, double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  switch (kind) {
    case MollifierKernel::Bump:
      return std::exp(-1.0 / (1.0 - u * u));
    case MollifierKernel::TruncatedGaussian:
      return std::exp(-8.0 * u * u);
  }
  return 0.0;
}

inline double kernel_mass(MollifierKernel kind) {
  static double bump_mass = -1.0, gauss_mass = -1.0;
  double& cache = (kind == MollifierKernel::Bump) ? bump_mass : gauss_mass;
  if (cache < 0.0) {
    QuadratureRule q(-1.0, 1.0, 64, 20);
    cache = q.integrate([kind](double u) { return kernel_value(kind, u); });
  }
  return cache;
}

}  // namespace detail

// Convolution with a compactly supported kernel of width sigma. The result is
// smooth with support widened by sigma on both sides. Derivatives convolve the
// profile's own derivatives, which is valid since the inputs are W^{2,2}.
inline RadialProfile mollify(const RadialProfile& p, double sigma,
                             MollifierKernel kind = MollifierKernel::Bump) {
  if (!(sigma > 0.0)) throw input_error("mollify: sigma must be positive");
  if (p.R > 0.0 && sigma >= p.R / 100.0)
    throw mollification_error("mollify: sigma must be below R/100, got sigma=" +
                              std::to_string(sigma));
  RadialProfile out = p;
  out.sigma = sigma;
  out.support_lo = std::max(0.0, p.support_lo - sigma);
  out.support_hi = p.support_hi + sigma;
  const double norm = 1.0 / (sigma * detail::kernel_mass(kind));
  // Kinks of upsilon-type profiles sit at the support edges; panels are split
  // there so each Gauss panel sees a smooth integrand.
  const double lo = p.support_lo, hi = p.support_hi;
  auto base = p.eval;
  out.eval = [base, sigma, kind, norm, lo, hi](double t) -> RadialValue {
    // Panel edges split at the support edges of the sharp profile, where its
    // second derivative jumps.
    std::vector<double> edges;
    const double a = t - sigma, b = t + sigma;
    const int base_panels = 8;
    for (int i = 0; i <= base_panels; ++i) edges.push_back(a + (b - a) * i / base_panels);
    for (double br : {lo, hi})
      if (br > a + 1e-14 && br < b - 1e-14) edges.push_back(br);
    std::sort(edges.begin(), edges.end());
    const GaussLegendre& gl = GaussLegendre::order10();
    RadialValue acc{0.0, 0.0, 0.0};
    for (std::size_t pnl = 0; pnl + 1 < edges.size(); ++pnl) {
      const double mid = 0.5 * (edges[pnl] + edges[pnl + 1]);
      const double half = 0.5 * (edges[pnl + 1] - edges[pnl]);
      if (half <= 0.0) continue;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double s = mid + half * gl.nodes[q];
        const double wgt = gl.weights[q] * half * detail::kernel_value(kind, (t - s) / sigma);
        if (wgt == 0.0) continue;
        const RadialValue v = base(s);
        acc.f += wgt * v.f;
        acc.d1 += wgt * v.d1;
        acc.d2 += wgt * v.d2;
      }
    }
    acc.f *= norm;
    acc.d1 *= norm;
    acc.d2 *= norm;
    return acc;
  };
  return out;
}

inline bool supports_disjoint(const RadialProfile& a, const RadialProfile& b) {
  return a.support_hi < b.support_lo || b.support_hi < a.support_lo;
}

// ---------------------------------------------------------------------------
// Weighted integrals of a profile over its support.
// ---------------------------------------------------------------------------

// The radial operator applied to a profile: f'' + (m-1) coth(t) f' + lambda f.
inline Complex radial_operator(const RadialProfile& p, const RadialValue& v, double t) {
  return v.d2 + (p.m - 1.0) / std::tanh(t) * v.d1 + p.lambda * v.f;
}

struct ProfileIntegrals {
  double op_sq = 0.0;     // int |f'' + (m-1) coth f' + lambda f|^2 sinh^{m-1}
  double norm_sq = 0.0;   // int |f|^2 sinh^{m-1}
  double d1_sq = 0.0;     // int |f'|^2 sinh^{m-1}
  double d2_sq = 0.0;     // int |f''|^2 sinh^{m-1}
  double quad_error = 0.0;  // |value(2x panels) - value| on op_sq
};

inline QuadratureRule profile_rule(const RadialProfile& p, int panels_per_period = 20) {
  std::vector<double> wavelengths;
  if (p.beta > 0.0) wavelengths.push_back(2.0 * M_PI / p.beta);
  if (p.R > 0.0) wavelengths.push_back(0.25 * p.R);
  const double width = p.support_hi - p.support_lo;
  wavelengths.push_back(width);  // at least a few panels on short supports
  double lo = std::max(p.support_lo, 1e-12);
  return QuadratureRule::oscillatory(lo, p.support_hi, wavelengths, panels_per_period);
}

inline ProfileIntegrals profile_integrals(const RadialProfile& p, int panels_per_period = 20) {
  if (!std::isfinite(p.support_hi))
    throw input_error("profile_integrals: profile must have compact support");
  QuadratureRule rule = profile_rule(p, panels_per_period);
  const double w = p.m - 1.0;
  auto op_sq = [&](double t) {
    const RadialValue v = p(t);
    return std::norm(radial_operator(p, v, t));
  };
  ProfileIntegrals out;
  out.op_sq = rule.integrate_weighted(op_sq, w);
  out.norm_sq = rule.integrate_weighted([&](double t) { return std::norm(p(t).f); }, w);
  out.d1_sq = rule.integrate_weighted([&](double t) { return std::norm(p(t).d1); }, w);
  out.d2_sq = rule.integrate_weighted([&](double t) { return std::norm(p(t).d2); }, w);
  out.quad_error = std::abs(rule.refined().integrate_weighted(op_sq, w) - out.op_sq);
  return out;
}

// ---------------------------------------------------------------------------
// Window-estimate verification.
// ---------------------------------------------------------------------------

struct LemmaEstReport {
  int m = 0;
  double lambda = 0.0, R = 0.0, sigma = 0.0;
  double lhs = 0.0;       // int |op upsilon|^2 sinh^{m-1}
  double rhs = 0.0;       // epsilon_R * int |upsilon|^2 sinh^{m-1}
  double ratio = 0.0;     // lhs / rhs
  double eps_R = 0.0;
  double c1 = 0.0, c2 = 0.0;  // empirical derivative-bound constants
  bool pass = false;
};

// Checks int |L upsilon_R|^2 <= epsilon_R int |upsilon_R|^2 (both sides with
// the sinh^{m-1} weight) and reports the empirical constants C1, C2 of the
// first- and second-derivative bounds.
inline LemmaEstReport verify_lemma_est(int m, double lambda, double R, double sigma = 0.0,
                                       int panels_per_period = 20) {
  RadialProfile u = upsilon_profile(m, lambda, R);
  if (sigma > 0.0) u = mollify(u, sigma);
  const ProfileIntegrals I = profile_integrals(u, panels_per_period);
  if (I.quad_error > 0.01 * std::max(I.op_sq, 1e-300))
    throw resolution_error("verify_lemma_est: quadrature not resolved, error " +
                           std::to_string(I.quad_error / I.op_sq));
  LemmaEstReport rep;
  rep.m = m;
  rep.lambda = lambda;
  rep.R = R;
  rep.sigma = sigma;
  rep.eps_R = epsilon_R(m, lambda, R);
  rep.lhs = I.op_sq;
  rep.rhs = rep.eps_R * I.norm_sq;
  rep.ratio = rep.lhs / rep.rhs;
  rep.c1 = I.d1_sq / I.norm_sq;
  rep.c2 = I.d2_sq / I.norm_sq;
  rep.pass = rep.ratio <= 1.0 + 1e-6;
  return rep;
}

struct LemmaEstSweep {
  std::vector<LemmaEstReport> rows;
  double c_star = 0.0;  // 2 * max of empirical C1, C2 over the sweep
  bool all_pass = false;
};

inline LemmaEstSweep lemma_est_sweep(int m, double lambda, const std::vector<double>& Rs,
                                     double sigma = 0.0) {
  LemmaEstSweep sweep;
  double cmax = 0.0;
  sweep.all_pass = true;
  for (double R : Rs) {
    LemmaEstReport rep = verify_lemma_est(m, lambda, R, sigma);
    cmax = std::max({cmax, rep.c1, rep.c2});
    sweep.all_pass = sweep.all_pass && rep.pass;
    sweep.rows.push_back(rep);
  }
  sweep.c_star = 2.0 * cmax;
  for (const LemmaEstReport& rep : sweep.rows)
    sweep.all_pass = sweep.all_pass && rep.c1 <= sweep.c_star && rep.c2 <= sweep.c_star;
  return sweep;
}

// Mollification budget checks: smoothed vs sharp window integrals.
struct MollifyReport {
  double op_ratio = 0.0;    // int |L u_sigma|^2 / int |L u_R|^2        (<= 2)
  double norm_ratio = 0.0;  // int |u_R|^2 / int |u_sigma|^2            (<= 2)
  double c1_sigma = 0.0;    // int |u_sigma'|^2 / int |u_sigma|^2       (<= 4 C*)
  double c2_sigma = 0.0;    // int |u_sigma''|^2 / int |u_sigma|^2      (<= 4 C*)
  bool pass_op = false, pass_norm = false, pass_d1 = false, pass_d2 = false;
  bool pass() const { return pass_op && pass_norm && pass_d1 && pass_d2; }
};

inline MollifyReport mollify_report(int m, double lambda, double R, double sigma,
                                    double c_star, MollifierKernel kind = MollifierKernel::Bump) {
  const RadialProfile sharp = upsilon_profile(m, lambda, R);
  const RadialProfile smooth = mollify(sharp, sigma, kind);
  const ProfileIntegrals a = profile_integrals(sharp);
  const ProfileIntegrals b = profile_integrals(smooth);
  MollifyReport rep;
  rep.op_ratio = b.op_sq / a.op_sq;
  rep.norm_ratio = a.norm_sq / b.norm_sq;
  rep.c1_sigma = b.d1_sq / b.norm_sq;
  rep.c2_sigma = b.d2_sq / b.norm_sq;
  rep.pass_op = rep.op_ratio <= 2.0;
  rep.pass_norm = rep.norm_ratio <= 2.0;
  rep.pass_d1 = rep.c1_sigma <= 4.0 * c_star;
  rep.pass_d2 = rep.c2_sigma <= 4.0 * c_star;
  return rep;
}

// ---------------------------------------------------------------------------
// Isoperimetric profile of hyperbolic balls.
// ---------------------------------------------------------------------------

// f(t) = int_0^t ( int_0^T sinh^{m-1}(s) ds / sinh^{m-1}(T) ) dT, with
// f' = I(t)/sinh^{m-1}(t) and f'' from the quotient rule. The inner
// antiderivative I is cached on a fixed grid and extended by short panels.
class IsoperimetricProfile {
 public:
  explicit IsoperimetricProfile(int m) : m_(m) {
    if (m < 2) throw input_error("IsoperimetricProfile: m must be >= 2");
  }

  int dim() const { return m_; }

  // I(t) = int_0^t sinh^{m-1}
  double inner(double t) const {
    if (t <= 0.0) return 0.0;
    const std::size_t idx = static_cast<std::size_t>(t / kStep);
    extend_cache(idx);
    double base = cache_[idx];
    const double lo = idx * kStep;
    if (t > lo) {
      QuadratureRule q(lo, t, 2, 10);
      base += q.integrate([this](double s) { return sinh_pow(s, m_ - 1.0); });
    }
    return base;
  }

  double f(double t) const {
    if (t <= 0.0) return 0.0;
    QuadratureRule q(1e-12, t, std::max(8, static_cast<int>(t * 4)), 10);
    return q.integrate([this](double T) { return inner(T) / sinh_pow(T, m_ - 1.0); });
  }

  double fp(double t) const { return inner(t) / sinh_pow(t, m_ - 1.0); }

  double fpp(double t) const { return 1.0 - (m_ - 1.0) * fp(t) / std::tanh(t); }

  std::array<double, 3> operator()(double t) const { return {f(t), fp(t), fpp(t)}; }

 private:
  void extend_cache(std::size_t idx) const {
    while (cache_.size() <= idx) {
      const double lo = (cache_.size() - 1) * kStep;
      QuadratureRule q(lo, lo + kStep, 2, 10);
      cache_.push_back(cache_.back() +
                       q.integrate([this](double s) { return sinh_pow(s, m_ - 1.0); }));
    }
  }

  static constexpr double kStep = 0.25;
  int m_;
  mutable std::vector<double> cache_{0.0};
};

// Isoperimetric ratio of the hyperbolic m-ball of radius R: 1/f'(R).
inline double ball_cheeger(int m, double R) {
  if (!(R > 0.0)) throw input_error("ball_cheeger: R must be positive");
  return 1.0 / IsoperimetricProfile(m).fp(R);
}

}  // namespace hypspec
