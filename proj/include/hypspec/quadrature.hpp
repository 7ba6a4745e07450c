#pragma once

#include "hypspec/common.hpp"

namespace hypspec {

// Gauss-Legendre reference rule on [-1,1]. Nodes are the Legendre roots,
// found by Newton iteration on the three-term recurrence.
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  explicit GaussLegendre(int order) : nodes(order), weights(order) {
    const int n = order;
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
      double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p1 = 1.0, p2 = 0.0;
        for (int j = 0; j < n; ++j) {
          const double p3 = p2;
          p2 = p1;
          p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
        }
        pp = n * (z * p1 - p2) / (z * z - 1.0);
        const double dz = -p1 / pp;
        z += dz;
        if (std::abs(dz) < 1e-16) break;
      }
      nodes[i] = -z;
      nodes[n - 1 - i] = z;
      weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
  }

  static const GaussLegendre& order10() {
    static const GaussLegendre rule(10);
    return rule;
  }
  static const GaussLegendre& order20() {
    static const GaussLegendre rule(20);
    return rule;
  }
};

// Composite Gauss-Legendre rule over [a,b]. Panel edges are uniform with
// optional extra breakpoints (integrand kinks). An optional sinh^p(t) weight is
// evaluated analytically at the nodes. Panel sums are combined pairwise in a
// fixed order, so results do not depend on the parallelism degree.
class QuadratureRule {
 public:
  QuadratureRule(double a, double b, int panels, int order = 10)
      : a_(a), b_(b), order_(order) {
    if (!(b > a)) throw input_error("QuadratureRule: empty interval");
    if (panels < 1) throw input_error("QuadratureRule: need at least one panel");
    edges_.resize(panels + 1);
    for (int i = 0; i <= panels; ++i) edges_[i] = a + (b - a) * i / panels;
  }

  void add_breakpoints(const std::vector<double>& pts) {
    for (double p : pts)
      if (p > a_ + 1e-14 && p < b_ - 1e-14) edges_.push_back(p);
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end(),
                             [](double x, double y) { return std::abs(x - y) < 1e-13; }),
                 edges_.end());
  }

  double a() const { return a_; }
  double b() const { return b_; }
  int panel_count() const { return static_cast<int>(edges_.size()) - 1; }

  template <class F>
  double integrate(F&& f) const {
    return integrate_weighted(std::forward<F>(f), 0.0);
  }

  // Integrates f(t) * sinh(t)^p.
  template <class F>
  double integrate_weighted(F&& f, double sinh_power) const {
    const GaussLegendre& gl = (order_ >= 16) ? GaussLegendre::order20() : GaussLegendre::order10();
    const int np = panel_count();
    std::vector<double> panel_sums(np);
    for (int p = 0; p < np; ++p) {
      const double lo = edges_[p], hi = edges_[p + 1];
      const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
      double s = 0.0;
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double t = mid + half * gl.nodes[q];
        double v = f(t);
        if (sinh_power != 0.0) v *= sinh_pow(t, sinh_power);
        s += gl.weights[q] * v;
      }
      panel_sums[p] = s * half;
    }
    return pairwise_sum(panel_sums);
  }

  QuadratureRule refined() const {
    QuadratureRule r(a_, b_, 1, order_);
    r.edges_.clear();
    for (std::size_t i = 0; i + 1 < edges_.size(); ++i) {
      r.edges_.push_back(edges_[i]);
      r.edges_.push_back(0.5 * (edges_[i] + edges_[i + 1]));
    }
    r.edges_.push_back(edges_.back());
    return r;
  }

  // Panel width small enough to resolve every listed wavelength with
  // `panels_per_period` panels.
  static QuadratureRule oscillatory(double a, double b, std::vector<double> wavelengths,
                                    int panels_per_period = 20, int order = 10) {
    double width = (b - a);
    for (double wl : wavelengths)
      if (wl > 0.0) width = std::min(width, wl / panels_per_period);
    const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    return QuadratureRule(a, b, panels, order);
  }

 private:
  double a_, b_;
  int order_;
  std::vector<double> edges_;
};

}  // namespace hypspec
