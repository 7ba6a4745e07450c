#pragma once

#include "hypspec/patch.hpp"

#include <array>
#include <fstream>
#include <sstream>

namespace hypspec {

// Triangle mesh of a truncated surface piece. Each triangle carries its own
// affine chart (local corner coordinates) and the induced hyperbolic metric at
// the barycentre, which is all that first-order assembly needs.
struct TriangleGeometry {
  std::array<std::array<double, 2>, 3> corner;  // local coordinates
  double g00 = 1.0, g01 = 0.0, g11 = 1.0;       // symmetric metric tensor
};

struct HyperbolicMesh {
  int m = 2;
  int n1 = 3;
  std::vector<Vec> vertex_points;              // ball coordinates
  std::vector<double> vertex_radius;           // hyperbolic distance to origin
  std::vector<std::array<int, 3>> triangles;
  std::vector<TriangleGeometry> geometry;      // parallel to triangles
  std::vector<char> is_boundary;               // per vertex
  std::string name;

  std::size_t vertex_count() const { return vertex_points.size(); }
  std::size_t triangle_count() const { return triangles.size(); }

  std::size_t interior_count() const {
    std::size_t c = 0;
    for (char b : is_boundary) c += (b == 0);
    return c;
  }

  // max hyperbolic edge length, a resolution measure
  double resolution() const {
    double h = 0.0;
    for (std::size_t t = 0; t < triangles.size(); ++t) {
      const TriangleGeometry& tg = geometry[t];
      for (int e = 0; e < 3; ++e) {
        const auto& a = tg.corner[e];
        const auto& b = tg.corner[(e + 1) % 3];
        const double dx = b[0] - a[0], dy = b[1] - a[1];
        h = std::max(h, std::sqrt(tg.g00 * dx * dx + 2.0 * tg.g01 * dx * dy + tg.g11 * dy * dy));
      }
    }
    return h;
  }

  double hyperbolic_volume() const {
    double v = 0.0;
    for (const TriangleGeometry& tg : geometry) {
      const double e1x = tg.corner[1][0] - tg.corner[0][0];
      const double e1y = tg.corner[1][1] - tg.corner[0][1];
      const double e2x = tg.corner[2][0] - tg.corner[0][0];
      const double e2y = tg.corner[2][1] - tg.corner[0][1];
      const double area = 0.5 * std::abs(e1x * e2y - e1y * e2x);
      v += area * std::sqrt(tg.g00 * tg.g11 - tg.g01 * tg.g01);
    }
    return v;
  }
};

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

// Structured unit square with the flat metric, Dirichlet boundary on all four
// sides. Classical eigenvalue oracle geometry.
inline HyperbolicMesh unit_square_mesh(int n_per_side) {
  HyperbolicMesh mesh;
  mesh.name = "unit_square";
  const int n = n_per_side;
  auto vid = [n](int i, int j) { return i * (n + 1) + j; };
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; j <= n; ++j) {
      Vec p(3);
      p << i / double(n) * 0.2, j / double(n) * 0.2, 0.0;  // embedding unused
      mesh.vertex_points.push_back(p);
      mesh.vertex_radius.push_back(0.0);
      mesh.is_boundary.push_back(i == 0 || j == 0 || i == n || j == n);
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      auto corner_of = [&](int a, int b) {
        return std::array<double, 2>{a / double(n), b / double(n)};
      };
      TriangleGeometry g1;
      g1.corner = {corner_of(i, j), corner_of(i + 1, j), corner_of(i + 1, j + 1)};
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j), vid(i + 1, j + 1)});
      mesh.geometry.push_back(g1);
      TriangleGeometry g2;
      g2.corner = {corner_of(i, j), corner_of(i + 1, j + 1), corner_of(i, j + 1)};
      mesh.triangles.push_back({vid(i, j), vid(i + 1, j + 1), vid(i, j + 1)});
      mesh.geometry.push_back(g2);
    }
  }
  return mesh;
}

namespace detail {

// Parameter radius at which the chart reaches hyperbolic radius r from the
// origin, probing along theta = 0 (radial charts).
inline double param_radius_for(const ImmersedPatch& patch, double r_target, double t_max) {
  auto radius_at = [&](double t) {
    Vec u(2);
    u << t, 0.0;
    const double nx = std::min(patch.value(u).norm(), 1.0 - 1e-16);
    return 2.0 * std::atanh(nx);
  };
  double lo = 1e-9, hi = t_max;
  if (radius_at(hi) < r_target)
    throw input_error("polar_mesh: chart does not reach radius " + std::to_string(r_target));
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (radius_at(mid) < r_target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Hyperbolic circumference of the parameter circle |u| = t.
inline double ring_length(const ImmersedPatch& patch, double t, int segs = 128) {
  double L = 0.0;
  Vec prev = patch.value((Vec(2) << t, 0.0).finished());
  for (int i = 1; i <= segs; ++i) {
    const double th = 2.0 * M_PI * i / segs;
    Vec cur = patch.value((Vec(2) << t * std::cos(th), t * std::sin(th)).finished());
    const Vec mid = 0.5 * (prev + cur);
    const double phi = 0.5 * (1.0 - mid.squaredNorm());
    L += (cur - prev).norm() / phi;
    prev = cur;
  }
  return L;
}

}  // namespace detail

// Polar structured mesh of a radial patch (geodesic disk, graph over it, cap)
// truncated at hyperbolic radii [r_inner, r_outer]. Rings follow the geodesic
// radius and ring vertex counts follow the hyperbolic circumference, so
// element size is roughly uniform in the hyperbolic metric. A positive
// grading makes elements geometrically finer toward the truncation boundary
// (local size h * 2^{-grading r/r_outer}). The mesh lives in the patch's
// Cartesian parameter plane; each triangle stores the pulled back metric at
// its barycentre.
inline HyperbolicMesh polar_mesh(const ImmersedPatch& patch, double r_inner, double r_outer,
                                 double h, double grading = 0.0) {
  if (!(r_outer > r_inner && r_inner >= 0.0)) throw input_error("polar_mesh: bad radius range");
  if (!(h > 0.0)) throw input_error("polar_mesh: bad resolution");
  HyperbolicMesh mesh;
  mesh.name = "polar[" + patch.name() + "]";

  const double t_box = patch.param_hi()[0];
  auto h_local = [h, grading, r_outer](double r) {
    return grading == 0.0 ? h : h * std::pow(0.5, grading * r / r_outer);
  };
  // The chart centre need not sit at the origin (graphs with nonzero height);
  // rings start from the surface's own central radius when the requested
  // inner radius falls below it.
  const double nx0 = std::min(patch.value(Vec::Zero(2)).norm(), 1.0 - 1e-16);
  const double r_centre = 2.0 * std::atanh(nx0);
  const bool has_centre = r_inner <= r_centre + 1e-9;
  const double r_start = has_centre ? r_centre : r_inner;
  if (!(r_outer > r_start))
    throw input_error("polar_mesh: outer radius below the chart centre radius");

  std::vector<double> ring_r;
  {
    double r = r_start;
    if (has_centre) r += h_local(r);
    while (r < r_outer - 0.5 * h_local(r)) {
      ring_r.push_back(r);
      r += h_local(r);
    }
    ring_r.push_back(r_outer);
    if (ring_r.size() < 2) ring_r.insert(ring_r.begin(), 0.5 * (r_start + r_outer));
  }

  std::vector<double> ring_t;           // parameter radius per ring
  std::vector<std::vector<int>> rings;  // vertex ids per ring
  for (double r : ring_r) ring_t.push_back(detail::param_radius_for(patch, r, t_box));

  if (has_centre) {
    mesh.vertex_points.push_back(patch.value(Vec::Zero(2)));
    mesh.vertex_radius.push_back(0.0);
    mesh.is_boundary.push_back(0);
  }

  std::vector<Vec> vertex_params;
  if (has_centre) vertex_params.push_back(Vec::Zero(2));
  for (std::size_t ridx = 0; ridx < ring_t.size(); ++ridx) {
    const double t = ring_t[ridx];
    const double L = detail::ring_length(patch, t);
    const int count = std::max(8, static_cast<int>(std::ceil(L / h_local(ring_r[ridx]))));
    std::vector<int> ring;
    for (int i = 0; i < count; ++i) {
      const double th = 2.0 * M_PI * i / count;
      Vec u(2);
      u << t * std::cos(th), t * std::sin(th);
      ring.push_back(static_cast<int>(mesh.vertex_points.size()));
      Vec x = patch.value(u);
      mesh.vertex_radius.push_back(2.0 * std::atanh(std::min(x.norm(), 1.0 - 1e-16)));
      mesh.vertex_points.push_back(std::move(x));
      vertex_params.push_back(u);
      const bool outer_b = (ridx + 1 == ring_t.size());
      const bool inner_b = (!has_centre && ridx == 0);
      mesh.is_boundary.push_back(outer_b || inner_b);
    }
    rings.push_back(std::move(ring));
  }

  auto add_triangle = [&](int a, int b, int c) {
    // orientation fix: positive parameter-plane area
    const Vec &pa = vertex_params[a], &pb = vertex_params[b], &pc = vertex_params[c];
    const double cross =
        (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0]);
    if (cross < 0.0)
      mesh.triangles.push_back({a, c, b});
    else
      mesh.triangles.push_back({a, b, c});
  };

  if (has_centre) {
    const std::vector<int>& ring = rings[0];
    for (std::size_t i = 0; i < ring.size(); ++i)
      add_triangle(0, ring[i], ring[(i + 1) % ring.size()]);
  }
  // stitch consecutive rings by two-pointer merge on angle
  for (std::size_t r = 0; r + 1 < rings.size(); ++r) {
    const std::vector<int>& A = rings[r];
    const std::vector<int>& B = rings[r + 1];
    const std::size_t na = A.size(), nb = B.size();
    std::size_t i = 0, j = 0;
    while (i < na || j < nb) {
      const double next_a = 2.0 * M_PI * (i + 1) / na;
      const double next_b = 2.0 * M_PI * (j + 1) / nb;
      if (j >= nb || (i < na && next_a <= next_b)) {
        add_triangle(A[i % na], B[j % nb], A[(i + 1) % na]);
        ++i;
      } else {
        add_triangle(A[i % na], B[j % nb], B[(j + 1) % nb]);
        ++j;
      }
    }
  }

  // per-triangle geometry: parameter coordinates + pulled back metric
  mesh.geometry.resize(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    TriangleGeometry& tg = mesh.geometry[t];
    Vec bary = Vec::Zero(2);
    for (int k = 0; k < 3; ++k) {
      const Vec& u = vertex_params[mesh.triangles[t][k]];
      tg.corner[k] = {u[0], u[1]};
      bary += u / 3.0;
    }
    const PatchDerivatives d = patch.eval(bary);
    const double phi = 0.5 * (1.0 - d.point.squaredNorm());
    const Mat G = (d.jacobian.transpose() * d.jacobian) / (phi * phi);
    tg.g00 = G(0, 0);
    tg.g01 = G(0, 1);
    tg.g11 = G(1, 1);
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Text format: header "m n+1 V S", V vertex lines (ball coordinates), S
// simplex lines (0-based), one boundary-marker line. Loaded meshes carry
// piecewise-flat geometry: local coordinates from the Euclidean edge Gram,
// metric phi^{-2} I at the barycentre.
// ---------------------------------------------------------------------------

inline void save_mesh(const std::string& path, const HyperbolicMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw input_error("save_mesh: cannot open '" + path + "'");
  out.precision(17);
  out << mesh.m << ' ' << mesh.n1 << ' ' << mesh.vertex_count() << ' ' << mesh.triangle_count()
      << '\n';
  for (const Vec& p : mesh.vertex_points) {
    for (int c = 0; c < p.size(); ++c) out << p[c] << (c + 1 == p.size() ? '\n' : ' ');
  }
  for (const auto& tri : mesh.triangles)
    out << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
    out << int(mesh.is_boundary[v]) << (v + 1 == mesh.vertex_count() ? '\n' : ' ');
}

inline HyperbolicMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw input_error("load_mesh: cannot open '" + path + "'");
  HyperbolicMesh mesh;
  mesh.name = path;
  std::size_t V = 0, S = 0;
  in >> mesh.m >> mesh.n1 >> V >> S;
  if (!in || mesh.m != 2)
    throw input_error("load_mesh: bad header in '" + path + "' (only m = 2 supported)");
  mesh.vertex_points.resize(V, Vec(mesh.n1));
  for (std::size_t v = 0; v < V; ++v) {
    for (int c = 0; c < mesh.n1; ++c) in >> mesh.vertex_points[v][c];
    const double nx = mesh.vertex_points[v].norm();
    if (!(nx < 1.0)) throw input_error("load_mesh: vertex outside the unit ball");
    mesh.vertex_radius.push_back(2.0 * std::atanh(nx));
  }
  mesh.triangles.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    auto& tri = mesh.triangles[s];
    in >> tri[0] >> tri[1] >> tri[2];
    for (int k : tri)
      if (k < 0 || k >= static_cast<int>(V))
        throw input_error("load_mesh: simplex index out of range");
  }
  mesh.is_boundary.resize(V);
  for (std::size_t v = 0; v < V; ++v) {
    int b = 0;
    in >> b;
    mesh.is_boundary[v] = static_cast<char>(b != 0);
  }
  if (!in) throw input_error("load_mesh: truncated file '" + path + "'");
  // piecewise-flat geometry from the embedding
  mesh.geometry.resize(S);
  for (std::size_t s = 0; s < S; ++s) {
    const Vec& p0 = mesh.vertex_points[mesh.triangles[s][0]];
    const Vec& p1 = mesh.vertex_points[mesh.triangles[s][1]];
    const Vec& p2 = mesh.vertex_points[mesh.triangles[s][2]];
    const Vec e1 = p1 - p0, e2 = p2 - p0;
    const double a = e1.norm();
    const double b_dot = e1.dot(e2) / a;
    const double c2 = e2.squaredNorm() - b_dot * b_dot;
    if (!(a > 0.0) || !(c2 > 0.0))
      throw input_error("load_mesh: degenerate simplex " + std::to_string(s));
    TriangleGeometry& tg = mesh.geometry[s];
    tg.corner[0] = {0.0, 0.0};
    tg.corner[1] = {a, 0.0};
    tg.corner[2] = {b_dot, std::sqrt(c2)};
    const Vec bary = (p0 + p1 + p2) / 3.0;
    const double phi = 0.5 * (1.0 - bary.squaredNorm());
    const double scale = 1.0 / (phi * phi);
    tg.g00 = scale;
    tg.g01 = 0.0;
    tg.g11 = scale;
  }
  return mesh;
}

}  // namespace hypspec
