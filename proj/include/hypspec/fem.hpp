#pragma once

#include "hypspec/mesh.hpp"
#include "hypspec/radial.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <random>

namespace hypspec {

using SpMat = Eigen::SparseMatrix<double>;

// Stiffness and mass matrices over all vertices; Dirichlet conditions are
// applied by restriction to the interior index set.
struct DiscreteOperatorPair {
  SpMat stiffness;
  SpMat mass;
  std::vector<int> interior;  // vertex ids with no boundary marker
};

inline DiscreteOperatorPair assemble(const HyperbolicMesh& mesh) {
  const int n = static_cast<int>(mesh.vertex_count());
  std::vector<Eigen::Triplet<double>> kt, mt;
  kt.reserve(mesh.triangle_count() * 9);
  mt.reserve(mesh.triangle_count() * 9);
  for (std::size_t t = 0; t < mesh.triangle_count(); ++t) {
    const TriangleGeometry& tg = mesh.geometry[t];
    const double e1x = tg.corner[1][0] - tg.corner[0][0];
    const double e1y = tg.corner[1][1] - tg.corner[0][1];
    const double e2x = tg.corner[2][0] - tg.corner[0][0];
    const double e2y = tg.corner[2][1] - tg.corner[0][1];
    const double det = e1x * e2y - e1y * e2x;
    const double detG = tg.g00 * tg.g11 - tg.g01 * tg.g01;
    if (std::abs(det) < 1e-14 || detG < 1e-14)
      throw degenerate_immersion_error("assemble: degenerate simplex " + std::to_string(t));
    const double area = 0.5 * std::abs(det);
    const double volume = area * std::sqrt(detG);
    // P1 hat gradients in local coordinates
    double gx[3], gy[3];
    gx[1] = e2y / det;
    gy[1] = -e2x / det;
    gx[2] = -e1y / det;
    gy[2] = e1x / det;
    gx[0] = -gx[1] - gx[2];
    gy[0] = -gy[1] - gy[2];
    // inverse metric
    const double i00 = tg.g11 / detG, i01 = -tg.g01 / detG, i11 = tg.g00 / detG;
    const auto& tri = mesh.triangles[t];
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        const double grad_pair = gx[a] * (i00 * gx[b] + i01 * gy[b]) +
                                 gy[a] * (i01 * gx[b] + i11 * gy[b]);
        kt.emplace_back(tri[a], tri[b], grad_pair * volume);
        mt.emplace_back(tri[a], tri[b], volume * (a == b ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  DiscreteOperatorPair out;
  out.stiffness.resize(n, n);
  out.mass.resize(n, n);
  out.stiffness.setFromTriplets(kt.begin(), kt.end());
  out.mass.setFromTriplets(mt.begin(), mt.end());
  for (int v = 0; v < n; ++v)
    if (!mesh.is_boundary[v]) out.interior.push_back(v);
  return out;
}

inline SpMat restrict_to(const SpMat& A, const std::vector<int>& keep) {
  std::vector<int> pos(A.rows(), -1);
  for (std::size_t i = 0; i < keep.size(); ++i) pos[keep[i]] = static_cast<int>(i);
  std::vector<Eigen::Triplet<double>> trips;
  for (int col = 0; col < A.outerSize(); ++col) {
    if (pos[col] < 0) continue;
    for (SpMat::InnerIterator it(A, col); it; ++it) {
      if (pos[it.row()] < 0) continue;
      trips.emplace_back(pos[it.row()], pos[col], it.value());
    }
  }
  SpMat out(keep.size(), keep.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

// ---------------------------------------------------------------------------
// Shift-invert Lanczos for the symmetric pencil K v = lambda M v.
// ---------------------------------------------------------------------------

struct EigenOptions {
  double sigma = 0.225;  // 0.9 * (m-1)^2/4 for m = 2
  double tol = 1e-9;     // relative residual ||Kv - lambda Mv|| / ||Mv||
  int max_basis = 260;
  std::uint64_t seed = 20240901;
};

struct EigenResult {
  std::vector<double> values;
  std::vector<Vec> vectors;
  std::vector<double> residuals;
  int basis_size = 0;
};

// M-orthonormal Lanczos on (K - sigma M)^{-1} M with full reorthogonalisation;
// eigenvalues recovered as sigma + 1/theta.
inline EigenResult shift_invert_lanczos(const SpMat& K, const SpMat& M, int count,
                                        const EigenOptions& opt = {}) {
  const int n = static_cast<int>(K.rows());
  if (count < 1 || count > n) throw input_error("shift_invert_lanczos: bad count");
  SpMat A = K - opt.sigma * M;
  Eigen::SimplicialLDLT<SpMat> solver(A);
  if (solver.info() != Eigen::Success)
    throw solver_error("shift_invert_lanczos: factorisation of K - sigma M failed");

  std::mt19937_64 gen(opt.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto m_dot = [&](const Vec& a, const Vec& b) { return a.dot(M * b); };

  std::vector<Vec> V;
  std::vector<double> alpha, beta;
  Vec v0(n);
  for (int i = 0; i < n; ++i) v0[i] = normal(gen);
  v0 /= std::sqrt(m_dot(v0, v0));
  V.push_back(v0);

  std::vector<double> residual_history;
  EigenResult res;
  for (int j = 0; j < opt.max_basis; ++j) {
    Vec w = solver.solve(M * V[j]);
    if (j > 0) w -= beta[j - 1] * V[j - 1];
    const double a = m_dot(w, V[j]);
    alpha.push_back(a);
    w -= a * V[j];
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& v : V) w -= m_dot(w, v) * v;
    const double b = std::sqrt(std::max(m_dot(w, w), 0.0));
    const bool breakdown = b < 1e-14;
    if (!breakdown) {
      beta.push_back(b);
      V.push_back(w / b);
    }

    const int steps = static_cast<int>(alpha.size());
    const bool check_now = breakdown || steps >= 2 * count + 8;
    if (check_now && (steps % 8 == 0 || breakdown || j + 1 == opt.max_basis)) {
      Mat T = Mat::Zero(steps, steps);
      for (int i = 0; i < steps; ++i) {
        T(i, i) = alpha[i];
        if (i + 1 < steps) T(i, i + 1) = T(i + 1, i) = beta[i];
      }
      Eigen::SelfAdjointEigenSolver<Mat> es(T);
      // largest theta correspond to the smallest pencil eigenvalues above sigma
      std::vector<int> order(steps);
      for (int i = 0; i < steps; ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](int x, int y) { return es.eigenvalues()[x] > es.eigenvalues()[y]; });
      if (steps < count) continue;
      res.values.clear();
      res.vectors.clear();
      res.residuals.clear();
      bool converged = true;
      for (int e = 0; e < count; ++e) {
        const int idx = order[e];
        const double theta = es.eigenvalues()[idx];
        if (!(theta > 0.0)) {
          converged = false;
          break;
        }
        const double lambda = opt.sigma + 1.0 / theta;
        Vec x = Vec::Zero(n);
        for (int i = 0; i < steps; ++i) x += es.eigenvectors()(i, idx) * V[i];
        const Vec rvec = K * x - lambda * (M * x);
        const double rnorm = rvec.norm() / (M * x).norm();
        res.values.push_back(lambda);
        res.vectors.push_back(std::move(x));
        res.residuals.push_back(rnorm);
        converged = converged && rnorm < opt.tol;
      }
      residual_history.push_back(res.residuals.empty() ? kInf : res.residuals.back());
      if (converged) {
        res.basis_size = steps;
        return res;
      }
      if (breakdown) break;
    }
  }
  std::string hist = "shift_invert_lanczos: not converged; residuals:";
  for (double r : residual_history) hist += " " + std::to_string(r);
  throw solver_error(hist);
}

// ---------------------------------------------------------------------------
// Dirichlet bottom with optional curvature-bound records.
// ---------------------------------------------------------------------------

struct BoundRecord {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  bool pass = false;
};

struct SpectrumReport {
  std::vector<double> eigenvalues;
  std::vector<double> residual_norms;
  double mesh_resolution = 0.0;
  std::size_t interior_vertices = 0;
  std::vector<BoundRecord> comparisons;
  bool pass = true;
};

struct DirichletOptions {
  EigenOptions eigen;
  double eps_r = -1.0;  // when >= 0, attach the 1/4 (m-1-eps)^2 bound record
  double slack = 0.0;   // discretisation slack for the bound comparison
};

inline SpectrumReport dirichlet_bottom(const HyperbolicMesh& mesh, int count,
                                       const DirichletOptions& opt = {}) {
  DiscreteOperatorPair ops = assemble(mesh);
  if (ops.interior.empty()) throw input_error("dirichlet_bottom: no interior vertices");
  if (ops.interior.size() == mesh.vertex_count())
    throw input_error("dirichlet_bottom: mesh has no Dirichlet boundary");
  const SpMat K = restrict_to(ops.stiffness, ops.interior);
  const SpMat M = restrict_to(ops.mass, ops.interior);
  EigenResult eig = shift_invert_lanczos(K, M, count, opt.eigen);
  SpectrumReport rep;
  rep.eigenvalues = eig.values;
  rep.residual_norms = eig.residuals;
  rep.mesh_resolution = mesh.resolution();
  rep.interior_vertices = ops.interior.size();
  if (opt.eps_r >= 0.0) {
    BoundRecord rec;
    const double m = mesh.m;
    rec.name = "quarter_square_bound";
    rec.lhs = eig.values.front();
    rec.rhs = 0.25 * sq(std::max(m - 1.0 - opt.eps_r, 0.0)) - opt.slack;
    rec.pass = rec.lhs >= rec.rhs;
    rep.comparisons.push_back(rec);
    rep.pass = rec.pass;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Pointwise radial-Laplacian error of f(r) on a meshed surface.
// ---------------------------------------------------------------------------

struct RadialErrorRow {
  double r = 0.0;
  double error = 0.0;   // |E(x)|
  double bound = 0.0;   // |f''(r)| + |f'(r)|
  double ratio = 0.0;
};

// E(x) = -Delta_h f - (f'' + (m-1) coth(r) f') at interior vertices whose full
// 1-ring is interior; the discrete Laplacian uses the lumped mass matrix.
inline std::vector<RadialErrorRow> radial_laplacian_error(const HyperbolicMesh& mesh,
                                                          const RadialProfile& f,
                                                          double r_lo = 0.0,
                                                          double r_hi = kInf) {
  DiscreteOperatorPair ops = assemble(mesh);
  const int n = static_cast<int>(mesh.vertex_count());
  Vec fvals(n);
  for (int v = 0; v < n; ++v) fvals[v] = f(std::max(mesh.vertex_radius[v], 1e-12)).f.real();
  const Vec Kf = ops.stiffness * fvals;
  const Vec lumped = ops.mass * Vec::Ones(n);
  // vertices adjacent to the boundary see a truncated stencil
  std::vector<char> near_boundary(n, 0);
  for (const auto& tri : mesh.triangles) {
    const bool touches = mesh.is_boundary[tri[0]] || mesh.is_boundary[tri[1]] ||
                         mesh.is_boundary[tri[2]];
    if (touches)
      for (int v : tri) near_boundary[v] = 1;
  }
  std::vector<RadialErrorRow> rows;
  for (int v = 0; v < n; ++v) {
    if (near_boundary[v]) continue;
    const double r = mesh.vertex_radius[v];
    if (r < r_lo || r > r_hi || r < 1e-6) continue;
    const RadialValue rv = f(r);
    const double model = rv.d2.real() + (mesh.m - 1.0) / std::tanh(r) * rv.d1.real();
    const double discrete = -(Kf[v] / lumped[v]);  // approximates f'' + (m-1) coth f'
    RadialErrorRow row;
    row.r = r;
    row.error = std::abs(discrete - model);
    row.bound = std::abs(rv.d2.real()) + std::abs(rv.d1.real());
    row.ratio = row.error / std::max(row.bound, 1e-300);
    rows.push_back(row);
  }
  return rows;
}

// Sup of the normalised ratio over radius bands.
inline std::vector<double> band_sup_ratio(const std::vector<RadialErrorRow>& rows,
                                          const std::vector<std::pair<double, double>>& bands) {
  std::vector<double> out(bands.size(), 0.0);
  for (const RadialErrorRow& row : rows)
    for (std::size_t b = 0; b < bands.size(); ++b)
      if (row.r >= bands[b].first && row.r <= bands[b].second)
        out[b] = std::max(out[b], row.ratio);
  return out;
}

// ---------------------------------------------------------------------------
// Discrete Weyl residuals of windowed radial test functions on a meshed
// surface.
// ---------------------------------------------------------------------------

struct SigmaWeylRow {
  int k = 0;
  double R = 0.0;
  double residual = 0.0;
  double norm = 0.0;
  double ratio = 0.0;
  double bound = 0.0;  // (3 eps_k + 24 C* eps^2)(1+eps)/(1-eps)
  bool pass = false;
};

struct SigmaWeylReport {
  std::vector<SigmaWeylRow> rows;
  bool ratios_decreasing = false;
  bool all_pass = false;
};

struct SigmaWeylInputs {
  double eps_hat = 0.0;   // measured geometric deviation (radial error + volume)
  double c_star = 0.0;    // derivative-bound constant from the window sweep
  double sigma_frac = 0.0;  // mollification width as a fraction of R
};

inline SigmaWeylReport sigma_weyl_residual(const HyperbolicMesh& mesh, double lambda,
                                           const std::vector<double>& R_sequence,
                                           const SigmaWeylInputs& in) {
  for (std::size_t i = 1; i < R_sequence.size(); ++i)
    if (!(R_sequence[i] > 2.0 * R_sequence[i - 1]))
      throw input_error("sigma_weyl_residual: sequence must double");
  DiscreteOperatorPair ops = assemble(mesh);
  Eigen::SimplicialLDLT<SpMat> mass_solver(ops.mass);
  if (mass_solver.info() != Eigen::Success)
    throw solver_error("sigma_weyl_residual: mass factorisation failed");
  const int n = static_cast<int>(mesh.vertex_count());

  SigmaWeylReport rep;
  rep.ratios_decreasing = true;
  rep.all_pass = true;
  double prev_ratio = kInf;
  for (std::size_t k = 0; k < R_sequence.size(); ++k) {
    const double R = R_sequence[k];
    RadialProfile u = upsilon_profile(mesh.m, lambda, R);
    if (in.sigma_frac > 0.0) u = mollify(u, in.sigma_frac * R);
    const double mesh_rmax =
        mesh.vertex_radius.empty()
            ? 0.0
            : *std::max_element(mesh.vertex_radius.begin(), mesh.vertex_radius.end());
    if (u.support_hi > mesh_rmax)
      throw precondition_error("sigma_weyl_residual: window exceeds the meshed radius");
    Vec fre(n), fim(n);
    for (int v = 0; v < n; ++v) {
      const RadialValue rv = u(std::max(mesh.vertex_radius[v], 1e-12));
      fre[v] = rv.f.real();
      fim[v] = rv.f.imag();
    }
    // residual = || M^{-1} K f - lambda f ||_M^2, complex parts separately
    double residual = 0.0, norm = 0.0;
    for (const Vec* f : {&fre, &fim}) {
      const Vec y = ops.stiffness * (*f) - lambda * (ops.mass * (*f));
      const Vec g = mass_solver.solve(y);
      residual += g.dot(y);
      norm += f->dot(ops.mass * (*f));
    }
    SigmaWeylRow row;
    row.k = static_cast<int>(k);
    row.R = R;
    row.residual = residual;
    row.norm = norm;
    row.ratio = residual / norm;
    const double eps_k = 4.0 * epsilon_R(mesh.m, lambda, R);
    const double e = in.eps_hat;
    row.bound = (3.0 * eps_k + 24.0 * in.c_star * e * e) * (1.0 + e) / std::max(1.0 - e, 1e-6);
    row.pass = row.ratio <= row.bound;
    rep.ratios_decreasing = rep.ratios_decreasing && row.ratio < prev_ratio;
    prev_ratio = row.ratio;
    rep.all_pass = rep.all_pass && row.pass;
    rep.rows.push_back(row);
  }
  rep.all_pass = rep.all_pass && rep.ratios_decreasing;
  return rep;
}

}  // namespace hypspec
