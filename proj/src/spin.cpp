#include "diraclab/spin.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <map>

namespace diraclab {

namespace {

Quat edge_target(const ImVec& e, const Quat& lp, const Quat& lq) {
  // exact integral of conj(lambda) e lambda for lambda linear along the edge
  Quat eq = e.quat();
  Quat t = qconj(lp) * eq * lp * (1.0 / 3.0);
  t = t + (qconj(lp) * eq * lq + qconj(lq) * eq * lp) * (1.0 / 6.0);
  t = t + qconj(lq) * eq * lq * (1.0 / 3.0);
  return t;
}

}  // namespace

DeformationResult spin_transform(const TriMesh& mesh, const SpinorField& lambda, int fix) {
  const int n = mesh.n_vertices();
  if (static_cast<int>(lambda.size()) != n)
    throw Error(ErrorCode::ConfigError, "spinor length does not match mesh");
  if (fix < 0 || fix >= n) throw Error(ErrorCode::ConfigError, "fix vertex out of range");

  std::vector<double> mags(n);
  for (int v = 0; v < n; ++v) mags[v] = lambda[v].norm();
  std::vector<double> sorted = mags;
  std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
  double median = sorted[n / 2];
  if (median < 1e-300) throw Error(ErrorCode::AllZeroSpinor, "spinor vanishes almost everywhere");

  DeformationResult out;
  out.branch_tol = 1e-6 * median;
  for (int v = 0; v < n; ++v)
    if (mags[v] < out.branch_tol) out.branch_vertices.push_back(v);

  // cotangent edge weights, clamped below
  std::map<std::pair<int, int>, double> weight;
  std::map<std::pair<int, int>, Quat> target;
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& t = mesh.faces[f];
    ImVec p[3] = {mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]};
    double two_area = cross(p[1] - p[0], p[2] - p[0]).norm();
    for (int c = 0; c < 3; ++c) {
      int a = t[(c + 1) % 3], b = t[(c + 2) % 3];
      ImVec ca = p[(c + 1) % 3] - p[c], cb = p[(c + 2) % 3] - p[c];
      double cot = dot(ca, cb) / two_area;
      weight[std::minmax(a, b)] += 0.5 * cot;
    }
  }
  for (auto& [key, w] : weight) {
    w = std::max(w, 1e-3);
    ImVec e = mesh.positions[key.second] - mesh.positions[key.first];
    target[key] = edge_target(e, lambda[key.first], lambda[key.second]);
  }

  // closure residual: oriented sum of edge targets around each face
  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& t = mesh.faces[f];
    Quat sum{0, 0, 0, 0};
    for (int c = 0; c < 3; ++c) {
      int a = t[c], b = t[(c + 1) % 3];
      auto key = std::minmax(a, b);
      Quat e = target[key];
      sum = sum + (a < b ? e : -e);
    }
    out.closure_residual = std::max(out.closure_residual, sum.norm());
  }

  // least squares: L f~ = rhs with the fixed vertex removed
  std::vector<int> col(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (v != fix) col[v] = m++;
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(m, 3);
  for (const auto& [key, w] : weight) {
    auto [a, b] = key;
    const Quat& e = target[key];
    Eigen::Vector3d ev(e.x, e.y, e.z);
    if (col[a] >= 0) {
      trip.emplace_back(col[a], col[a], w);
      rhs.row(col[a]) -= w * ev.transpose();
    }
    if (col[b] >= 0) {
      trip.emplace_back(col[b], col[b], w);
      rhs.row(col[b]) += w * ev.transpose();
    }
    if (col[a] >= 0 && col[b] >= 0) {
      trip.emplace_back(col[a], col[b], -w);
      trip.emplace_back(col[b], col[a], -w);
    }
  }
  Eigen::SparseMatrix<double> L(m, m);
  L.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(L);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::SolverFailure, "least-squares integration factorization failed");
  Eigen::MatrixXd sol = solver.solve(rhs);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::SolverFailure, "least-squares integration solve failed");

  out.mesh = mesh;
  out.mesh.tag = mesh.tag + ":deformed";
  out.mesh.frame.reset();
  for (int v = 0; v < n; ++v) {
    if (v == fix)
      out.mesh.positions[v] = {0, 0, 0};
    else
      out.mesh.positions[v] = {sol(col[v], 0), sol(col[v], 1), sol(col[v], 2)};
  }
  out.closure_residual_rel = out.closure_residual / std::max(out.mesh.bbox_diameter(), 1e-300);
  return out;
}

McDensityReport verify_mc_density(const TriMesh& original, const DeformationResult& result,
                                  double rho, const std::vector<int>& exclude) {
  MeanCurvatureReport before = mean_curvature_halfdensity(original);
  MeanCurvatureReport after = mean_curvature_halfdensity(result.mesh);
  auto bnd = original.boundary_mask();
  std::vector<bool> skip(original.positions.size(), false);
  for (int v : exclude) skip[v] = true;
  for (int v : result.branch_vertices) skip[v] = true;

  McDensityReport rep;
  double scale = 0;
  for (size_t p = 0; p < before.H.size(); ++p) {
    if (bnd[p] || skip[p]) continue;
    double predicted = (before.H[p] + rho) * std::sqrt(before.area[p]);
    scale = std::max(scale, std::abs(predicted));
  }
  for (size_t p = 0; p < before.H.size(); ++p) {
    if (bnd[p] || skip[p]) continue;
    double predicted = (before.H[p] + rho) * std::sqrt(before.area[p]);
    double err = std::abs(after.half_density[p] - predicted);
    rep.max_abs_error = std::max(rep.max_abs_error, err);
    if (scale > 0) rep.max_rel_error = std::max(rep.max_rel_error, err / scale);
    rep.max_interior_H_new = std::max(rep.max_interior_H_new, std::abs(after.H[p]));
  }
  return rep;
}

TriMesh double_reflect(const TriMesh& disc, double planar_tol_rel) {
  if (disc.boundary_loops.size() != 1)
    throw Error(ErrorCode::WrongMesh, "doubling expects a single boundary loop");
  const auto& loop = disc.boundary_loops[0];
  double diam = disc.bbox_diameter();

  double mean = 0;
  for (int v : loop) mean += disc.positions[v].x;
  mean /= loop.size();
  for (int v : loop)
    if (std::abs(disc.positions[v].x - mean) > planar_tol_rel * diam)
      throw Error(ErrorCode::BoundaryNotPlanar,
                  "boundary is not contained in a plane perpendicular to the i-axis");

  const int n = disc.n_vertices();
  std::vector<bool> on_boundary(n, false);
  for (int v : loop) on_boundary[v] = true;

  TriMesh out;
  out.tag = disc.tag + ":doubled";
  out.positions = disc.positions;
  for (int v : loop) out.positions[v].x = mean;  // weld exactly onto the plane
  std::vector<int> mirror(n);
  for (int v = 0; v < n; ++v) {
    if (on_boundary[v]) {
      mirror[v] = v;
    } else {
      mirror[v] = static_cast<int>(out.positions.size());
      ImVec p = out.positions[v];
      out.positions.push_back({2 * mean - p.x, p.y, p.z});
    }
  }
  out.faces = disc.faces;
  for (const auto& f : disc.faces)
    out.faces.push_back({mirror[f[0]], mirror[f[2]], mirror[f[1]]});
  out.boundary_loops = boundary_loops(out.positions, out.faces);
  if (!out.boundary_loops.empty())
    throw Error(ErrorCode::WeldFailure, "doubled mesh still has boundary");
  return out;
}

SphereTable dirac_sphere_table(const TriMesh& sphere, const std::vector<double>& mu_values,
                               double cluster_tol) {
  if (!sphere.closed() || sphere.rotation_perm.empty())
    throw Error(ErrorCode::WrongMesh, "table needs a closed rotationally symmetric sphere mesh");
  DiracSystem sys = assemble(sphere);
  ConstraintBasis basis = constraint_basis_closed(sphere);

  SphereTable table;
  for (double mu : mu_values) {
    Spectrum spec = eigen_constrained(sys, basis,
                                      EigenRequest::window(mu - 0.5, mu + 0.5));
    ModeReport modes = fourier_decompose(sys, spec, mu, cluster_tol);
    table.mode_counts.push_back(static_cast<int>(modes.modes.size()));
    double center = 0;
    for (double v : spec.eigenvalues)
      if (std::abs(v - mu) <= cluster_tol) center = v;
    for (size_t m = 0; m < modes.modes.size(); ++m) {
      SphereTableEntry entry;
      entry.mu = mu;
      entry.mu_found = center;
      entry.mode = modes.modes[m];
      entry.lambda = vector_to_spinor(modes.representatives.col(m));
      entry.deformation = spin_transform(sphere, entry.lambda, 0);
      table.entries.push_back(std::move(entry));
    }
  }
  return table;
}

}  // namespace diraclab
