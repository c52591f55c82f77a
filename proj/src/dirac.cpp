#include "diraclab/dirac.hpp"

#include <cmath>

namespace diraclab {

Eigen::VectorXd spinor_to_vector(const SpinorField& lambda) {
  Eigen::VectorXd v(4 * lambda.size());
  for (size_t p = 0; p < lambda.size(); ++p) v.segment<4>(4 * p) = lambda[p].coeffs();
  return v;
}

SpinorField vector_to_spinor(const Eigen::VectorXd& v) {
  SpinorField lambda(v.size() / 4);
  for (size_t p = 0; p < lambda.size(); ++p) lambda[p] = Quat::from_coeffs(v.segment<4>(4 * p));
  return lambda;
}

DiracSystem assemble(const TriMesh& mesh, const Potential& rho) {
  const int n = mesh.n_vertices();
  const double scale = mesh.bbox_diameter();
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(mesh.n_faces() * 9 * 16);
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(4 * n);

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& t = mesh.faces[f];
    const ImVec f0 = mesh.positions[t[0]], f1 = mesh.positions[t[1]], f2 = mesh.positions[t[2]];
    // opposite edges; e2 = -(e0 + e1) keeps the per-face edge sum at exact zero
    ImVec e[3];
    e[0] = f2 - f1;
    e[1] = f0 - f2;
    e[2] = -(e[0] + e[1]);
    double area = 0.5 * cross(e[1], e[2]).norm();
    if (area <= 1e-14 * scale * scale)
      throw Error(ErrorCode::DegenerateFace, "degenerate face " + std::to_string(f));

    Eigen::Matrix4d block[3];
    for (int j = 0; j < 3; ++j) block[j] = -(1.0 / 6.0) * left_mul_matrix(e[j].quat());

    double rho_f = rho.at(f);
    for (int a = 0; a < 3; ++a) {
      for (int j = 0; j < 3; ++j) {
        const Eigen::Matrix4d& b = block[j];
        for (int r = 0; r < 4; ++r)
          for (int c = 0; c < 4; ++c)
            if (b(r, c) != 0.0) trip.emplace_back(4 * t[a] + r, 4 * t[j] + c, b(r, c));
      }
      if (rho_f != 0.0) {
        double lump = rho_f * area / 3.0;
        for (int r = 0; r < 4; ++r) trip.emplace_back(4 * t[a] + r, 4 * t[a] + r, -lump);
      }
      for (int r = 0; r < 4; ++r) mass[4 * t[a] + r] += area / 3.0;
    }
  }

  DiracSystem sys;
  sys.K.resize(4 * n, 4 * n);
  sys.K.setFromTriplets(trip.begin(), trip.end());
  sys.mass = std::move(mass);
  sys.mesh = &mesh;
  sys.rho = rho;
  return sys;
}

SpinorField apply(const DiracSystem& sys, const SpinorField& lambda) {
  if (static_cast<int>(lambda.size()) * 4 != sys.dof())
    throw Error(ErrorCode::ConfigError, "spinor length does not match system");
  Eigen::VectorXd y = sys.K * spinor_to_vector(lambda);
  y.array() /= sys.mass.array();
  return vector_to_spinor(y);
}

Eigen::Matrix4d symbol(const TriMesh& mesh, int face, double xi_u, double xi_v) {
  const auto& t = mesh.faces[face];
  const ImVec u = mesh.positions[t[1]] - mesh.positions[t[0]];
  const ImVec v = mesh.positions[t[2]] - mesh.positions[t[0]];
  double two_area = cross(u, v).norm();
  if (two_area <= 2e-14 * mesh.bbox_diameter() * mesh.bbox_diameter())
    throw Error(ErrorCode::DegenerateFace, "degenerate face " + std::to_string(face));
  // df ^ xi = (u xi_v - v xi_u) du ^ dv, |df|^2 = 2A du ^ dv
  ImVec q = (u * xi_v - v * xi_u) / (-two_area);
  return left_mul_matrix(q.quat());
}

double symbol_metric(const TriMesh& mesh, int face, double xi_u, double xi_v,
                     double eta_u, double eta_v) {
  const auto& t = mesh.faces[face];
  const ImVec u = mesh.positions[t[1]] - mesh.positions[t[0]];
  const ImVec v = mesh.positions[t[2]] - mesh.positions[t[0]];
  double guu = dot(u, u), guv = dot(u, v), gvv = dot(v, v);
  double det = guu * gvv - guv * guv;
  // inverse metric on covectors
  return (gvv * xi_u * eta_u - guv * (xi_u * eta_v + xi_v * eta_u) + guu * xi_v * eta_v) / det;
}

MeanCurvatureReport mean_curvature_halfdensity(const TriMesh& mesh) {
  const int n = mesh.n_vertices();
  const double scale = mesh.bbox_diameter();
  MeanCurvatureReport rep;
  std::vector<ImVec> cot_sum(n, ImVec{0, 0, 0});
  std::vector<ImVec> vnormal(n, ImVec{0, 0, 0});
  // Mixed Voronoi cell areas (obtuse triangles clamped); the barycentric area
  // over-weights irregular vertices and would bias |H| there.
  std::vector<double> mixed(n, 0.0);

  for (int f = 0; f < mesh.n_faces(); ++f) {
    const auto& t = mesh.faces[f];
    ImVec p[3] = {mesh.positions[t[0]], mesh.positions[t[1]], mesh.positions[t[2]]};
    ImVec nvec = cross(p[1] - p[0], p[2] - p[0]);
    double two_area = nvec.norm();
    if (two_area <= 2e-14 * scale * scale)
      throw Error(ErrorCode::DegenerateFace, "degenerate face in curvature computation");
    double area = 0.5 * two_area;
    for (int v : t) vnormal[v] = vnormal[v] + nvec * 0.5;

    double cot[3], edge2[3];  // cot at corner c; squared length of the opposite edge
    bool obtuse = false;
    int obtuse_at = -1;
    for (int c = 0; c < 3; ++c) {
      ImVec ca = p[(c + 1) % 3] - p[c], cb = p[(c + 2) % 3] - p[c];
      cot[c] = dot(ca, cb) / two_area;
      edge2[c] = (p[(c + 1) % 3] - p[(c + 2) % 3]).norm2();
      if (cot[c] < 0) {
        obtuse = true;
        obtuse_at = c;
      }
    }
    for (int c = 0; c < 3; ++c) {
      int a = t[(c + 1) % 3], b = t[(c + 2) % 3];
      ImVec diff = (p[(c + 1) % 3] - p[(c + 2) % 3]) * (0.5 * cot[c]);
      cot_sum[a] = cot_sum[a] + diff;
      cot_sum[b] = cot_sum[b] - diff;
      if (!obtuse) {
        mixed[t[c]] += (edge2[(c + 1) % 3] * cot[(c + 1) % 3] +
                        edge2[(c + 2) % 3] * cot[(c + 2) % 3]) / 8.0;
      } else {
        mixed[t[c]] += (c == obtuse_at) ? area / 2.0 : area / 4.0;
      }
    }
  }

  rep.area = std::move(mixed);
  rep.H.resize(n);
  rep.half_density.resize(n);
  for (int p = 0; p < n; ++p) {
    ImVec hvec = cot_sum[p] / (2.0 * rep.area[p]);
    double h = hvec.norm();
    if (dot(hvec, vnormal[p]) < 0) h = -h;
    rep.H[p] = h;
    rep.half_density[p] = h * std::sqrt(rep.area[p]);
  }
  return rep;
}

}  // namespace diraclab
