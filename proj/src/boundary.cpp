#include "diraclab/boundary.hpp"

#include <cmath>
#include <limits>

#include "json.hpp"

namespace diraclab {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_frame(const TriMesh& mesh) {
  if (mesh.boundary_loops.empty())
    throw Error(ErrorCode::MissingFrame, "closed mesh has no boundary frame");
  if (!mesh.frame)
    throw Error(ErrorCode::MissingFrame, "mesh carries no boundary frame (attach one first)");
}

std::vector<ImVec> flat_frame(const std::vector<std::vector<ImVec>>& per_loop) {
  std::vector<ImVec> out;
  for (const auto& loop : per_loop) out.insert(out.end(), loop.begin(), loop.end());
  return out;
}

void require_bc_size(const TriMesh& mesh, const BoundaryCondition& bc) {
  if (static_cast<int>(bc.V.size()) != mesh.n_boundary_vertices() || bc.V.size() != bc.Vt.size())
    throw Error(ErrorCode::ConfigError, "boundary condition length does not match boundary");
}

// signed solid angle of the spherical triangle (a, b, c)
double solid_angle(const ImVec& a, const ImVec& b, const ImVec& c) {
  double num = dot(a, cross(b, c));
  double den = 1.0 + dot(a, b) + dot(b, c) + dot(c, a);
  return 2.0 * std::atan2(num, den);
}

}  // namespace

BoundaryCondition BCFamily::at(double tq) const {
  if (t.empty()) throw Error(ErrorCode::ConfigError, "empty family");
  if (tq <= t.front()) return samples.front();
  if (tq >= t.back()) return samples.back();
  size_t hi = 1;
  while (hi < t.size() && t[hi] < tq) ++hi;
  double tau = (tq - t[hi - 1]) / (t[hi] - t[hi - 1]);
  const BoundaryCondition& a = samples[hi - 1];
  const BoundaryCondition& b = samples[hi];
  BoundaryCondition out;
  out.V.reserve(a.V.size());
  out.Vt.reserve(a.Vt.size());
  for (size_t k = 0; k < a.V.size(); ++k) {
    out.V.push_back(slerp(a.V[k], b.V[k], tau));
    out.Vt.push_back(slerp(a.Vt[k], b.Vt[k], tau));
  }
  return out;
}

BoundaryCondition canonical_bc(const TriMesh& mesh, FrameField kind,
                               const std::vector<UnitImVec>& Vt) {
  require_frame(mesh);
  const auto& frame = *mesh.frame;
  std::vector<ImVec> field = flat_frame(kind == FrameField::T   ? frame.T
                                        : kind == FrameField::N ? frame.N
                                                                : frame.B);
  if (Vt.size() != field.size())
    throw Error(ErrorCode::ConfigError, "Vt length does not match boundary");
  BoundaryCondition bc;
  for (size_t k = 0; k < field.size(); ++k) {
    bc.V.push_back(UnitImVec::from(field[k]));
    bc.Vt.push_back(Vt[k]);
  }
  return bc;
}

BoundaryCondition canonical_bc(const TriMesh& mesh, FrameField kind, const UnitImVec& Vt_const) {
  require_frame(mesh);
  std::vector<UnitImVec> Vt(mesh.n_boundary_vertices(), Vt_const);
  return canonical_bc(mesh, kind, Vt);
}

CertificationResult check_elliptic(const TriMesh& mesh, const BoundaryCondition& bc, double tol) {
  require_frame(mesh);
  require_bc_size(mesh, bc);
  std::vector<ImVec> N = flat_frame(mesh.frame->N);
  double margin = std::numeric_limits<double>::infinity();
  for (size_t k = 0; k < bc.V.size(); ++k) {
    double d = std::min((bc.V[k].v - N[k]).norm(), (bc.V[k].v + N[k]).norm());
    margin = std::min(margin, d);
  }
  return {margin > tol, margin};
}

CertificationResult check_selfadjoint(const TriMesh& mesh, const BoundaryCondition& bc,
                                      double tol) {
  require_frame(mesh);
  require_bc_size(mesh, bc);
  std::vector<ImVec> T = flat_frame(mesh.frame->T);
  double defect = 0;
  for (size_t k = 0; k < bc.V.size(); ++k)
    defect = std::max(defect, std::abs(dot(bc.V[k].v, T[k])));
  return {defect < tol, defect};
}

BoundaryCondition adjoint_bc(const TriMesh& mesh, const BoundaryCondition& bc) {
  require_frame(mesh);
  require_bc_size(mesh, bc);
  std::vector<ImVec> T = flat_frame(mesh.frame->T);
  BoundaryCondition out;
  out.Vt = bc.Vt;
  for (size_t k = 0; k < bc.V.size(); ++k) {
    Quat t = T[k].quat();
    Quat v = (t * bc.V[k].quat() * qinv(t)) * (-1.0);
    out.V.push_back(UnitImVec::from(im(v)));
  }
  return out;
}

int deg_V(const TriMesh& mesh, const BoundaryCondition& bc, double elliptic_tol) {
  require_frame(mesh);
  require_bc_size(mesh, bc);
  CertificationResult ell = check_elliptic(mesh, bc, elliptic_tol);
  if (!ell.ok)
    throw Error(ErrorCode::NotElliptic,
                "deg_V needs an elliptic condition, margin " + std::to_string(ell.value));
  if (mesh.boundary_loops.size() != 1)
    throw Error(ErrorCode::WrongMesh, "deg_V expects a single boundary loop");
  std::vector<ImVec> T = flat_frame(mesh.frame->T);
  std::vector<ImVec> B = flat_frame(mesh.frame->B);
  size_t n = bc.V.size();
  double total = 0;
  for (size_t k = 0; k < n; ++k) {
    size_t k1 = (k + 1) % n;
    double a0 = std::atan2(dot(bc.V[k].v, B[k]), dot(bc.V[k].v, T[k]));
    double a1 = std::atan2(dot(bc.V[k1].v, B[k1]), dot(bc.V[k1].v, T[k1]));
    double inc = a1 - a0;
    while (inc > kPi) inc -= 2 * kPi;
    while (inc < -kPi) inc += 2 * kPi;
    if (std::abs(inc) >= kPi / 2)
      throw Error(ErrorCode::InsufficientResolution,
                  "winding angle step >= pi/2 between boundary samples");
    total += inc;
  }
  double deg = total / (2 * kPi);
  long nearest = std::lround(deg);
  if (std::abs(deg - nearest) > 1e-6)
    throw Error(ErrorCode::InsufficientResolution, "winding sum is not an integer multiple");
  return static_cast<int>(nearest);
}

int deg_torus(const TriMesh& mesh, const BCFamily& family, bool use_Vt) {
  if (!family.closed) throw Error(ErrorCode::FamilyNotClosed, "deg_torus needs a closed family");
  if (family.samples.empty()) throw Error(ErrorCode::ConfigError, "empty family");
  if (mesh.boundary_loops.size() != 1)
    throw Error(ErrorCode::WrongMesh, "deg_torus expects a single boundary loop");

  size_t ns = family.samples[0].V.size();
  size_t nt = family.samples.size() - 1;  // the last sample repeats the first
  std::vector<std::vector<ImVec>> grid(nt, std::vector<ImVec>(ns));
  for (size_t a = 0; a < nt; ++a)
    for (size_t b = 0; b < ns; ++b)
      grid[a][b] = use_Vt ? family.samples[a].Vt[b].v : family.samples[a].V[b].v;

  for (int round = 0; round < 7; ++round) {
    size_t NT = grid.size(), NS = grid[0].size();
    double max_edge = 0;
    for (size_t a = 0; a < NT; ++a) {
      for (size_t b = 0; b < NS; ++b) {
        const ImVec& p = grid[a][b];
        max_edge = std::max(max_edge,
                            std::acos(std::clamp(dot(p, grid[(a + 1) % NT][b]), -1.0, 1.0)));
        max_edge = std::max(max_edge,
                            std::acos(std::clamp(dot(p, grid[a][(b + 1) % NS]), -1.0, 1.0)));
      }
    }
    if (max_edge < kPi / 2) {
      double omega = 0;
      for (size_t a = 0; a < NT; ++a) {
        for (size_t b = 0; b < NS; ++b) {
          const ImVec& p00 = grid[a][b];
          const ImVec& p10 = grid[(a + 1) % NT][b];
          const ImVec& p11 = grid[(a + 1) % NT][(b + 1) % NS];
          const ImVec& p01 = grid[a][(b + 1) % NS];
          omega += solid_angle(p00, p10, p11);
          omega += solid_angle(p00, p11, p01);
        }
      }
      double deg = omega / (4 * kPi);
      long nearest = std::lround(deg);
      if (std::abs(deg - nearest) < 0.01) return static_cast<int>(nearest);
    }
    // spherical midpoint refinement in both grid directions
    auto mid = [](const ImVec& a, const ImVec& b) {
      ImVec m = a + b;
      if (m.norm() < 1e-12)
        throw Error(ErrorCode::InsufficientResolution, "antipodal grid neighbors");
      return normalized(m);
    };
    std::vector<std::vector<ImVec>> fine(2 * NT, std::vector<ImVec>(2 * NS));
    for (size_t a = 0; a < NT; ++a) {
      for (size_t b = 0; b < NS; ++b) {
        const ImVec& p00 = grid[a][b];
        const ImVec& p10 = grid[(a + 1) % NT][b];
        const ImVec& p01 = grid[a][(b + 1) % NS];
        const ImVec& p11 = grid[(a + 1) % NT][(b + 1) % NS];
        fine[2 * a][2 * b] = p00;
        fine[2 * a + 1][2 * b] = mid(p00, p10);
        fine[2 * a][2 * b + 1] = mid(p00, p01);
        fine[2 * a + 1][2 * b + 1] = mid(mid(p00, p11), mid(p10, p01));
      }
    }
    grid = std::move(fine);
  }
  throw Error(ErrorCode::InsufficientResolution, "torus degree did not stabilize");
}

BCFamily family_bcproof(const TriMesh& mesh, int steps, bool rotated) {
  if (mesh.tag.rfind("hemisphere", 0) != 0)
    throw Error(ErrorCode::WrongMesh, "family is defined on the hemisphere generator");
  require_frame(mesh);
  if (steps < 8) throw Error(ErrorCode::ConfigError, "family needs steps >= 8");
  size_t ns = mesh.boundary_loops[0].size();

  BCFamily fam;
  for (int kstep = 0; kstep <= steps; ++kstep) {
    double t = 2.0 * kPi * kstep / steps;
    BoundaryCondition bc;
    for (size_t m = 0; m < ns; ++m) {
      double s = 2.0 * kPi * m / ns;
      ImVec vt{-std::cos(t / 2), std::sin(t / 2) * std::cos(s), -std::sin(t / 2) * std::sin(s)};
      if (rotated) {
        Quat rot{std::cos(t / 4), 0, 0, std::sin(t / 4)};  // e^{k t/4}
        vt = im(rot * vt.quat() * qconj(rot));
      }
      bc.V.push_back(UnitImVec({1, 0, 0}));
      bc.Vt.push_back(UnitImVec::from(vt));
    }
    fam.t.push_back(t);
    fam.samples.push_back(std::move(bc));
  }
  double closure = 0;
  for (size_t m = 0; m < ns; ++m)
    closure = std::max(closure, (fam.samples.front().Vt[m].v - fam.samples.back().Vt[m].v).norm());
  fam.closed = closure < 1e-10;
  return fam;
}

ConstraintBasis constraint_basis(const TriMesh& mesh, const BoundaryCondition& bc) {
  require_bc_size(mesh, bc);
  const int n = mesh.n_vertices();
  auto bmask = mesh.boundary_mask();
  std::vector<int> bindex(n, -1);
  {
    auto bverts = mesh.boundary_vertices();
    for (size_t k = 0; k < bverts.size(); ++k) bindex[bverts[k]] = static_cast<int>(k);
  }
  ConstraintBasis basis;
  basis.n_boundary = mesh.n_boundary_vertices();
  basis.n_interior = n - basis.n_boundary;
  std::vector<Eigen::Triplet<double>> trip;
  int col = 0;
  for (int v = 0; v < n; ++v) {
    if (!bmask[v]) {
      for (int r = 0; r < 4; ++r) trip.emplace_back(4 * v + r, col + r, 1.0);
      col += 4;
    } else {
      auto [b1, b2] = plane_basis(bc.V[bindex[v]], bc.Vt[bindex[v]]);
      Eigen::Vector4d c1 = b1.coeffs(), c2 = b2.coeffs();
      for (int r = 0; r < 4; ++r) {
        if (c1[r] != 0.0) trip.emplace_back(4 * v + r, col, c1[r]);
        if (c2[r] != 0.0) trip.emplace_back(4 * v + r, col + 1, c2[r]);
      }
      col += 2;
    }
  }
  basis.P.resize(4 * n, col);
  basis.P.setFromTriplets(trip.begin(), trip.end());
  return basis;
}

ConstraintBasis constraint_basis_closed(const TriMesh& mesh) {
  if (!mesh.boundary_loops.empty())
    throw Error(ErrorCode::ConfigError, "mesh has a boundary; supply a boundary condition");
  ConstraintBasis basis;
  basis.n_interior = mesh.n_vertices();
  basis.P.resize(4 * basis.n_interior, 4 * basis.n_interior);
  basis.P.setIdentity();
  return basis;
}

BoundaryCondition bc_from_json(const TriMesh& mesh, const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::ConfigError, "malformed boundary condition JSON");
  auto kind = j.value("kind", std::string());
  auto parse_unit = [](const nlohmann::json& arr) {
    if (!arr.is_array() || arr.size() != 3)
      throw Error(ErrorCode::ConfigError, "expected [x,y,z]");
    return UnitImVec::from({arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()});
  };
  if (kind == "fields") {
    BoundaryCondition bc;
    for (const auto& v : j.at("V")) bc.V.push_back(parse_unit(v));
    for (const auto& v : j.at("Vt")) bc.Vt.push_back(parse_unit(v));
    require_bc_size(mesh, bc);
    return bc;
  }
  if (kind == "canonical") {
    std::string f = j.at("V").get<std::string>();
    if (f != "T" && f != "N" && f != "B")
      throw Error(ErrorCode::ConfigError, "canonical V must be T, N or B");
    FrameField field = f == "T" ? FrameField::T : f == "N" ? FrameField::N : FrameField::B;
    const auto& vt = j.at("Vt");
    if (vt.contains("constant")) return canonical_bc(mesh, field, parse_unit(vt["constant"]));
    std::vector<UnitImVec> per;
    for (const auto& v : vt.at("per_vertex")) per.push_back(parse_unit(v));
    return canonical_bc(mesh, field, per);
  }
  throw Error(ErrorCode::ConfigError, "unknown boundary condition kind '" + kind + "'");
}

std::string bc_to_json(const BoundaryCondition& bc) {
  nlohmann::json j;
  j["kind"] = "fields";
  j["loop"] = 0;
  auto dump = [](const std::vector<UnitImVec>& f) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& u : f) arr.push_back({u.v.x, u.v.y, u.v.z});
    return arr;
  };
  j["V"] = dump(bc.V);
  j["Vt"] = dump(bc.Vt);
  return j.dump(2);
}

}  // namespace diraclab
