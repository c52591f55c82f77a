#pragma once

#include <Eigen/Sparse>
#include <string>
#include <vector>

#include "diraclab/mesh.hpp"
#include "diraclab/quat.hpp"

namespace diraclab {

/// Local boundary condition: per boundary vertex (loop order) the unit
/// imaginary pair (V, Vt) defining the admissible plane E' = {Vl = l Vt}.
struct BoundaryCondition {
  std::vector<UnitImVec> V, Vt;  // flat, aligned with TriMesh::boundary_vertices()
};

/// 1-parameter family of boundary conditions sampled at t_0 < ... < t_K.
struct BCFamily {
  std::vector<double> t;
  std::vector<BoundaryCondition> samples;
  bool closed = false;

  BoundaryCondition at(double tq) const;  // per-vertex spherical interpolation
};

/// Prolongation from constrained to full coordinates: identity 4-blocks on
/// interior vertices, the orthonormal (b1, b2) plane basis on boundary ones.
struct ConstraintBasis {
  Eigen::SparseMatrix<double> P;  // 4n x (4 n_int + 2 n_bnd)
  int n_interior = 0;
  int n_boundary = 0;
};

enum class FrameField { T, N, B };

struct CertificationResult {
  bool ok = false;
  double value = 0;  // ellipticity margin or self-adjointness defect
};

/// V = chosen canonical frame field, Vt as given (constant or per-vertex).
BoundaryCondition canonical_bc(const TriMesh& mesh, FrameField kind,
                               const std::vector<UnitImVec>& Vt);
BoundaryCondition canonical_bc(const TriMesh& mesh, FrameField kind, const UnitImVec& Vt_const);

/// Elliptic iff V stays away from +-N: margin = min_p min(|V-N|, |V+N|).
CertificationResult check_elliptic(const TriMesh& mesh, const BoundaryCondition& bc,
                                   double tol = 1e-6);

/// Self-adjoint iff V is pointwise orthogonal to T: defect = max_p |<V,T>|.
CertificationResult check_selfadjoint(const TriMesh& mesh, const BoundaryCondition& bc,
                                      double tol = 1e-6);

/// Adjoint condition (-T V T^{-1}, Vt); an involution whose fixed points are
/// exactly the self-adjoint conditions.
BoundaryCondition adjoint_bc(const TriMesh& mesh, const BoundaryCondition& bc);

/// Winding number of p -> (<V,T>, <V,B>) along the positive boundary loop.
int deg_V(const TriMesh& mesh, const BoundaryCondition& bc, double elliptic_tol = 1e-6);

/// Degree of the closed family map (t, s) -> field(t, s) in the unit sphere,
/// via summed signed solid angles on a refined (t, s) grid.
int deg_torus(const TriMesh& mesh, const BCFamily& family, bool use_Vt = true);

/// The hemisphere family: V = i, raw Vt_t(e^{is}) = -cos(t/2) i
/// + sin(t/2) cos(s) j - sin(t/2) sin(s) k on the grid t_k = 2 pi k / steps;
/// `rotated` conjugates by e^{k t/4}, which closes the family.
BCFamily family_bcproof(const TriMesh& mesh, int steps, bool rotated);

ConstraintBasis constraint_basis(const TriMesh& mesh, const BoundaryCondition& bc);
ConstraintBasis constraint_basis_closed(const TriMesh& mesh);  // identity, no constraints

/// JSON forms: {"kind":"fields",...}, {"kind":"canonical",...},
/// {"kind":"family_bcproof","steps":K,"rotated":bool} (families only via the
/// family kind).
BoundaryCondition bc_from_json(const TriMesh& mesh, const std::string& json_text);
std::string bc_to_json(const BoundaryCondition& bc);

}  // namespace diraclab
