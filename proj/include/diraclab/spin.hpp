#pragma once

#include <vector>

#include "diraclab/dirac.hpp"
#include "diraclab/mesh.hpp"
#include "diraclab/spectral.hpp"

namespace diraclab {

struct DeformationResult {
  TriMesh mesh;                      // same connectivity, new positions
  double closure_residual = 0;       // max over faces of |sum of oriented edge targets|
  double closure_residual_rel = 0;   // relative to the target mesh diameter
  std::vector<int> branch_vertices;  // |lambda| below branch_tol * median
  double branch_tol = 0;
};

/// Integrates d f~ = conj(lambda) df lambda: exact edge integrals for linearly
/// interpolated lambda, then cotangent-weighted least squares for positions
/// with vertex `fix` pinned at the origin.
DeformationResult spin_transform(const TriMesh& mesh, const SpinorField& lambda, int fix = 0);

struct McDensityReport {
  double max_abs_error = 0;        // of the half-density difference, interior vertices
  double max_rel_error = 0;        // relative to the predicted half-density scale
  double max_interior_H_new = 0;   // curvature of the deformed surface
};

/// Checks the half-density transformation law: new H sqrt(A) against
/// (H + rho) sqrt(A) on interior vertices (rho is the eigenvalue when lambda
/// is an eigenspinor of the unshifted operator).
McDensityReport verify_mc_density(const TriMesh& original, const DeformationResult& result,
                                  double rho, const std::vector<int>& exclude = {});

/// Reflects a disc whose boundary lies in a plane perpendicular to the i-axis
/// through that plane and welds the boundary, producing a closed mesh.
TriMesh double_reflect(const TriMesh& disc, double planar_tol_rel = 1e-3);

struct SphereTableEntry {
  double mu = 0;              // requested eigenvalue
  double mu_found = 0;        // cluster center
  int mode = 0;               // frequency label l
  DeformationResult deformation;
  SpinorField lambda;
};

struct SphereTable {
  std::vector<SphereTableEntry> entries;
  std::vector<int> mode_counts;  // per requested mu
};

/// Eigensolves the rotationally symmetric sphere at each requested eigenvalue,
/// splits eigenspaces into rotation modes, and deforms one representative per
/// mode.
SphereTable dirac_sphere_table(const TriMesh& sphere, const std::vector<double>& mu_values,
                               double cluster_tol = 0.2);

}  // namespace diraclab
