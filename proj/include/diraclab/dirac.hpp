#pragma once

#include <Eigen/Sparse>
#include <variant>
#include <vector>

#include "diraclab/mesh.hpp"
#include "diraclab/quat.hpp"

namespace diraclab {

/// Per-vertex quaternion values.
using SpinorField = std::vector<Quat>;

/// Per-face real potential, or a single constant.
struct Potential {
  std::variant<double, std::vector<double>> value = 0.0;

  Potential() = default;
  Potential(double c) : value(c) {}
  Potential(std::vector<double> per_face) : value(std::move(per_face)) {}

  double at(int face) const {
    if (std::holds_alternative<double>(value)) return std::get<double>(value);
    return std::get<std::vector<double>>(value).at(face);
  }
};

/// Weak form of the first-order operator induced by the immersion, shifted by
/// the potential: K in 4x4 blocks over vertices, plus the diagonal lumped mass
/// (vertex area repeated four times).
struct DiracSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd mass;  // diagonal of M, size 4 * n_vertices
  const TriMesh* mesh = nullptr;
  Potential rho;

  int dof() const { return static_cast<int>(mass.size()); }
};

DiracSystem assemble(const TriMesh& mesh, const Potential& rho = Potential());

/// Galerkin image M^{-1} K lambda.
SpinorField apply(const DiracSystem& sys, const SpinorField& lambda);

Eigen::VectorXd spinor_to_vector(const SpinorField& lambda);
SpinorField vector_to_spinor(const Eigen::VectorXd& v);

/// Principal symbol at a covector xi = xi_u du + xi_v dv in the face's affine
/// chart (u, v) -> f0 + u (f1 - f0) + v (f2 - f0); linear in xi.
Eigen::Matrix4d symbol(const TriMesh& mesh, int face, double xi_u, double xi_v);

/// Covector inner product induced by the immersion on the same chart.
double symbol_metric(const TriMesh& mesh, int face, double xi_u, double xi_v,
                     double eta_u, double eta_v);

struct MeanCurvatureReport {
  std::vector<double> H;            // pointwise mean curvature
  std::vector<double> half_density; // H_p * sqrt(A_p)
  std::vector<double> area;         // vertex areas
};

/// Cotangent mean curvature with sign resolved against the outward vertex
/// normal; H = +1 on the outward-oriented unit sphere.
MeanCurvatureReport mean_curvature_halfdensity(const TriMesh& mesh);

}  // namespace diraclab
