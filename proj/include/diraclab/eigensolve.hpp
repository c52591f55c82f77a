#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <vector>

namespace diraclab {

/// Number of eigenvalues of the pencil (K, M) strictly below `level`:
/// negative inertia of the LDL^T factorization of K - level * M.
int inertia_below(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& mass_diag,
                  double level);

struct EigenPairs {
  std::vector<double> values;            // ascending
  Eigen::MatrixXd vectors;               // columns, M-orthonormal (empty if not requested)
};

/// All eigenpairs of the pencil (K, M) with M positive diagonal, via the dense
/// symmetric solve in whitened coordinates.
EigenPairs dense_eigen(const Eigen::MatrixXd& K, const Eigen::VectorXd& mass_diag,
                       bool with_vectors);

/// All eigenvalues of (K, M) inside [a, b], by shift-invert Lanczos with full
/// reorthogonalization at the window midpoint.  The count is certified by
/// inertia at the window ends; SolverFailure if the iteration cannot match it.
EigenPairs window_eigen(const Eigen::SparseMatrix<double>& K, const Eigen::VectorXd& mass_diag,
                        double a, double b, bool with_vectors, int max_iter = 600);

/// Smallest `count` eigenvalues of the SPD-ish pencil (S, I) via shift-invert
/// Lanczos at a small negative shift (used for singular value tails).
EigenPairs smallest_eigen_spd(const Eigen::SparseMatrix<double>& S, int count,
                              int max_iter = 600);

}  // namespace diraclab
