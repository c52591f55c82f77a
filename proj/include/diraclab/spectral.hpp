#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "diraclab/boundary.hpp"
#include "diraclab/dirac.hpp"
#include "diraclab/eigensolve.hpp"

namespace diraclab {

/// Constrained pencil: K_c is the symmetrized projection of K onto the
/// admissible subspace, M_c its exactly diagonal mass.
struct ConstrainedSystem {
  Eigen::SparseMatrix<double> K;
  Eigen::VectorXd mass;
  double rel_asymmetry = 0;  // discarded asymmetry of P^T K P, relative
};

ConstrainedSystem constrain(const DiracSystem& sys, const ConstraintBasis& basis);

struct EigenRequest {
  enum class Kind { Window, Count } kind = Kind::Window;
  double a = -1, b = 1;   // window bounds
  int count = 0;          // number of eigenvalues nearest `target`
  double target = 0;

  static EigenRequest window(double a, double b) {
    EigenRequest r;
    r.kind = Kind::Window;
    r.a = a;
    r.b = b;
    return r;
  }
  static EigenRequest nearest(int count, double target) {
    EigenRequest r;
    r.kind = Kind::Count;
    r.count = count;
    r.target = target;
    return r;
  }
};

struct Spectrum {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXd vectors;          // prolonged to full coordinates, M-orthonormal
  bool mass_orthonormal = true;
  double window_a = 0, window_b = 0;
  double rel_asymmetry = 0;

  SpinorField eigenspinor(int k) const { return vector_to_spinor(vectors.col(k)); }
};

/// Constrained symmetric eigensolve; dense below `dense_threshold` constrained
/// dof, shift-invert with inertia validation above.
Spectrum eigen_constrained(const DiracSystem& sys, const ConstraintBasis& basis,
                           const EigenRequest& request, int dense_threshold = 4000,
                           double asymmetry_tol = 0.1);

struct KernelReport {
  std::vector<double> singular_values;  // ascending head of the spectrum
  int accepted_dim = 0;
  double gap_ratio = 0;
  double threshold = 0;
};

/// Numerical kernel dimension of the constrained operator from the singular
/// values of the whitened rectangular system (full test space, constrained
/// trial space); a 100x spectral gap certifies the count.
KernelReport kernel_dim(const DiracSystem& sys, const ConstraintBasis& basis,
                        double threshold = 1e-6);

struct IndexReport {
  int ker_dim = 0;
  int coker_dim = 0;
  int index = 0;
  int deg = 0;
  KernelReport ker_report, coker_report;
};

/// Kernel and cokernel dimensions (the latter via the adjoint condition) with
/// the boundary degree; index = ker - coker.
IndexReport fredholm_index(const TriMesh& mesh, const BoundaryCondition& bc,
                           double threshold = 1e-6);

struct CrossingEvent {
  double t = 0;
  int dir = 0;  // +1 for below-to-at-or-above, -1 conversely
};

struct FlowResult {
  std::vector<double> t_samples;
  std::vector<std::vector<double>> tracks;  // window eigenvalues per sample
  std::vector<CrossingEvent> crossings;
  int sf = 0;
  double level = 0;
  double halfwidth = 0;
  double max_rel_asymmetry = 0;
  bool near_degenerate = false;  // some crossing involved a multiple eigenvalue
};

struct FlowOptions {
  double level = -1.0;
  double halfwidth = 0.4;
  double cert_tol = 1e-6;
  double min_step_frac = 1.0 / 1024.0;  // of the family t-range
  double edge_band = 0.2;               // fraction of halfwidth
  bool reverse = false;
};

/// Net signed eigenvalue flow through `level` along the family; crossings are
/// localized by bisection on window-population changes.
FlowResult spectral_flow(const TriMesh& mesh, const BCFamily& family, const FlowOptions& opts);

struct ModeReport {
  std::vector<double> u_angles;        // rotation-action angles on the eigenspace
  std::vector<int> modes;              // distinct frequency labels l, ascending
  std::vector<int> multiplicities;     // real dimension per distinct l
  std::vector<int> column_mode;        // mode label per eigenspace column
  Eigen::MatrixXd representatives;     // one full-coordinate vector per distinct mode
  double cluster_width = 0;
};

/// Decomposes the eigenspace cluster at `mu` under the mesh's exact rotational
/// symmetry; frequency labels follow the half-angle of the rotation action.
ModeReport fourier_decompose(const DiracSystem& sys, const Spectrum& spectrum, double mu,
                             double cluster_tol = 0.15);

/// Random-instance check of the block index identity: kernel and cokernel of
/// A = (B, C) with surjective B match those of C restricted to ker(B).
bool index_lemma_check(int dim_H, int dim_H1, int dim_H2, uint64_t seed);

}  // namespace diraclab
