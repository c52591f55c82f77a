#include "diraclab/vekua.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace diraclab {

namespace {

int matrix_rank(const Eigen::MatrixXd& M, double tol = 1e-10) {
  if (M.rows() == 0 || M.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  double top = svd.singularValues().maxCoeff();
  if (top == 0) return 0;
  int r = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > tol * top) ++r;
  return r;
}

// kernel dimension of { Re(z^p lambda(z)) = 0 on |z|=1 } for polynomial
// coefficients lambda = sum a_k z^k, via the mode conditions
// a_{m-p} + conj(a_{-m-p}) = 0 for all m >= 0
int poly_kernel_once(int p, int K) {
  const int cols = 2 * (K + 1);  // [Re a_0, Im a_0, Re a_1, ...]
  std::vector<Eigen::VectorXd> rows;
  for (int m = 0; m <= K + std::abs(p) + 2; ++m) {
    int k1 = m - p;    // index of a_{m-p}
    int k2 = -m - p;   // index of a_{-m-p}, conjugated
    bool in1 = (k1 >= 0 && k1 <= K), in2 = (k2 >= 0 && k2 <= K);
    if (!in1 && !in2) continue;
    Eigen::VectorXd re = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd imag = Eigen::VectorXd::Zero(cols);
    if (in1) {
      re[2 * k1] += 1;
      imag[2 * k1 + 1] += 1;
    }
    if (in2) {
      re[2 * k2] += 1;
      imag[2 * k2 + 1] -= 1;
    }
    rows.push_back(re);
    rows.push_back(imag);
  }
  Eigen::MatrixXd A(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) A.row(r) = rows[r];
  return cols - matrix_rank(A);
}

// kernel dimension of the oblique-derivative problem for harmonic
// f = Re(sum c_k z^k); the condition constrains b_k = (k+1) c_{k+1} / 2
int laplace_kernel_once(int p, int K) {
  const int cols = 1 + 2 * K;  // [Re c_0, Re c_1, Im c_1, ...]
  std::vector<Eigen::VectorXd> rows;
  auto put = [&](Eigen::VectorXd& row, int k, bool imag_part, double coeff) {
    // coefficient of b_k expressed through c_{k+1}
    int c_index = k + 1;
    double scale = coeff * c_index / 2.0;
    int col = imag_part ? 2 * c_index : 2 * c_index - 1;
    row[col] += scale;
  };
  for (int m = 0; m <= K + std::abs(p) + 2; ++m) {
    int k1 = m - p;
    int k2 = -m - p;
    bool in1 = (k1 >= 0 && k1 <= K - 1), in2 = (k2 >= 0 && k2 <= K - 1);
    if (!in1 && !in2) continue;
    Eigen::VectorXd re = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd imag = Eigen::VectorXd::Zero(cols);
    if (in1) {
      put(re, k1, false, 1.0);
      put(imag, k1, true, 1.0);
    }
    if (in2) {
      put(re, k2, false, 1.0);
      put(imag, k2, true, -1.0);
    }
    rows.push_back(re);
    rows.push_back(imag);
  }
  Eigen::MatrixXd A(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) A.row(r) = rows[r];
  return cols - matrix_rank(A);
}

}  // namespace

int poly_kernel_oracle(int p, int K) {
  if (K < 2 * std::abs(p) + 4)
    throw Error(ErrorCode::ConfigError, "oracle degree below 2|p| + 4");
  int dim = poly_kernel_once(p, K);
  if (poly_kernel_once(p, K + 2) != dim)
    throw Error(ErrorCode::RankUnstable, "kernel dimension depends on the cutoff degree");
  return dim;
}

int laplace_kernel_oracle(int p, int K) {
  if (K < 2 * std::abs(p) + 4)
    throw Error(ErrorCode::ConfigError, "oracle degree below 2|p| + 4");
  int dim = laplace_kernel_once(p, K);
  if (laplace_kernel_once(p, K + 2) != dim)
    throw Error(ErrorCode::RankUnstable, "kernel dimension depends on the cutoff degree");
  return dim;
}

BoundaryCondition quaternionic_vekua_bc(const TriMesh& disc, int p1, int p2) {
  if (disc.tag.rfind("flat_disc", 0) != 0)
    throw Error(ErrorCode::WrongMesh, "Vekua condition is defined on the flat disc generator");
  BoundaryCondition bc;
  int q = p1 + p2, qt = p2 - p1;
  for (int v : disc.boundary_vertices()) {
    const ImVec& pos = disc.positions[v];
    double s = std::atan2(-pos.z, pos.y);
    // V = -j e^{i q s}, Vt = j e^{i qt s}
    bc.V.push_back(UnitImVec::from({0, -std::cos(q * s), std::sin(q * s)}));
    bc.Vt.push_back(UnitImVec::from({0, std::cos(qt * s), -std::sin(qt * s)}));
  }
  return bc;
}

VekuaReport vekua_experiment(const VekuaSpec& spec, double threshold) {
  if (std::abs(spec.p1) > 8 || std::abs(spec.p2) > 8)
    throw Error(ErrorCode::ConfigError, "winding exponents limited to |p| <= 8");
  VekuaReport rep;
  rep.spec = spec;
  TriMesh disc = gen_flat_disc(spec.n_r, spec.n_s);
  BoundaryCondition bc = quaternionic_vekua_bc(disc, spec.p1, spec.p2);
  rep.fem = fredholm_index(disc, bc, threshold);

  auto pred_ker = [](int p) { return std::max(0, 1 - 2 * p); };
  auto pred_coker = [](int p) { return std::max(0, 2 * p - 1); };
  rep.predicted_ker = pred_ker(spec.p1) + pred_ker(spec.p2);
  rep.predicted_coker = pred_coker(spec.p1) + pred_coker(spec.p2);
  rep.predicted_index = 2 * (1 - spec.p1 - spec.p2);
  rep.predicted_deg = 1 - spec.p1 - spec.p2;

  int K = spec.degree();
  int K_adj = std::max(K, 2 * std::max(std::abs(1 - spec.p1), std::abs(1 - spec.p2)) + 4);
  rep.oracle_ker = poly_kernel_oracle(spec.p1, K) + poly_kernel_oracle(spec.p2, K);
  // cokernel through the oracle and the per-factor index 1 - 2p
  rep.oracle_coker = (poly_kernel_oracle(spec.p1, K_adj) - (1 - 2 * spec.p1)) +
                     (poly_kernel_oracle(spec.p2, K_adj) - (1 - 2 * spec.p2));

  if (spec.n_r >= 16 && spec.n_s >= 64) {
    if (rep.fem.ker_dim != rep.oracle_ker || rep.fem.coker_dim != rep.oracle_coker)
      throw Error(ErrorCode::MismatchBeyondTolerance,
                  "FEM kernel/cokernel dimensions disagree with the oracle");
  }
  return rep;
}

}  // namespace diraclab
