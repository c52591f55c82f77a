#pragma once

#include "diraclab/boundary.hpp"
#include "diraclab/mesh.hpp"
#include "diraclab/spectral.hpp"

namespace diraclab {

struct VekuaSpec {
  int p1 = 0, p2 = 0;     // winding exponents of nu_1 = z^{p1}, nu_2 = z^{p2}
  int n_r = 16, n_s = 64; // disc resolution
  int oracle_degree = 0;  // 0: auto (2 max|p| + 4)

  int degree() const {
    int m = std::max(std::abs(p1), std::abs(p2));
    return oracle_degree > 0 ? oracle_degree : 2 * m + 4;
  }
};

/// Boundary condition V = -j nu1 nu2, Vt = j conj(nu1) nu2 on the flat disc.
BoundaryCondition quaternionic_vekua_bc(const TriMesh& disc, int p1, int p2);

/// Real dimension of { holomorphic lambda of degree <= K : Re(z^p lambda) = 0
/// on |z| = 1 }, computed by exact Fourier-mode rank elimination; verified
/// stable between K and K+2.
int poly_kernel_oracle(int p, int K);

/// Real dimension of { harmonic f = Re(sum c_k z^k), deg <= K :
/// Re(z^p (df/dz)) = 0 on |z| = 1 }, by the same Fourier-rank method.
int laplace_kernel_oracle(int p, int K);

struct VekuaReport {
  VekuaSpec spec;
  IndexReport fem;
  int predicted_ker = 0;    // sum_i max(0, 1 - 2 p_i)
  int predicted_coker = 0;  // sum_i max(0, 2 p_i - 1)
  int predicted_index = 0;  // 2 (1 - p1 - p2)
  int predicted_deg = 0;    // 1 - p1 - p2
  int oracle_ker = 0;       // per-factor polynomial oracle sums
  int oracle_coker = 0;
};

/// Builds the disc, runs the finite element index computation, and compares it
/// to the closed-form prediction and the polynomial oracle.  The kernel
/// threshold defaults to the discretization scale of the default resolution.
VekuaReport vekua_experiment(const VekuaSpec& spec, double threshold = 1e-2);

}  // namespace diraclab
