#include <cmath>

#include "diraclab/vekua.hpp"
#include "doctest.h"

using namespace diraclab;

TEST_CASE("polynomial kernel oracle matches the closed form") {
  for (int p = -4; p <= 4; ++p) {
    int K = 2 * std::abs(p) + 6;
    int expect = p > 0 ? 0 : 1 - 2 * p;
    CHECK(poly_kernel_oracle(p, K) == expect);
  }
  CHECK(poly_kernel_oracle(0, 6) == 1);
  CHECK(poly_kernel_oracle(-1, 8) == 3);
  CHECK(poly_kernel_oracle(2, 8) == 0);
  CHECK_THROWS_AS(poly_kernel_oracle(3, 4), Error);  // degree below the cutoff
}

TEST_CASE("harmonic oblique-derivative oracle matches the closed form") {
  for (int p = -4; p <= 4; ++p) {
    int K = 2 * std::abs(p) + 6;
    int expect = p > 0 ? 1 : 2 - 2 * p;
    CHECK(laplace_kernel_oracle(p, K) == expect);
  }
  CHECK(laplace_kernel_oracle(1, 7) == 1);
  CHECK(laplace_kernel_oracle(0, 6) == 2);
  CHECK(laplace_kernel_oracle(-1, 8) == 4);
}

TEST_CASE("the two oracles differ by the holomorphic primitive") {
  for (int p = -4; p <= 4; ++p) {
    int K = 2 * std::abs(p) + 8;
    CHECK(laplace_kernel_oracle(p, K) == poly_kernel_oracle(p, K) + 1);
  }
}

TEST_CASE("oracle dimensions are degree independent") {
  for (int p : {-3, 0, 2}) {
    int base = poly_kernel_oracle(p, 2 * std::abs(p) + 4);
    for (int K = 2 * std::abs(p) + 5; K < 2 * std::abs(p) + 12; ++K)
      CHECK(poly_kernel_oracle(p, K) == base);
  }
}

TEST_CASE("vekua boundary fields") {
  TriMesh disc = gen_flat_disc(4, 32);
  BoundaryCondition bc = quaternionic_vekua_bc(disc, 0, 0);
  for (size_t k = 0; k < bc.V.size(); ++k) {
    CHECK((bc.V[k].v - ImVec{0, -1, 0}).norm() < 1e-14);   // V = -j
    CHECK((bc.Vt[k].v - ImVec{0, 1, 0}).norm() < 1e-14);   // Vt = +j
  }
  // unit imaginary for arbitrary exponents
  BoundaryCondition bc2 = quaternionic_vekua_bc(disc, 3, -2);
  for (size_t k = 0; k < bc2.V.size(); ++k) {
    CHECK(std::abs(bc2.V[k].v.norm() - 1) < 1e-14);
    CHECK(std::abs(bc2.Vt[k].v.norm() - 1) < 1e-14);
  }
  CHECK_THROWS_AS(quaternionic_vekua_bc(gen_hemisphere(4, 32), 0, 0), Error);
}

TEST_CASE("index experiment at a reduced resolution") {
  // small mesh keeps the unit suite fast; the acceptance suite runs the
  // full battery at (16, 64)
  VekuaSpec spec;
  spec.p1 = 0;
  spec.p2 = 0;
  spec.n_r = 10;
  spec.n_s = 40;
  VekuaReport rep = vekua_experiment(spec, 2e-2);
  CHECK(rep.fem.ker_dim == 2);
  CHECK(rep.fem.coker_dim == 0);
  CHECK(rep.fem.index == 2);
  CHECK(rep.fem.deg == 1);
  CHECK(rep.predicted_index == 2);
  CHECK(rep.oracle_ker == 2);
  CHECK(rep.oracle_coker == 0);
}
