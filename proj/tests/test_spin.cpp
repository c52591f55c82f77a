#include <cmath>
#include <random>
#include <set>

#include "diraclab/spin.hpp"
#include "doctest.h"

using namespace diraclab;

namespace {

// best-fit check of X against Y up to translation
double max_dev_up_to_translation(const std::vector<ImVec>& X, const std::vector<ImVec>& Y) {
  ImVec shift{0, 0, 0};
  for (size_t v = 0; v < X.size(); ++v) shift = shift + (Y[v] - X[v]);
  shift = shift / static_cast<double>(X.size());
  double dev = 0;
  for (size_t v = 0; v < X.size(); ++v) dev = std::max(dev, (X[v] + shift - Y[v]).norm());
  return dev;
}

}  // namespace

TEST_CASE("identity spinor reproduces the immersion") {
  TriMesh hemi = gen_hemisphere(5, 20);
  SpinorField ones(hemi.n_vertices(), Quat::one());
  DeformationResult res = spin_transform(hemi, ones);
  CHECK(res.closure_residual < 1e-12);
  CHECK(max_dev_up_to_translation(res.mesh.positions, hemi.positions) < 1e-12);
  CHECK(res.branch_vertices.empty());
}

TEST_CASE("constant spinor acts as a similarity") {
  TriMesh hemi = gen_hemisphere(4, 16);
  Quat q{0.6, -0.3, 1.1, 0.2};
  SpinorField lam(hemi.n_vertices(), q);
  DeformationResult res = spin_transform(hemi, lam);
  std::vector<ImVec> expect;
  for (const auto& p : hemi.positions) expect.push_back(similarity(q, p));
  CHECK(max_dev_up_to_translation(res.mesh.positions, expect) < 1e-10);
  // scale |q|^2 on the diameters
  CHECK(std::abs(res.mesh.bbox_diameter() - q.norm2() * hemi.bbox_diameter()) <
        1e-9 * hemi.bbox_diameter());
}

TEST_CASE("gauge covariance and sign invariance") {
  TriMesh disc = gen_flat_disc(4, 16);
  std::mt19937_64 rng(23);
  std::normal_distribution<double> g;
  SpinorField lam(disc.n_vertices());
  for (auto& l : lam) l = Quat{1.0 + 0.1 * g(rng), 0.1 * g(rng), 0.1 * g(rng), 0.1 * g(rng)};

  Quat unit{g(rng), g(rng), g(rng), g(rng)};
  unit = unit / unit.norm();
  SpinorField lam_q = lam;
  for (auto& l : lam_q) l = l * unit;

  DeformationResult base = spin_transform(disc, lam);
  DeformationResult rotated = spin_transform(disc, lam_q);
  std::vector<ImVec> expect;
  for (const auto& p : base.mesh.positions) expect.push_back(similarity(unit, p));
  CHECK(max_dev_up_to_translation(rotated.mesh.positions, expect) < 1e-10);

  SpinorField lam_neg = lam;
  for (auto& l : lam_neg) l = -l;
  DeformationResult neg = spin_transform(disc, lam_neg);
  CHECK(max_dev_up_to_translation(neg.mesh.positions, base.mesh.positions) < 1e-13);
}

TEST_CASE("all-zero spinor is rejected") {
  TriMesh disc = gen_flat_disc(2, 8);
  SpinorField zeros(disc.n_vertices(), Quat{0, 0, 0, 0});
  CHECK_THROWS_AS(spin_transform(disc, zeros), Error);
}

TEST_CASE("density law for the identity deformation") {
  TriMesh sphere = gen_icosphere(3);
  SpinorField ones(sphere.n_vertices(), Quat::one());
  DeformationResult res = spin_transform(sphere, ones);
  McDensityReport rep = verify_mc_density(sphere, res, 0.0);
  CHECK(rep.max_abs_error < 1e-8);
  CHECK(rep.max_rel_error < 1e-8);
}

TEST_CASE("doubling the round hemisphere") {
  TriMesh hemi = gen_hemisphere(6, 24);
  SpinorField ones(hemi.n_vertices(), Quat::one());
  DeformationResult res = spin_transform(hemi, ones);
  TriMesh closed = double_reflect(res.mesh, 1e-6);
  CHECK(closed.boundary_loops.empty());
  validate(closed);
  // Euler characteristic 2
  std::set<std::pair<int, int>> edges;
  for (const auto& f : closed.faces)
    for (int e = 0; e < 3; ++e) edges.insert(std::minmax(f[e], f[(e + 1) % 3]));
  CHECK(closed.n_vertices() - static_cast<int>(edges.size()) + closed.n_faces() == 2);
  // all vertices equidistant from the center
  ImVec center{0, 0, 0};
  for (const auto& p : closed.positions) center = center + p;
  center = center / closed.n_vertices();
  double r0 = (closed.positions[0] - center).norm();
  for (const auto& p : closed.positions) CHECK(std::abs((p - center).norm() - r0) < 1e-8);
  // doubling commutes with the trivial spin transform
  TriMesh direct = double_reflect(hemi, 1e-6);
  CHECK(direct.n_vertices() == closed.n_vertices());
}

TEST_CASE("non-planar boundary is rejected") {
  TriMesh hemi = gen_hemisphere(3, 12);
  TriMesh skewed = hemi;
  skewed.positions[hemi.boundary_loops[0][0]].x += 0.2;
  CHECK_THROWS_AS(double_reflect(skewed, 1e-3), Error);
}

TEST_CASE("closure residual decays under refinement for eigenspinor input") {
  // the deformation target form is exactly closed in the smooth limit
  double prev = -1;
  for (int res : {6, 12}) {
    TriMesh hemi = gen_hemisphere(res, 4 * res);
    DiracSystem sys = assemble(hemi);
    BCFamily fam = family_bcproof(hemi, 8, true);
    ConstraintBasis basis = constraint_basis(hemi, fam.samples[0]);
    Spectrum spec = eigen_constrained(sys, basis, EigenRequest::nearest(2, -2.0));
    REQUIRE(spec.eigenvalues.size() == 2);
    DeformationResult def = spin_transform(hemi, spec.eigenspinor(0));
    if (prev > 0) CHECK(def.closure_residual_rel < 0.6 * prev);
    prev = def.closure_residual_rel;
  }
}
