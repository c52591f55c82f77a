#include <random>

#include "diraclab/quat.hpp"
#include "doctest.h"

using namespace diraclab;

namespace {

std::mt19937_64 rng(20240901);

Quat random_quat() {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng), g(rng)};
}

ImVec random_imvec() {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng)};
}

UnitImVec random_unit() { return UnitImVec::from(random_imvec() + ImVec{0.1, 0, 0}); }

}  // namespace

TEST_CASE("hamilton product defining relations") {
  CHECK((Quat::i() * Quat::j() - Quat::k()).norm() == 0.0);
  CHECK((Quat::j() * Quat::i() + Quat::k()).norm() == 0.0);
  CHECK((Quat::i() * Quat::i() + Quat::one()).norm() == 0.0);
  CHECK((Quat::j() * Quat::j() + Quat::one()).norm() == 0.0);
  // (1+i)(1+j) = 1+i+j+k
  Quat r = (Quat::one() + Quat::i()) * (Quat::one() + Quat::j());
  CHECK((r - Quat{1, 1, 1, 1}).norm() == 0.0);
}

TEST_CASE("imaginary product encodes dot and cross") {
  for (int it = 0; it < 200; ++it) {
    ImVec a = random_imvec(), b = random_imvec();
    Quat ab = a.quat() * b.quat();
    CHECK(std::abs(ab.w + dot(a, b)) < 1e-12 * (1 + a.norm() * b.norm()));
    CHECK((im(ab) - cross(a, b)).norm() < 1e-12 * (1 + a.norm() * b.norm()));
  }
}

TEST_CASE("norm multiplicativity and conjugation anti-homomorphism") {
  for (int it = 0; it < 1000; ++it) {
    Quat a = random_quat(), b = random_quat();
    CHECK(std::abs((a * b).norm() - a.norm() * b.norm()) < 1e-12 * (1 + a.norm() * b.norm()));
    CHECK((qconj(a * b) - qconj(b) * qconj(a)).norm() < 1e-12 * (1 + (a * b).norm()));
  }
}

TEST_CASE("left multiplication matrix") {
  CHECK(left_mul_matrix(Quat::one()).isIdentity(0.0));
  for (int it = 0; it < 50; ++it) {
    Eigen::Matrix4d m = left_mul_matrix(random_imvec().quat());
    CHECK((m + m.transpose()).norm() < 1e-14);
  }
  // Re(conj(p) q r) = p^T M_L(q) r on random triples
  for (int it = 0; it < 100; ++it) {
    Quat p = random_quat(), q = random_quat(), r = random_quat();
    double lhs = (qconj(p) * q * r).w;
    double rhs = p.coeffs().transpose() * left_mul_matrix(q) * r.coeffs();
    CHECK(std::abs(lhs - rhs) < 1e-12 * (1 + p.norm() * q.norm() * r.norm()));
  }
}

TEST_CASE("right multiplication matrix and commutation with left") {
  for (int it = 0; it < 50; ++it) {
    Quat p = random_quat(), q = random_quat();
    Eigen::Vector4d via_matrix = right_mul_matrix(q) * p.coeffs();
    CHECK((via_matrix - (p * q).coeffs()).norm() < 1e-13 * (1 + p.norm() * q.norm()));
    Eigen::Matrix4d lm = left_mul_matrix(p), rm = right_mul_matrix(q);
    CHECK((lm * rm - rm * lm).norm() < 1e-12 * (1 + p.norm() * q.norm()));
  }
}

TEST_CASE("similarity") {
  CHECK((similarity(Quat::one(), {0, 1, 0}) - ImVec{0, 1, 0}).norm() == 0.0);
  // homothety by |lambda|^2
  CHECK((similarity(Quat{2, 0, 0, 0}, {1, 0, 0}) - ImVec{4, 0, 0}).norm() < 1e-14);
  // lambda = e^{k pi/4}: direct expansion of conj(lambda) i lambda gives -j
  double c = std::sqrt(0.5);
  ImVec r = similarity(Quat{c, 0, 0, c}, {1, 0, 0});
  CHECK((r - ImVec{0, -1, 0}).norm() < 1e-14);
  // result stays imaginary and scales by |lambda|^2
  for (int it = 0; it < 100; ++it) {
    Quat lam = random_quat();
    if (lam.norm() < 1e-3) continue;
    ImVec x = random_imvec();
    ImVec y = similarity(lam, x);
    CHECK(std::abs(y.norm() - lam.norm2() * x.norm()) < 1e-10 * (1 + lam.norm2() * x.norm()));
  }
  CHECK_THROWS_AS(similarity(Quat{0, 0, 0, 0}, {1, 0, 0}), Error);
}

TEST_CASE("plane basis commutant and anticommutant") {
  UnitImVec I({1, 0, 0});
  auto [b1, b2] = plane_basis(I, I);
  // E'(i, i) = span{1, i}
  CHECK(plane_membership(I, I, b1) < 1e-12);
  CHECK(plane_membership(I, I, b2) < 1e-12);
  CHECK(std::abs(b1.y) + std::abs(b1.z) + std::abs(b2.y) + std::abs(b2.z) < 1e-12);

  UnitImVec mI({-1, 0, 0});
  auto [c1, c2] = plane_basis(I, mI);
  // E'(i, -i) = span{j, k}
  CHECK(plane_membership(I, mI, c1) < 1e-12);
  CHECK(plane_membership(I, mI, c2) < 1e-12);
  CHECK(std::abs(c1.w) + std::abs(c1.x) + std::abs(c2.w) + std::abs(c2.x) < 1e-12);
}

TEST_CASE("plane basis generic pair") {
  UnitImVec I({1, 0, 0}), J({0, 1, 0});
  auto [b1, b2] = plane_basis(I, J);
  // b1 ~ (i+j)/sqrt2, b2 = i b1 ~ (-1+k)/sqrt2
  double c = std::sqrt(0.5);
  CHECK((b1 - Quat{0, c, c, 0}).norm() < 1e-12);
  CHECK((b2 - Quat{-c, 0, 0, c}).norm() < 1e-12);
  CHECK(plane_membership(I, J, b1) < 1e-12);
  CHECK(plane_membership(I, J, b2) < 1e-12);
  // membership residual examples
  CHECK(plane_membership(I, I, Quat::one()) == 0.0);
  CHECK(plane_membership(I, I, Quat::j()) == 2.0);
  CHECK(plane_membership(I, J, Quat{0, 1, 1, 0}) < 1e-12);
}

TEST_CASE("plane basis random pairs: orthonormal, members of the plane") {
  for (int it = 0; it < 1000; ++it) {
    UnitImVec V = random_unit(), Vt = random_unit();
    auto [b1, b2] = plane_basis(V, Vt);
    CHECK(std::abs(b1.norm() - 1) < 1e-12);
    CHECK(std::abs(b2.norm() - 1) < 1e-12);
    CHECK(std::abs(qdot(b1, b2)) < 1e-12);
    CHECK(plane_membership(V, Vt, b1) < 1e-12);
    CHECK(plane_membership(V, Vt, b2) < 1e-12);
  }
}

TEST_CASE("slerp stays on the sphere") {
  for (int it = 0; it < 100; ++it) {
    UnitImVec a = random_unit(), b = random_unit();
    if (dot(a.v, b.v) < -0.99) continue;
    UnitImVec m = slerp(a, b, 0.37);
    CHECK(std::abs(m.v.norm() - 1) < 1e-12);
    CHECK((slerp(a, b, 0.0).v - a.v).norm() < 1e-12);
    CHECK((slerp(a, b, 1.0).v - b.v).norm() < 1e-12);
  }
}
