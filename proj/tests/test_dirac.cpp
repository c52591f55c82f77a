#include <cmath>
#include <random>
#include <set>

#include "diraclab/dirac.hpp"
#include "doctest.h"

using namespace diraclab;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel_asymmetry(const Eigen::SparseMatrix<double>& K) {
  Eigen::SparseMatrix<double> Kt = K.transpose();
  return (K - Kt).norm() / K.norm();
}

// 32-point Gauss-Legendre rule on [0,1]
void gauss01(std::vector<double>& xs, std::vector<double>& ws) {
  static const double x16[16] = {
      0.0483076656877383162, 0.1444719615827964934, 0.2392873622521370745, 0.3318686022821276498,
      0.4213512761306353454, 0.5068999089322293900, 0.5877157572407623290, 0.6630442669302152009,
      0.7321821187402896804, 0.7944837959679424070, 0.8493676137325699701, 0.8963211557660521240,
      0.9349060759377396891, 0.9647622555875064308, 0.9856115115452683354, 0.9972638618494815635};
  static const double w16[16] = {
      0.0965400885147278006, 0.0956387200792748594, 0.0938443990808045654, 0.0911738786957638847,
      0.0876520930044038111, 0.0833119242269467552, 0.0781938957870703065, 0.0723457941088485062,
      0.0658222227763618468, 0.0586840934785355471, 0.0509980592623761762, 0.0428358980222266807,
      0.0342738629130214331, 0.0253920653092620595, 0.0162743947309056706, 0.0070186100094700966};
  xs.clear();
  ws.clear();
  for (int k = 15; k >= 0; --k) {
    xs.push_back(0.5 * (1.0 - x16[k]));
    ws.push_back(0.5 * w16[k]);
  }
  for (int k = 0; k < 16; ++k) {
    xs.push_back(0.5 * (1.0 + x16[k]));
    ws.push_back(0.5 * w16[k]);
  }
}

ImVec hemi_f(double x, double y) {
  double r2 = x * x + y * y, d = 1 + r2;
  return {(r2 - 1) / d, 2 * x / d, -2 * y / d};
}
Quat test_phi(double x, double y) { return {x, -y, 0.3 * x, 0.1}; }
Quat test_lam(double x, double y) { return {0.2, x * y, -x, y}; }

}  // namespace

TEST_CASE("constants are an exact kernel") {
  for (const TriMesh& mesh :
       {gen_flat_disc(4, 12), gen_hemisphere(3, 9), gen_icosphere(2), gen_symmetric_sphere(3, 9)}) {
    DiracSystem sys = assemble(mesh);
    for (Quat c : {Quat::one(), Quat{0.3, -1.2, 0.7, 2.0}}) {
      SpinorField lam(mesh.n_vertices(), c);
      Eigen::VectorXd r = sys.K * spinor_to_vector(lam);
      CHECK(r.lpNorm<Eigen::Infinity>() < 1e-13 * sys.K.norm());
    }
  }
}

TEST_CASE("closed meshes give symmetric K") {
  for (const TriMesh& mesh : {gen_icosphere(1), gen_icosphere(2), gen_symmetric_sphere(4, 12)}) {
    DiracSystem sys = assemble(mesh);
    CHECK(rel_asymmetry(sys.K) < 1e-13);
    CHECK(sys.mass.minCoeff() > 0);
  }
}

TEST_CASE("asymmetry is supported on boundary blocks only") {
  TriMesh disc = gen_flat_disc(4, 12);
  DiracSystem sys = assemble(disc);
  Eigen::SparseMatrix<double> D = sys.K - Eigen::SparseMatrix<double>(sys.K.transpose());
  auto bnd = disc.boundary_mask();
  for (int col = 0; col < D.outerSize(); ++col) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(D, col); it; ++it) {
      if (std::abs(it.value()) < 1e-14) continue;
      CHECK(bnd[it.row() / 4]);
      CHECK(bnd[it.col() / 4]);
    }
  }
}

TEST_CASE("boundary symmetry defect blocks are left multiplications by chords") {
  TriMesh disc = gen_flat_disc(6, 24);
  DiracSystem sys = assemble(disc);
  Eigen::MatrixXd D = Eigen::MatrixXd(sys.K) - Eigen::MatrixXd(sys.K).transpose();
  const auto& loop = disc.boundary_loops[0];
  int n = static_cast<int>(loop.size());
  for (int k = 0; k < n; ++k) {
    int a = loop[k], b = loop[(k + 1) % n];
    Eigen::Matrix4d blk = D.block<4, 4>(4 * a, 4 * b);
    // recover the quaternion from the first column: M_L(q) * e0 = q
    Quat q{blk(0, 0), blk(1, 0), blk(2, 0), blk(3, 0)};
    CHECK((left_mul_matrix(q) - blk).norm() < 1e-13);
    CHECK(std::abs(q.w) < 1e-14);
    ImVec chord = disc.positions[b] - disc.positions[a];
    // chord-aligned up to O(h)
    CHECK(cross(normalized(im(q)), normalized(chord)).norm() < 0.2);
  }
}

TEST_CASE("apply on constants with constant potential") {
  TriMesh ico = gen_icosphere(2);
  DiracSystem sys0 = assemble(ico);
  SpinorField ones(ico.n_vertices(), Quat{0.5, 1, -2, 0.25});
  SpinorField out0 = diraclab::apply(sys0, ones);
  for (const Quat& q : out0) CHECK(q.norm() < 1e-12);

  double c = 0.7;
  DiracSystem sysc = assemble(ico, Potential(c));
  SpinorField outc = diraclab::apply(sysc, ones);
  // (D - c) lambda = -c lambda for constants; lumping exact on uniform meshes
  for (size_t p = 0; p < outc.size(); ++p) CHECK((outc[p] + c * ones[p]).norm() < 1e-10);
}

TEST_CASE("potential lumping matches mass lumping") {
  TriMesh disc = gen_flat_disc(3, 9);
  DiracSystem sys0 = assemble(disc);
  DiracSystem sysc = assemble(disc, Potential(1.25));
  Eigen::SparseMatrix<double> diff = sysc.K - sys0.K;
  Eigen::VectorXd d = Eigen::VectorXd(diff.diagonal());
  CHECK((d + 1.25 * sys0.mass).lpNorm<Eigen::Infinity>() < 1e-14);
  CHECK((Eigen::MatrixXd(diff) - Eigen::MatrixXd(d.asDiagonal())).norm() < 1e-14);
}

TEST_CASE("symbol: linearity, Clifford identity, unit covectors") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (const TriMesh& mesh : {gen_hemisphere(4, 12), gen_icosphere(1)}) {
    for (int trial = 0; trial < 40; ++trial) {
      int f = static_cast<int>(rng() % mesh.n_faces());
      double xu = g(rng), xv = g(rng), eu = g(rng), ev = g(rng);
      CHECK(symbol(mesh, f, 0, 0).norm() == 0.0);
      Eigen::Matrix4d sum = symbol(mesh, f, xu + eu, xv + ev);
      CHECK((sum - symbol(mesh, f, xu, xv) - symbol(mesh, f, eu, ev)).norm() < 1e-10);
      Eigen::Matrix4d sx = symbol(mesh, f, xu, xv), se = symbol(mesh, f, eu, ev);
      Eigen::Matrix4d anti = sx * se + se * sx;
      double ip = symbol_metric(mesh, f, xu, xv, eu, ev);
      CHECK((anti + 2 * ip * Eigen::Matrix4d::Identity()).norm() < 1e-10 * (1 + std::abs(ip)));
      double len = std::sqrt(symbol_metric(mesh, f, xu, xv, xu, xv));
      Eigen::Matrix4d sn = symbol(mesh, f, xu / len, xv / len);
      CHECK((sn * sn + Eigen::Matrix4d::Identity()).norm() < 1e-10);
      CHECK((sn * sn.transpose() - Eigen::Matrix4d::Identity()).norm() < 1e-10);
    }
  }
}

TEST_CASE("K commutes with global right multiplication") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  TriMesh mesh = gen_hemisphere(3, 9);
  DiracSystem sys = assemble(mesh);
  Quat q{g(rng), g(rng), g(rng), g(rng)};
  q = q / q.norm();
  Eigen::Matrix4d R = right_mul_matrix(q);
  Eigen::MatrixXd K = Eigen::MatrixXd(sys.K);
  int n = mesh.n_vertices();
  Eigen::MatrixXd Rfull = Eigen::MatrixXd::Zero(4 * n, 4 * n);
  for (int v = 0; v < n; ++v) Rfull.block<4, 4>(4 * v, 4 * v) = R;
  CHECK((K * Rfull - Rfull * K).norm() < 1e-12 * K.norm());
}

TEST_CASE("mean curvature: sphere, plane, scaling") {
  double prev = -1;
  for (int level : {3, 4}) {
    TriMesh ico = gen_icosphere(level);
    MeanCurvatureReport rep = mean_curvature_halfdensity(ico);
    double err = 0;
    for (double h : rep.H) err = std::max(err, std::abs(h - 1.0));
    if (prev > 0) CHECK(err < 0.45 * prev);
    if (level == 4) CHECK(err < 0.01);
    prev = err;
  }
  TriMesh disc = gen_flat_disc(6, 18);
  MeanCurvatureReport rep = mean_curvature_halfdensity(disc);
  auto bnd = disc.boundary_mask();
  for (int p = 0; p < disc.n_vertices(); ++p)
    if (!bnd[p]) CHECK(std::abs(rep.H[p]) < 1e-10);
  TriMesh big = gen_icosphere(3);
  for (auto& p : big.positions) p = p * 2.0;
  MeanCurvatureReport rep2 = mean_curvature_halfdensity(big);
  for (double h : rep2.H) CHECK(std::abs(h - 0.5) < 0.02);
}

TEST_CASE("Galerkin consistency against smooth quadrature") {
  // <phi_I, K lambda_I> approximates -int Re(conj(phi) df ^ dlambda), the
  // latter evaluated by dense Gauss quadrature over the parameter disc.
  std::vector<double> xs, ws;
  gauss01(xs, ws);
  double exact = 0;
  for (size_t a = 0; a < xs.size(); ++a) {
    double r = xs[a];
    for (size_t b = 0; b < xs.size(); ++b) {
      double s = 2 * kPi * xs[b];
      double x = r * std::cos(s), y = r * std::sin(s);
      double eps = 1e-6;
      ImVec dfx = (hemi_f(x + eps, y) - hemi_f(x - eps, y)) / (2 * eps);
      ImVec dfy = (hemi_f(x, y + eps) - hemi_f(x, y - eps)) / (2 * eps);
      Quat dlx = (test_lam(x + eps, y) - test_lam(x - eps, y)) / (2 * eps);
      Quat dly = (test_lam(x, y + eps) - test_lam(x, y - eps)) / (2 * eps);
      Quat wedge = dfx.quat() * dly - dfy.quat() * dlx;  // df ^ dl = (...) dx ^ dy
      double integrand = -(qconj(test_phi(x, y)) * wedge).w;
      exact += ws[a] * ws[b] * 2 * kPi * r * integrand;
    }
  }
  double prev = -1;
  for (int res : {8, 16, 32}) {
    TriMesh hemi = gen_hemisphere(res, 4 * res);
    DiracSystem sys = assemble(hemi);
    int n = hemi.n_vertices();
    SpinorField phi(n), lam(n);
    for (int v = 0; v < n; ++v) {
      const ImVec& p = hemi.positions[v];
      double denom = 1.0 - p.x;  // stereographic chart from the north pole
      double x = p.y / denom, y = -p.z / denom;
      phi[v] = test_phi(x, y);
      lam[v] = test_lam(x, y);
    }
    double fem = spinor_to_vector(phi).dot(sys.K * spinor_to_vector(lam));
    double err = std::abs(fem - exact);
    if (prev > 0) CHECK(err < 0.7 * prev);
    prev = err;
  }
}

TEST_CASE("degenerate face raises") {
  TriMesh bad;
  bad.positions = {{0, 0, 0}, {0, 1, 0}, {0, 2, 0}, {0, 0, 1}};
  bad.faces = {{0, 1, 2}, {0, 1, 3}};
  CHECK_THROWS_AS(assemble(bad), Error);
}
