#include "diraclab/spectral.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace diraclab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat diag_sparse(const Eigen::VectorXd& d) {
  SpMat m(d.size(), d.size());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(d.size());
  for (int i = 0; i < d.size(); ++i) trip.emplace_back(i, i, d[i]);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

}  // namespace

ConstrainedSystem constrain(const DiracSystem& sys, const ConstraintBasis& basis) {
  SpMat KP = sys.K * basis.P;
  SpMat raw = SpMat(basis.P.transpose()) * KP;
  SpMat rawT = raw.transpose();
  ConstrainedSystem out;
  out.K = 0.5 * (raw + rawT);
  double denom = raw.norm();
  out.rel_asymmetry = denom > 0 ? (raw - rawT).norm() / denom : 0.0;
  SpMat MP = diag_sparse(sys.mass) * basis.P;
  SpMat Mc = SpMat(basis.P.transpose()) * MP;
  out.mass = Mc.diagonal();
  return out;
}

Spectrum eigen_constrained(const DiracSystem& sys, const ConstraintBasis& basis,
                           const EigenRequest& request, int dense_threshold,
                           double asymmetry_tol) {
  ConstrainedSystem con = constrain(sys, basis);
  if (con.rel_asymmetry > asymmetry_tol)
    throw Error(ErrorCode::AsymmetryTooLarge,
                "constrained form asymmetry " + std::to_string(con.rel_asymmetry) +
                    " (is the boundary condition self-adjoint?)");
  const int m = con.K.rows();

  EigenPairs pairs;
  double wa = request.a, wb = request.b;
  if (m <= dense_threshold) {
    pairs = dense_eigen(Eigen::MatrixXd(con.K), con.mass, true);
    if (request.kind == EigenRequest::Kind::Count) {
      // keep the `count` eigenvalues nearest the target
      std::vector<int> idx(pairs.values.size());
      for (size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
      std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
        return std::abs(pairs.values[a] - request.target) <
               std::abs(pairs.values[b] - request.target);
      });
      idx.resize(std::min<size_t>(request.count, idx.size()));
      std::sort(idx.begin(), idx.end());
      EigenPairs sel;
      sel.vectors.resize(pairs.vectors.rows(), idx.size());
      for (size_t k = 0; k < idx.size(); ++k) {
        sel.values.push_back(pairs.values[idx[k]]);
        sel.vectors.col(k) = pairs.vectors.col(idx[k]);
      }
      pairs = std::move(sel);
      wa = pairs.values.front();
      wb = pairs.values.back();
    } else {
      EigenPairs sel;
      std::vector<int> keep;
      for (size_t i = 0; i < pairs.values.size(); ++i)
        if (pairs.values[i] >= request.a && pairs.values[i] <= request.b)
          keep.push_back(static_cast<int>(i));
      sel.vectors.resize(pairs.vectors.rows(), keep.size());
      for (size_t k = 0; k < keep.size(); ++k) {
        sel.values.push_back(pairs.values[keep[k]]);
        sel.vectors.col(k) = pairs.vectors.col(keep[k]);
      }
      pairs = std::move(sel);
    }
  } else {
    if (request.kind == EigenRequest::Kind::Count) {
      // widen a window around the target until it holds enough eigenvalues
      double half = 1.0;
      for (int it = 0; it < 40; ++it) {
        int n_in = inertia_below(con.K, con.mass, request.target + half) -
                   inertia_below(con.K, con.mass, request.target - half);
        if (n_in >= request.count) break;
        half *= 1.5;
      }
      pairs = window_eigen(con.K, con.mass, request.target - half, request.target + half, true);
      while (static_cast<int>(pairs.values.size()) > request.count) {
        // drop the endpoint farther from the target
        double lo = std::abs(pairs.values.front() - request.target);
        double hi = std::abs(pairs.values.back() - request.target);
        int drop = lo > hi ? 0 : static_cast<int>(pairs.values.size()) - 1;
        pairs.values.erase(pairs.values.begin() + drop);
        Eigen::MatrixXd v(pairs.vectors.rows(), pairs.vectors.cols() - 1);
        int c = 0;
        for (int k = 0; k < pairs.vectors.cols(); ++k)
          if (k != drop) v.col(c++) = pairs.vectors.col(k);
        pairs.vectors = std::move(v);
      }
      if (!pairs.values.empty()) {
        wa = pairs.values.front();
        wb = pairs.values.back();
      }
    } else {
      pairs = window_eigen(con.K, con.mass, request.a, request.b, true);
    }
  }

  Spectrum spec;
  spec.eigenvalues = pairs.values;
  spec.window_a = wa;
  spec.window_b = wb;
  spec.rel_asymmetry = con.rel_asymmetry;
  spec.vectors.resize(basis.P.rows(), pairs.vectors.cols());
  for (int k = 0; k < pairs.vectors.cols(); ++k) {
    Eigen::VectorXd x = pairs.vectors.col(k);
    // refine and re-check the residual in constrained coordinates
    double mu = pairs.values[k];
    Eigen::VectorXd r = con.K * x - mu * con.mass.asDiagonal() * x;
    double rel = r.norm() / std::max(1e-300, (con.mass.asDiagonal() * x).norm());
    if (rel > 1e-8)
      throw Error(ErrorCode::SolverFailure,
                  "eigenpair residual " + std::to_string(rel) + " exceeds 1e-8");
    spec.vectors.col(k) = basis.P * x;
  }
  return spec;
}

KernelReport kernel_dim(const DiracSystem& sys, const ConstraintBasis& basis, double threshold) {
  if (threshold <= 0) throw Error(ErrorCode::ConfigError, "threshold must be positive");
  // whitened rectangular operator: full (mass-normalized) test space against
  // the mass-orthonormal constrained trial space
  Eigen::VectorXd isq_full = sys.mass.array().sqrt().inverse();
  SpMat MP = diag_sparse(sys.mass) * basis.P;
  SpMat Mc = SpMat(basis.P.transpose()) * MP;
  Eigen::VectorXd mc = Mc.diagonal();
  Eigen::VectorXd isq_c = mc.array().sqrt().inverse();
  SpMat A = diag_sparse(isq_full) * SpMat(sys.K * basis.P) * diag_sparse(isq_c);
  const int cols = A.cols();

  KernelReport rep;
  rep.threshold = threshold;
  const int kTail = 24;
  if (cols <= 1200) {
    Eigen::MatrixXd Ad(A);
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Ad);
    Eigen::VectorXd sv = svd.singularValues();
    std::vector<double> s(sv.data(), sv.data() + sv.size());
    std::sort(s.begin(), s.end());
    rep.singular_values.assign(s.begin(), s.begin() + std::min<size_t>(s.size(), kTail));
  } else {
    SpMat S = SpMat(A.transpose()) * A;
    int count = std::min(kTail, cols);
    EigenPairs tail = smallest_eigen_spd(S, count);
    for (double v : tail.values) rep.singular_values.push_back(std::sqrt(std::max(0.0, v)));
    // certify the below-threshold count by inertia of S - tau^2 I
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(cols);
    int certified = inertia_below(S, ones, threshold * threshold);
    int counted = 0;
    for (double v : rep.singular_values)
      if (v < threshold) ++counted;
    if (certified != counted) {
      if (certified > static_cast<int>(rep.singular_values.size()))
        throw Error(ErrorCode::AmbiguousRank,
                    "kernel candidate dimension exceeds the computed singular tail");
      throw Error(ErrorCode::SolverFailure, "singular tail disagrees with inertia count");
    }
  }

  const auto& s = rep.singular_values;
  int dim = 0;
  while (dim < static_cast<int>(s.size()) && s[dim] < threshold) ++dim;
  if (dim == static_cast<int>(s.size()))
    throw Error(ErrorCode::AmbiguousRank, "all computed singular values fall below the threshold");
  if (dim == 0) {
    rep.accepted_dim = 0;
    rep.gap_ratio = s[0] / threshold;
    if (rep.gap_ratio < 10.0)
      throw Error(ErrorCode::AmbiguousRank,
                  "smallest singular value sits within 10x of the threshold");
    return rep;
  }
  rep.accepted_dim = dim;
  double base = std::max(s[dim - 1], 1e-300);
  rep.gap_ratio = s[dim] / base;
  if (rep.gap_ratio < 100.0)
    throw Error(ErrorCode::AmbiguousRank,
                "no 100x singular-value gap at the candidate kernel dimension");
  return rep;
}

IndexReport fredholm_index(const TriMesh& mesh, const BoundaryCondition& bc, double threshold) {
  CertificationResult ell = check_elliptic(mesh, bc);
  if (!ell.ok)
    throw Error(ErrorCode::NotElliptic,
                "index undefined: ellipticity margin " + std::to_string(ell.value));
  DiracSystem sys = assemble(mesh);
  IndexReport rep;
  rep.ker_report = kernel_dim(sys, constraint_basis(mesh, bc), threshold);
  rep.coker_report = kernel_dim(sys, constraint_basis(mesh, adjoint_bc(mesh, bc)), threshold);
  rep.ker_dim = rep.ker_report.accepted_dim;
  rep.coker_dim = rep.coker_report.accepted_dim;
  rep.index = rep.ker_dim - rep.coker_dim;
  rep.deg = deg_V(mesh, bc);
  return rep;
}

namespace {

struct FlowEngine {
  const TriMesh& mesh;
  const BCFamily& family;
  const FlowOptions& opts;
  DiracSystem sys;
  std::map<double, std::vector<double>> cache;
  FlowResult result;
  double min_step;

  FlowEngine(const TriMesh& m, const BCFamily& f, const FlowOptions& o)
      : mesh(m), family(f), opts(o), sys(assemble(m)) {
    min_step = (f.t.back() - f.t.front()) * o.min_step_frac;
  }

  const std::vector<double>& solve(double t) {
    auto it = cache.find(t);
    if (it != cache.end()) return it->second;
    BoundaryCondition bc = family.at(t);
    ConstraintBasis basis = constraint_basis(mesh, bc);
    ConstrainedSystem con = constrain(sys, basis);
    result.max_rel_asymmetry = std::max(result.max_rel_asymmetry, con.rel_asymmetry);
    EigenPairs pairs = window_eigen(con.K, con.mass, opts.level - opts.halfwidth,
                                    opts.level + opts.halfwidth, false);
    return cache.emplace(t, std::move(pairs.values)).first->second;
  }

  // crossings of `level` between matched sorted lists
  void count_crossings(double t0, double t1, const std::vector<double>& E0,
                       const std::vector<double>& E1) {
    for (size_t i = 0; i < E0.size(); ++i) {
      int dir = 0;
      if (E0[i] < opts.level && E1[i] >= opts.level) dir = +1;
      if (E0[i] >= opts.level && E1[i] < opts.level) dir = -1;
      if (dir != 0) {
        result.crossings.push_back({0.5 * (t0 + t1), dir});
        // flag crossings that are not spectrally simple inside the window
        for (size_t j = 0; j < E0.size(); ++j) {
          if (j == i) continue;
          if (std::abs(E0[j] - E0[i]) < 1e-9 * (1 + std::abs(E0[i])))
            result.near_degenerate = true;
        }
      }
    }
  }

  // match lists of different lengths by trimming entries near the window edges
  bool trim_to_match(std::vector<double>& E0, std::vector<double>& E1) {
    double lo = opts.level - opts.halfwidth, hi = opts.level + opts.halfwidth;
    double band = opts.edge_band * opts.halfwidth;
    auto near_edge = [&](double v) { return v - lo < band || hi - v < band; };
    while (E0.size() > E1.size()) {
      bool front_ok = near_edge(E0.front()), back_ok = near_edge(E0.back());
      if (!front_ok && !back_ok) return false;
      // drop the entry closer to its edge
      if (!back_ok || (front_ok && E0.front() - lo < hi - E0.back()))
        E0.erase(E0.begin());
      else
        E0.pop_back();
    }
    while (E1.size() > E0.size()) {
      bool front_ok = near_edge(E1.front()), back_ok = near_edge(E1.back());
      if (!front_ok && !back_ok) return false;
      if (!back_ok || (front_ok && E1.front() - lo < hi - E1.back()))
        E1.erase(E1.begin());
      else
        E1.pop_back();
    }
    return true;
  }

  void process(double t0, double t1) {
    const std::vector<double>& e0 = solve(t0);
    const std::vector<double>& e1 = solve(t1);
    if (e0.size() == e1.size()) {
      double max_jump = 0;
      for (size_t i = 0; i < e0.size(); ++i)
        max_jump = std::max(max_jump, std::abs(e0[i] - e1[i]));
      if (max_jump > 0.5 * opts.halfwidth && (t1 - t0) > min_step) {
        double tm = 0.5 * (t0 + t1);
        process(t0, tm);
        process(tm, t1);
        return;
      }
      count_crossings(t0, t1, e0, e1);
      return;
    }
    if ((t1 - t0) > min_step) {
      double tm = 0.5 * (t0 + t1);
      process(t0, tm);
      process(tm, t1);
      return;
    }
    // minimum step reached: the population change must be explainable by
    // eigenvalues drifting across the window edges
    std::vector<double> a = e0, b = e1;
    if (!trim_to_match(a, b))
      throw Error(ErrorCode::WindowLeak,
                  "window population change not attributable to edge traffic at minimum step");
    count_crossings(t0, t1, a, b);
  }
};

}  // namespace

FlowResult spectral_flow(const TriMesh& mesh, const BCFamily& family, const FlowOptions& opts) {
  if (family.t.size() < 2) throw Error(ErrorCode::ConfigError, "family needs at least 2 samples");
  for (size_t k = 0; k < family.samples.size(); ++k) {
    CertificationResult ell = check_elliptic(mesh, family.samples[k], opts.cert_tol);
    if (!ell.ok)
      throw Error(ErrorCode::NotElliptic,
                  "family sample " + std::to_string(k) + " not elliptic");
    CertificationResult sa = check_selfadjoint(mesh, family.samples[k], opts.cert_tol);
    if (!sa.ok)
      throw Error(ErrorCode::NotSelfAdjoint,
                  "family sample " + std::to_string(k) + " not self-adjoint");
  }
  FlowEngine engine(mesh, family, opts);
  std::vector<double> ts = family.t;
  if (opts.reverse) std::reverse(ts.begin(), ts.end());
  for (size_t k = 0; k + 1 < ts.size(); ++k) {
    double t0 = std::min(ts[k], ts[k + 1]);
    double t1 = std::max(ts[k], ts[k + 1]);
    if (!opts.reverse)
      engine.process(t0, t1);
    else {
      // traverse backwards: compare in reversed order
      const std::vector<double>& e0 = engine.solve(ts[k]);
      const std::vector<double>& e1 = engine.solve(ts[k + 1]);
      if (e0.size() == e1.size()) {
        engine.count_crossings(ts[k], ts[k + 1], e0, e1);
      } else {
        std::vector<double> a = e0, b = e1;
        if (!engine.trim_to_match(a, b))
          throw Error(ErrorCode::WindowLeak, "population change in reversed traversal");
        engine.count_crossings(ts[k], ts[k + 1], a, b);
      }
    }
  }
  FlowResult& res = engine.result;
  res.level = opts.level;
  res.halfwidth = opts.halfwidth;
  res.t_samples = family.t;
  for (double t : family.t) res.tracks.push_back(engine.solve(t));
  res.sf = 0;
  for (const auto& c : res.crossings) res.sf += c.dir;
  return res;
}

ModeReport fourier_decompose(const DiracSystem& sys, const Spectrum& spectrum, double mu,
                             double cluster_tol) {
  const TriMesh& mesh = *sys.mesh;
  if (mesh.rotation_perm.empty() || mesh.rot_order < 3)
    throw Error(ErrorCode::NoSymmetry, "mesh carries no exact rotational symmetry");
  const double theta = 2.0 * 3.14159265358979323846 / mesh.rot_order;

  std::vector<int> members;
  double lo = mu, hi = mu;
  for (size_t k = 0; k < spectrum.eigenvalues.size(); ++k) {
    if (std::abs(spectrum.eigenvalues[k] - mu) <= cluster_tol) {
      members.push_back(static_cast<int>(k));
      lo = std::min(lo, spectrum.eigenvalues[k]);
      hi = std::max(hi, spectrum.eigenvalues[k]);
    }
  }
  if (members.empty())
    throw Error(ErrorCode::ClusterSplit, "no eigenvalues within cluster tolerance of mu");
  double width = std::max(hi - lo, 1e-12);
  for (double v : spectrum.eigenvalues) {
    if (std::abs(v - mu) <= cluster_tol) continue;
    double sep = v < lo ? lo - v : v - hi;
    if (sep < 10.0 * width)
      throw Error(ErrorCode::ClusterSplit, "cluster not separated from neighbors by 10x width");
  }

  const int n = mesh.n_vertices();
  const int k = static_cast<int>(members.size());
  Eigen::MatrixXd X(4 * n, k);
  for (int c = 0; c < k; ++c) X.col(c) = spectrum.vectors.col(members[c]);

  double half = theta / 2;
  Eigen::Matrix4d L = left_mul_matrix(Quat{std::cos(half), std::sin(half), 0, 0});
  Eigen::Matrix4d R = right_mul_matrix(Quat{std::cos(half), -std::sin(half), 0, 0});
  auto act = [&](const Eigen::MatrixXd& Y, bool two_sided) {
    Eigen::MatrixXd out(Y.rows(), Y.cols());
    for (int v = 0; v < n; ++v) {
      int w = mesh.rotation_perm[v];
      if (two_sided)
        out.middleRows<4>(4 * v) = L * R * Y.middleRows<4>(4 * w);
      else
        out.middleRows<4>(4 * v) = L * Y.middleRows<4>(4 * w);
    }
    return out;
  };
  Eigen::MatrixXd MX = sys.mass.asDiagonal() * X;
  Eigen::MatrixXd U_E = MX.transpose() * act(X, true);
  Eigen::MatrixXd W_E = MX.transpose() * act(X, false);
  if ((W_E.transpose() * W_E - Eigen::MatrixXd::Identity(k, k)).norm() > 1e-5 * k)
    throw Error(ErrorCode::NoSymmetry,
                "rotation action does not preserve the eigenspace (asymmetric setup?)");

  ModeReport rep;
  rep.cluster_width = width;
  {
    Eigen::EigenSolver<Eigen::MatrixXd> es(U_E);
    for (int c = 0; c < k; ++c)
      rep.u_angles.push_back(std::atan2(es.eigenvalues()[c].imag(), es.eigenvalues()[c].real()));
    std::sort(rep.u_angles.begin(), rep.u_angles.end());
  }

  Eigen::EigenSolver<Eigen::MatrixXd> es(W_E);
  std::map<int, int> mode_mult;
  std::map<int, Eigen::VectorXd> mode_rep;
  rep.column_mode.resize(k);
  for (int c = 0; c < k; ++c) {
    double ang = std::abs(std::atan2(es.eigenvalues()[c].imag(), es.eigenvalues()[c].real()));
    int l = static_cast<int>(std::lround(ang / theta - 0.5));
    if (std::abs(ang / theta - 0.5 - l) > 0.1)
      throw Error(ErrorCode::NoSymmetry, "rotation angle off the half-integer grid");
    rep.column_mode[c] = l;
    mode_mult[l] += 1;
    if (!mode_rep.count(l)) {
      Eigen::VectorXd real_part = es.eigenvectors().col(c).real();
      if (real_part.norm() < 1e-8) real_part = es.eigenvectors().col(c).imag();
      Eigen::VectorXd vec = X * real_part;
      mode_rep[l] = vec / std::sqrt(vec.dot(sys.mass.asDiagonal() * vec));
    }
  }
  rep.representatives.resize(4 * n, mode_mult.size());
  int c = 0;
  for (const auto& [l, mult] : mode_mult) {
    rep.modes.push_back(l);
    rep.multiplicities.push_back(mult);
    rep.representatives.col(c++) = mode_rep[l];
  }
  return rep;
}

bool index_lemma_check(int dim_H, int dim_H1, int dim_H2, uint64_t seed) {
  if (dim_H1 > dim_H)
    throw Error(ErrorCode::ConfigError, "B cannot be surjective with dim_H1 > dim_H");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(dim_H1, dim_H), C(dim_H2, dim_H);
  for (int r = 0; r < dim_H1; ++r)
    for (int c = 0; c < dim_H; ++c) B(r, c) = g(rng);
  for (int r = 0; r < dim_H2; ++r)
    for (int c = 0; c < dim_H; ++c) C(r, c) = g(rng);

  // rank-repair B to a certainly surjective map
  {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Eigen::VectorXd s = svd.singularValues();
    double top = s.maxCoeff();
    if (top == 0) top = 1.0;
    for (int i = 0; i < s.size(); ++i) s[i] = std::max(s[i], 0.2 * top);
    B = svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
  }

  auto rank_of = [](const Eigen::MatrixXd& M) {
    if (M.rows() == 0 || M.cols() == 0) return 0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
    double top = svd.singularValues().maxCoeff();
    if (top == 0) return 0;
    int r = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
      if (svd.singularValues()[i] > 1e-10 * top) ++r;
    return r;
  };

  Eigen::MatrixXd A(dim_H1 + dim_H2, dim_H);
  A.topRows(dim_H1) = B;
  A.bottomRows(dim_H2) = C;
  int rank_A = rank_of(A);
  int ker_A = dim_H - rank_A;
  int coker_A = dim_H1 + dim_H2 - rank_A;

  // basis of ker(B) from the full SVD
  Eigen::JacobiSVD<Eigen::MatrixXd> svdB(B, Eigen::ComputeFullV);
  int rank_B = rank_of(B);
  Eigen::MatrixXd kerB = svdB.matrixV().rightCols(dim_H - rank_B);
  Eigen::MatrixXd Ck = C * kerB;
  int rank_Ck = rank_of(Ck);
  int ker_C = (dim_H - rank_B) - rank_Ck;
  int coker_C = dim_H2 - rank_Ck;

  return ker_A == ker_C && coker_A == coker_C;
}

}  // namespace diraclab
