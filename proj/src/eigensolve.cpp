#include "diraclab/eigensolve.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

#include "diraclab/errors.hpp"

namespace diraclab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

SpMat shifted(const SpMat& K, const Eigen::VectorXd& mass_diag, double sigma) {
  SpMat M(K.rows(), K.cols());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(K.rows());
  for (int i = 0; i < K.rows(); ++i) trip.emplace_back(i, i, mass_diag[i]);
  M.setFromTriplets(trip.begin(), trip.end());
  return K - sigma * M;
}

// Lanczos with full reorthogonalization on a symmetric operator.
struct LanczosResult {
  std::vector<double> ritz;       // Ritz values of the OPERATOR
  Eigen::MatrixXd vectors;        // Ritz vectors (operator coordinates)
  std::vector<double> residuals;  // |beta_k * s_last| estimates
};

template <typename Op>
LanczosResult lanczos(const Op& op, int n, int steps, uint64_t seed) {
  steps = std::min(steps, n);
  Eigen::MatrixXd V(n, steps);
  Eigen::VectorXd alpha(steps), beta(steps);
  // deterministic start vector
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  uint64_t state = seed ? seed : 0x9e3779b97f4a7c15ULL;
  for (int i = 0; i < n; ++i) {
    state = state * 6364136223846793005ULL + 1442695040888963407ULL;
    v[i] = ((state >> 11) * (1.0 / 9007199254740992.0)) - 0.5;
  }
  v.normalize();
  int m = 0;
  Eigen::VectorXd w;
  for (int k = 0; k < steps; ++k) {
    V.col(k) = v;
    w = op(v);
    alpha[k] = v.dot(w);
    w -= alpha[k] * v;
    if (k > 0) w -= beta[k - 1] * V.col(k - 1);
    // full reorthogonalization, twice
    for (int pass = 0; pass < 2; ++pass)
      w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
    beta[k] = w.norm();
    m = k + 1;
    if (beta[k] < 1e-13) break;
    v = w / beta[k];
  }
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < m; ++k) {
    T(k, k) = alpha[k];
    if (k + 1 < m) T(k, k + 1) = T(k + 1, k) = beta[k];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  LanczosResult res;
  res.ritz.assign(es.eigenvalues().data(), es.eigenvalues().data() + m);
  res.vectors = V.leftCols(m) * es.eigenvectors();
  res.residuals.resize(m);
  double beta_last = (m < steps) ? 0.0 : beta[m - 1];
  for (int k = 0; k < m; ++k)
    res.residuals[k] = std::abs(beta_last * es.eigenvectors()(m - 1, k));
  return res;
}

}  // namespace

int inertia_below(const SpMat& K, const Eigen::VectorXd& mass_diag, double level) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    double jitter = attempt == 0 ? 0.0 : level * 1e-9 + 1e-9 * (attempt);
    SpMat A = shifted(K, mass_diag, level + jitter);
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success) continue;
    Eigen::VectorXd d = ldlt.vectorD();
    bool bad = false;
    int neg = 0;
    for (int i = 0; i < d.size(); ++i) {
      if (!std::isfinite(d[i]) || d[i] == 0.0) { bad = true; break; }
      if (d[i] < 0) ++neg;
    }
    if (!bad) return neg;
  }
  throw Error(ErrorCode::SolverFailure, "LDLT inertia computation failed");
}

EigenPairs dense_eigen(const Eigen::MatrixXd& K, const Eigen::VectorXd& mass_diag,
                       bool with_vectors) {
  Eigen::VectorXd isq = mass_diag.array().sqrt().inverse();
  Eigen::MatrixXd S = isq.asDiagonal() * K * isq.asDiagonal();
  S = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      S, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw Error(ErrorCode::SolverFailure, "dense symmetric eigensolve failed");
  EigenPairs out;
  out.values.assign(es.eigenvalues().data(), es.eigenvalues().data() + K.rows());
  if (with_vectors) out.vectors = isq.asDiagonal() * es.eigenvectors();
  return out;
}

EigenPairs window_eigen(const SpMat& K, const Eigen::VectorXd& mass_diag, double a, double b,
                        bool with_vectors, int max_iter) {
  if (!(a < b)) throw Error(ErrorCode::ConfigError, "empty window");
  const int n = K.rows();
  const int expected = inertia_below(K, mass_diag, b) - inertia_below(K, mass_diag, a);
  EigenPairs out;
  if (expected == 0) {
    out.vectors.resize(n, 0);
    return out;
  }

  Eigen::VectorXd sq = mass_diag.array().sqrt();
  double sigma = 0.5 * (a + b);
  for (int attempt = 0; attempt < 4; ++attempt) {
    SpMat A = shifted(K, mass_diag, sigma);
    Eigen::SimplicialLDLT<SpMat> ldlt(A);
    if (ldlt.info() != Eigen::Success) {
      sigma += (b - a) * 1e-3 * (attempt + 1);
      continue;
    }
    // whitened shift-invert operator M^{1/2} (K - sigma M)^{-1} M^{1/2}
    auto op = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
      Eigen::VectorXd y = sq.asDiagonal() * x;
      Eigen::VectorXd z = ldlt.solve(y);
      return sq.asDiagonal() * z;
    };
    int steps = std::min(n, std::max(4 * expected + 40, 80));
    for (; steps <= max_iter; steps = std::min(2 * steps, max_iter + 1)) {
      LanczosResult lr = lanczos(op, n, steps, 12345 + attempt);
      // convert Ritz values of the resolvent back to pencil eigenvalues
      std::vector<std::pair<double, int>> inside;
      for (size_t k = 0; k < lr.ritz.size(); ++k) {
        if (std::abs(lr.ritz[k]) < 1e-14) continue;
        double mu = sigma + 1.0 / lr.ritz[k];
        if (mu >= a && mu <= b && lr.residuals[k] < 1e-9 * std::abs(lr.ritz[k]))
          inside.push_back({mu, static_cast<int>(k)});
      }
      if (static_cast<int>(inside.size()) == expected) {
        std::sort(inside.begin(), inside.end());
        for (auto& [mu, k] : inside) out.values.push_back(mu);
        if (with_vectors) {
          out.vectors.resize(n, expected);
          for (int c = 0; c < expected; ++c) {
            // whitened Ritz vector -> generalized eigenvector
            Eigen::VectorXd y = lr.vectors.col(inside[c].second);
            out.vectors.col(c) = y.array() / sq.array();
          }
        }
        return out;
      }
      if (steps >= std::min(n, max_iter)) break;
    }
    sigma += (b - a) * 1e-3 * (attempt + 1);
  }
  throw Error(ErrorCode::SolverFailure,
              "shift-invert iteration did not recover the inertia-certified window count");
}

EigenPairs smallest_eigen_spd(const SpMat& S, int count, int max_iter) {
  const int n = S.rows();
  count = std::min(count, n);
  double scale = 0.0;
  for (int i = 0; i < n; ++i) scale = std::max(scale, std::abs(S.coeff(i, i)));
  if (scale == 0.0) scale = 1.0;
  double sigma = -1e-8 * scale;

  SpMat I(n, n);
  I.setIdentity();
  SpMat A = S - sigma * I;
  Eigen::SimplicialLDLT<SpMat> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw Error(ErrorCode::SolverFailure, "LDLT of shifted normal matrix failed");
  auto op = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd { return ldlt.solve(x); };

  int steps = std::min(n, std::max(4 * count + 60, 100));
  EigenPairs out;
  for (; steps <= max_iter; steps = std::min(2 * steps, max_iter + 1)) {
    LanczosResult lr = lanczos(op, n, steps, 777);
    // largest resolvent Ritz values correspond to the smallest of S
    std::vector<std::pair<double, int>> pairs;
    for (size_t k = 0; k < lr.ritz.size(); ++k) {
      if (lr.ritz[k] <= 0) continue;  // behind the shift; not a small eigenvalue
      pairs.push_back({sigma + 1.0 / lr.ritz[k], static_cast<int>(k)});
    }
    std::sort(pairs.begin(), pairs.end());
    if (static_cast<int>(pairs.size()) >= count) {
      bool converged = true;
      for (int c = 0; c < count; ++c) {
        const auto& [val, k] = pairs[c];
        // Rayleigh quotient refinement on S for accuracy near the floor
        Eigen::VectorXd v = lr.vectors.col(k);
        double rq = v.dot(S * v) / v.squaredNorm();
        double res = (S * v - rq * v).norm() / v.norm();
        if (res > 1e-7 * scale && steps < max_iter) converged = false;
      }
      if (converged || steps >= max_iter) {
        for (int c = 0; c < count; ++c) {
          Eigen::VectorXd v = lr.vectors.col(pairs[c].second);
          double rq = v.dot(S * v) / v.squaredNorm();
          out.values.push_back(rq);
        }
        std::sort(out.values.begin(), out.values.end());
        return out;
      }
    }
    if (steps >= std::min(n, max_iter)) break;
  }
  throw Error(ErrorCode::SolverFailure, "smallest-eigenvalue iteration did not converge");
}

}  // namespace diraclab
