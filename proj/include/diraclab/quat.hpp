#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <utility>

#include "diraclab/errors.hpp"

namespace diraclab {

/// Quaternion w + x*i + y*j + z*k.  The basis order (1,i,j,k) is fixed
/// globally; every serialization and 4x4 realification uses it.
struct Quat {
  double w = 0, x = 0, y = 0, z = 0;

  constexpr Quat() = default;
  constexpr Quat(double w_, double x_, double y_, double z_) : w(w_), x(x_), y(y_), z(z_) {}

  static constexpr Quat one() { return {1, 0, 0, 0}; }
  static constexpr Quat i() { return {0, 1, 0, 0}; }
  static constexpr Quat j() { return {0, 0, 1, 0}; }
  static constexpr Quat k() { return {0, 0, 0, 1}; }

  constexpr Quat operator+(const Quat& o) const { return {w + o.w, x + o.x, y + o.y, z + o.z}; }
  constexpr Quat operator-(const Quat& o) const { return {w - o.w, x - o.x, y - o.y, z - o.z}; }
  constexpr Quat operator-() const { return {-w, -x, -y, -z}; }
  constexpr Quat operator*(double s) const { return {w * s, x * s, y * s, z * s}; }
  constexpr Quat operator/(double s) const { return {w / s, x / s, y / s, z / s}; }

  double norm2() const { return w * w + x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }

  Eigen::Vector4d coeffs() const { return {w, x, y, z}; }
  static Quat from_coeffs(const Eigen::Vector4d& c) { return {c[0], c[1], c[2], c[3]}; }
};

inline constexpr Quat operator*(double s, const Quat& q) { return q * s; }

/// Hamilton product with ij = k, i^2 = j^2 = -1.  For imaginary a, b this
/// equals -<a,b> + a x b.
inline constexpr Quat qmul(const Quat& a, const Quat& b) {
  return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
          a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
          a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
          a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

inline constexpr Quat operator*(const Quat& a, const Quat& b) { return qmul(a, b); }

inline constexpr Quat qconj(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline Quat qinv(const Quat& q) {
  double n2 = q.norm2();
  if (n2 < 1e-28) throw Error(ErrorCode::ZeroSpinor, "inverse of (near-)zero quaternion");
  return qconj(q) / n2;
}

inline double qdot(const Quat& a, const Quat& b) {
  return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Imaginary quaternion, identified with a point of Euclidean 3-space.
struct ImVec {
  double x = 0, y = 0, z = 0;

  constexpr ImVec() = default;
  constexpr ImVec(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  constexpr Quat quat() const { return {0, x, y, z}; }

  constexpr ImVec operator+(const ImVec& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr ImVec operator-(const ImVec& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr ImVec operator-() const { return {-x, -y, -z}; }
  constexpr ImVec operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr ImVec operator/(double s) const { return {x / s, y / s, z / s}; }

  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }

  Eigen::Vector3d vec() const { return {x, y, z}; }
  static ImVec from_vec(const Eigen::Vector3d& v) { return {v[0], v[1], v[2]}; }
};

inline constexpr ImVec operator*(double s, const ImVec& v) { return v * s; }

inline double dot(const ImVec& a, const ImVec& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline constexpr ImVec cross(const ImVec& a, const ImVec& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline ImVec im(const Quat& q) { return {q.x, q.y, q.z}; }

inline ImVec normalized(const ImVec& v) {
  double n = v.norm();
  if (n < 1e-300) throw Error(ErrorCode::DegenerateFrame, "cannot normalize zero vector");
  return v / n;
}

/// Unit imaginary quaternion; squared as a quaternion it equals -1.
struct UnitImVec {
  ImVec v;

  UnitImVec() : v(1, 0, 0) {}
  explicit UnitImVec(const ImVec& u, double tol = 1e-12) : v(u) {
    if (std::abs(u.norm() - 1.0) > tol)
      throw Error(ErrorCode::ZeroSpinor, "vector is not unit length");
  }
  static UnitImVec from(const ImVec& u) { return UnitImVec(normalized(u), 1e-9); }

  Quat quat() const { return v.quat(); }
  operator ImVec() const { return v; }
};

/// Realification of left multiplication: left_mul_matrix(q) * p_hat gives the
/// coordinates of q*p in the (1,i,j,k) order.
inline Eigen::Matrix4d left_mul_matrix(const Quat& q) {
  Eigen::Matrix4d m;
  m << q.w, -q.x, -q.y, -q.z,
       q.x,  q.w, -q.z,  q.y,
       q.y,  q.z,  q.w, -q.x,
       q.z, -q.y,  q.x,  q.w;
  return m;
}

/// Realification of right multiplication: right_mul_matrix(q) * p_hat = p*q.
inline Eigen::Matrix4d right_mul_matrix(const Quat& q) {
  Eigen::Matrix4d m;
  m << q.w, -q.x, -q.y, -q.z,
       q.x,  q.w,  q.z, -q.y,
       q.y, -q.z,  q.w,  q.x,
       q.z,  q.y, -q.x,  q.w;
  return m;
}

/// The similarity x -> conj(lambda) x lambda of 3-space; |result| = |lambda|^2 |x|.
inline ImVec similarity(const Quat& lambda, const ImVec& x) {
  if (lambda.norm() < 1e-14) throw Error(ErrorCode::ZeroSpinor, "similarity with zero spinor");
  return im(qconj(lambda) * x.quat() * lambda);
}

/// Orthonormal real basis (b1, b2) of the plane E' = { lambda : V lambda = lambda Vt }.
/// b1 = normalize(V + Vt) away from Vt = -V; in the degenerate case b1 is the unit
/// imaginary vector obtained from the coordinate axis least aligned with V.
/// b2 = normalize(V * b1) always lies in E' again.
inline std::pair<Quat, Quat> plane_basis(const UnitImVec& V, const UnitImVec& Vt) {
  const ImVec sum = V.v + Vt.v;
  Quat b1;
  if (sum.norm() > 1e-8) {
    b1 = sum.quat() / sum.norm();
  } else {
    // least-aligned coordinate axis, V projected out
    const ImVec axes[3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    int best = 0;
    double best_align = std::abs(dot(axes[0], V.v));
    for (int a = 1; a < 3; ++a) {
      double align = std::abs(dot(axes[a], V.v));
      if (align < best_align) {
        best = a;
        best_align = align;
      }
    }
    ImVec w = axes[best] - V.v * dot(axes[best], V.v);
    b1 = normalized(w).quat();
  }
  Quat b2 = V.quat() * b1;
  b2 = b2 / b2.norm();
  return {b1, b2};
}

/// Residual |V*lambda - lambda*Vt|; zero iff lambda lies in E'(V, Vt).
inline double plane_membership(const UnitImVec& V, const UnitImVec& Vt, const Quat& lambda) {
  return (V.quat() * lambda - lambda * Vt.quat()).norm();
}

inline Quat slerp(const Quat& a, const Quat& b, double t) {
  double cosang = qdot(a, b) / (a.norm() * b.norm());
  cosang = std::clamp(cosang, -1.0, 1.0);
  double ang = std::acos(cosang);
  if (ang < 1e-9) {
    Quat r = a * (1 - t) + b * t;
    return r / r.norm();
  }
  double s = std::sin(ang);
  Quat r = a * (std::sin((1 - t) * ang) / s) + b * (std::sin(t * ang) / s);
  return r / r.norm();
}

/// Spherical interpolation between unit imaginary vectors (used for boundary
/// condition families); antipodal inputs are rejected.
inline UnitImVec slerp(const UnitImVec& a, const UnitImVec& b, double t) {
  double cosang = std::clamp(dot(a.v, b.v), -1.0, 1.0);
  if (cosang < -1.0 + 1e-12)
    throw Error(ErrorCode::InsufficientResolution, "slerp between antipodal directions");
  double ang = std::acos(cosang);
  if (ang < 1e-9) {
    return UnitImVec(normalized(a.v * (1 - t) + b.v * t), 1e-9);
  }
  double s = std::sin(ang);
  ImVec r = a.v * (std::sin((1 - t) * ang) / s) + b.v * (std::sin(t * ang) / s);
  return UnitImVec(normalized(r), 1e-9);
}

}  // namespace diraclab
