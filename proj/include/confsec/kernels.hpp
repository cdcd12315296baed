#pragma once

// Scalar-generic geometric kernels on Eigen vectors. The model-space layer in
// geometry.hpp instantiates these with double; tests also run them on long double.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace confsec::kernels {

template <typename Scalar>
inline constexpr Scalar kTwoPi = Scalar(2) * std::numbers::pi_v<Scalar>;

/// Reduces an angle to [0, 2*pi).
template <typename Scalar>
Scalar wrap_angle(Scalar angle) {
  using std::fmod;
  Scalar wrapped = fmod(angle, kTwoPi<Scalar>);
  if (wrapped < Scalar(0)) wrapped += kTwoPi<Scalar>;
  if (wrapped >= kTwoPi<Scalar>) wrapped = Scalar(0);
  return wrapped;
}

/// Signed angle in [-pi, pi) from a to b.
template <typename Scalar>
Scalar signed_angle_difference(Scalar from, Scalar to) {
  Scalar d = wrap_angle(to - from);
  if (d >= std::numbers::pi_v<Scalar>) d -= kTwoPi<Scalar>;
  return d;
}

/// Arc length between two angles on the unit circle.
template <typename Scalar>
Scalar circle_gap(Scalar a, Scalar b) {
  using std::abs;
  Scalar d = wrap_angle(a - b);
  return std::min(d, kTwoPi<Scalar> - d);
}

/// Geodesic angle between unit vectors. The half-chord form keeps full
/// precision near 0 and pi where arccos of the inner product does not.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar great_circle_angle(const Eigen::MatrixBase<DerivedA>& p,
                                             const Eigen::MatrixBase<DerivedB>& q) {
  using std::atan2;
  using Scalar = typename DerivedA::Scalar;
  return Scalar(2) * atan2((p - q).norm(), (p + q).norm());
}

/// Quotient-geodesic angle on projective space: the smaller of the angles to q and -q.
template <typename DerivedA, typename DerivedB>
typename DerivedA::Scalar projective_angle(const Eigen::MatrixBase<DerivedA>& p,
                                           const Eigen::MatrixBase<DerivedB>& q) {
  using std::atan2;
  using Scalar = typename DerivedA::Scalar;
  const Scalar minus = (p - q).norm();
  const Scalar plus = (p + q).norm();
  return Scalar(2) * atan2(std::min(minus, plus), std::max(minus, plus));
}

/// Flips the sign so that the first coordinate with magnitude above tol is positive.
template <typename Derived>
void canonicalize_projective_sign(Eigen::MatrixBase<Derived>& v,
                                  typename Derived::Scalar tol = typename Derived::Scalar(1e-12)) {
  using std::abs;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (abs(v(i)) > tol) {
      if (v(i) < 0) v = -v;
      return;
    }
  }
}

/// The complex structure J(x1, y1, ..., xn, yn) = (-y1, x1, ..., -yn, xn) on R^{2n}.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> pair_rotation(
    const Eigen::MatrixBase<Derived>& v) {
  Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> out(v.size());
  for (Eigen::Index i = 0; i + 1 < v.size(); i += 2) {
    out(i) = -v(i + 1);
    out(i + 1) = v(i);
  }
  return out;
}

/// Constant-speed great-circle interpolation; caller guarantees q != -p.
template <typename DerivedA, typename DerivedB>
Eigen::Matrix<typename DerivedA::Scalar, Eigen::Dynamic, 1> slerp(
    const Eigen::MatrixBase<DerivedA>& p, const Eigen::MatrixBase<DerivedB>& q,
    typename DerivedA::Scalar t) {
  using std::sin;
  using Scalar = typename DerivedA::Scalar;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  const Scalar theta = great_circle_angle(p, q);
  if (theta < Scalar(1e-15)) return Vec(p);
  Vec out = (sin((Scalar(1) - t) * theta) * p + sin(t * theta) * q) / sin(theta);
  out.normalize();
  return out;
}

/// Rotation about a unit axis (Rodrigues).
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> axis_rotation(const Eigen::Matrix<Scalar, 3, 1>& unit_axis,
                                          Scalar angle) {
  return Eigen::AngleAxis<Scalar>(angle, unit_axis).toRotationMatrix();
}

/// Minimal rotation carrying unit vector a onto unit vector b, scaled by t in
/// [0,1] along the great circle. Well defined and smooth for b != -a; at b == a
/// it is the identity.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> partial_rotation_taking(const Eigen::Matrix<Scalar, 3, 1>& a,
                                                    const Eigen::Matrix<Scalar, 3, 1>& b,
                                                    Scalar t) {
  using Mat = Eigen::Matrix<Scalar, 3, 3>;
  const Eigen::Matrix<Scalar, 3, 1> w = a.cross(b);
  const Scalar s = w.norm();
  if (s < Scalar(1e-300)) return Mat::Identity();
  const Scalar theta = great_circle_angle(a, b);
  return axis_rotation<Scalar>(w / s, t * theta);
}

/// Skew matrix of a 3-vector.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> skew(const Eigen::Matrix<Scalar, 3, 1>& w) {
  Eigen::Matrix<Scalar, 3, 3> m;
  m << Scalar(0), -w.z(), w.y(), w.z(), Scalar(0), -w.x(), -w.y(), w.x(), Scalar(0);
  return m;
}

/// Rotation carrying a onto b: I + [w]x + [w]x^2 / (1 + <a,b>), with w = a x b.
template <typename Scalar>
Eigen::Matrix<Scalar, 3, 3> rotation_taking(const Eigen::Matrix<Scalar, 3, 1>& a,
                                            const Eigen::Matrix<Scalar, 3, 1>& b) {
  const Eigen::Matrix<Scalar, 3, 3> k = skew<Scalar>(a.cross(b));
  return Eigen::Matrix<Scalar, 3, 3>::Identity() + k + k * k / (Scalar(1) + a.dot(b));
}

}  // namespace confsec::kernels
