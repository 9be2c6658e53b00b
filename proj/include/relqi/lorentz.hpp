#pragma once

// Proper orthochronous Lorentz transformations in two synchronized forms: the
// 4×4 matrix acting on (t, x, y, z) with metric diag(+,-,-,-), and the SL(2,C)
// double cover acting on X = t·1 + x⃗·σ⃗ as X ↦ A X A†.
//
// Conventions (natural units, m = c = ħ = 1):
//   boost with rapidity ξ along n̂:    A = exp((ξ/2) n̂·σ⃗)
//   rotation by θ about n̂:            A = exp(-i(θ/2) n̂·σ⃗)
// The ±A ambiguity is fixed by making the entry of largest modulus have its
// argument in (-π/2, π/2].

#include <Eigen/Dense>

#include "relqi/qmath.hpp"

namespace relqi {

using Vec3 = Eigen::Vector3d;
using Mat4 = Eigen::Matrix4d;

struct FourVector {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 spatial() const { return {x, y, z}; }
  Eigen::Vector4d as_vector() const { return {t, x, y, z}; }
  double minkowski_square() const { return t * t - x * x - y * y - z * z; }

  static FourVector from_vector(const Eigen::Vector4d& v) { return {v(0), v(1), v(2), v(3)}; }
  /// Massive on-shell momentum (m = 1) with the given spatial part.
  static FourVector on_shell(const Vec3& p);
  static FourVector rest() { return {1.0, 0.0, 0.0, 0.0}; }
};

inline constexpr double kShellTolerance = 1e-10;

bool is_massive_on_shell(const FourVector& p);

class LorentzElement {
 public:
  /// Builds from a double-cover matrix; det A must be 1 within 1e-10.
  static LorentzElement from_sl2(const Mat2c& a);
  static LorentzElement identity();

  const Mat4& mat4() const { return mat4_; }
  const Mat2c& sl2() const { return sl2_; }

  FourVector apply(const FourVector& x) const;
  /// X ↦ A X A† evaluated in the spinor form.
  FourVector apply_spinor(const FourVector& x) const;

  LorentzElement compose(const LorentzElement& rhs) const;  // this ∘ rhs
  LorentzElement inverse() const;

 private:
  LorentzElement(const Mat2c& a, const Mat4& m) : sl2_(a), mat4_(m) {}
  Mat2c sl2_;
  Mat4 mat4_;
};

/// Picks the representative of ±A fixed by the sign convention above.
Mat2c canonicalize_sign(const Mat2c& a);

/// 4×4 Lorentz matrix of a double-cover element: Λ^μ_ν = ½ tr(σ_μ A σ_ν A†).
Mat4 lorentz_matrix_from_sl2(const Mat2c& a);

Mat2c spinor_of(const FourVector& x);  // t·1 + x⃗·σ⃗
FourVector vector_of(const Mat2c& x);

/// Pure boost to velocity v (|v| < 1 - 1e-12).
LorentzElement boost_from_velocity(const Vec3& v);
LorentzElement boost_from_rapidity(const Vec3& direction, double rapidity);
LorentzElement rotation(const Vec3& axis, double angle);

/// Pure boost taking the rest momentum (1,0,0,0) to the on-shell momentum p.
/// The spinor form is the positive-Hermitian square root of p·σ.
LorentzElement standard_boost(const FourVector& p);

struct WignerRotation {
  Mat2c su2;
  Vec3 axis;
  double angle = 0.0;  // [0, 2π)

  /// Rotation matrix acting on spatial vectors.
  Eigen::Matrix3d so3() const;
};

/// Axis/angle of an SU(2) element, after sign canonicalization.
WignerRotation rotation_from_su2(const Mat2c& u);

/// Ω(Λ, p) = L(Λp)^{-1} Λ L(p), evaluated in the double cover. Throws a
/// numerical-degeneracy error if the result is not unitary within 1e-10.
WignerRotation wigner_rotation(const LorentzElement& lambda, const FourVector& p);

/// Random element: Haar rotation composed with a boost of uniform random
/// direction and rapidity uniform in [0, max_rapidity].
LorentzElement random_lorentz(Rng& rng, double max_rapidity);

}  // namespace relqi
