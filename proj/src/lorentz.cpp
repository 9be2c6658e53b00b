#include "relqi/lorentz.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "relqi/error.hpp"

namespace relqi {

namespace {

const std::array<Mat2c, 4>& sigma_basis() {
  static const std::array<Mat2c, 4> basis = {Mat2c::Identity(), pauli_x(), pauli_y(), pauli_z()};
  return basis;
}

Mat2c n_dot_sigma(const Vec3& n) { return n(0) * pauli_x() + n(1) * pauli_y() + n(2) * pauli_z(); }

Mat2c inverse_sl2(const Mat2c& a) {
  Mat2c inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv;
}

// Positive-Hermitian square root of P = p·σ for an on-shell momentum with
// p⁰ > 0 and det P = 1: (P + 1)/√(2(p⁰ + 1)).
Mat2c standard_boost_spinor(const FourVector& p) {
  return (spinor_of(p) + Mat2c::Identity()) / std::sqrt(2.0 * (p.t + 1.0));
}

}  // namespace

FourVector FourVector::on_shell(const Vec3& p) {
  return {std::sqrt(1.0 + p.squaredNorm()), p(0), p(1), p(2)};
}

bool is_massive_on_shell(const FourVector& p) {
  return p.t > 0.0 && std::abs(p.minkowski_square() - 1.0) <= kShellTolerance;
}

Mat2c spinor_of(const FourVector& x) {
  Mat2c m;
  m << Complex(x.t + x.z), Complex(x.x, -x.y), Complex(x.x, x.y), Complex(x.t - x.z);
  return m;
}

FourVector vector_of(const Mat2c& x) {
  const auto& s = sigma_basis();
  return {0.5 * (s[0] * x).trace().real(), 0.5 * (s[1] * x).trace().real(),
          0.5 * (s[2] * x).trace().real(), 0.5 * (s[3] * x).trace().real()};
}

Mat2c canonicalize_sign(const Mat2c& a) {
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  a.cwiseAbs().maxCoeff(&r, &c);
  const double arg = std::arg(a(r, c));
  const bool keep = arg > -std::numbers::pi / 2 && arg <= std::numbers::pi / 2;
  return keep ? a : Mat2c(-a);
}

Mat4 lorentz_matrix_from_sl2(const Mat2c& a) {
  const auto& s = sigma_basis();
  Mat4 m;
  const Mat2c ad = a.adjoint();
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) m(mu, nu) = 0.5 * (s[mu] * a * s[nu] * ad).trace().real();
  return m;
}

LorentzElement LorentzElement::from_sl2(const Mat2c& a) {
  const Complex det = a.determinant();
  if (std::abs(det - Complex(1.0)) > 1e-10) {
    std::ostringstream os;
    os << "double-cover matrix has determinant " << det << ", expected 1";
    fail(ErrorCode::kDomain, os.str());
  }
  const Mat2c canon = canonicalize_sign(a);
  return LorentzElement(canon, lorentz_matrix_from_sl2(canon));
}

LorentzElement LorentzElement::identity() {
  return LorentzElement(Mat2c::Identity(), Mat4::Identity());
}

FourVector LorentzElement::apply(const FourVector& x) const {
  return FourVector::from_vector(mat4_ * x.as_vector());
}

FourVector LorentzElement::apply_spinor(const FourVector& x) const {
  return vector_of(sl2_ * spinor_of(x) * sl2_.adjoint());
}

LorentzElement LorentzElement::compose(const LorentzElement& rhs) const {
  const Mat2c a = canonicalize_sign(sl2_ * rhs.sl2_);
  return LorentzElement(a, lorentz_matrix_from_sl2(a));
}

LorentzElement LorentzElement::inverse() const {
  const Mat2c a = canonicalize_sign(inverse_sl2(sl2_));
  return LorentzElement(a, lorentz_matrix_from_sl2(a));
}

LorentzElement boost_from_rapidity(const Vec3& direction, double rapidity) {
  const double len = direction.norm();
  if (len == 0.0 || rapidity == 0.0) return LorentzElement::identity();
  const Vec3 n = direction / len;
  const Mat2c a = std::cosh(rapidity / 2) * Mat2c::Identity() + std::sinh(rapidity / 2) * n_dot_sigma(n);
  return LorentzElement::from_sl2(a);
}

LorentzElement boost_from_velocity(const Vec3& v) {
  const double speed = v.norm();
  if (!(speed < 1.0 - 1e-12)) {
    std::ostringstream os;
    os << "boost speed " << speed << " is not below the speed of light";
    fail(ErrorCode::kSuperluminal, os.str());
  }
  if (speed == 0.0) return LorentzElement::identity();
  return boost_from_rapidity(v, std::atanh(speed));
}

LorentzElement rotation(const Vec3& axis, double angle) {
  const double len = axis.norm();
  require(len > 0.0, ErrorCode::kDomain, "rotation axis must be nonzero");
  const Vec3 n = axis / len;
  const Mat2c a = std::cos(angle / 2) * Mat2c::Identity() -
                  Complex(0.0, std::sin(angle / 2)) * n_dot_sigma(n);
  return LorentzElement::from_sl2(a);
}

LorentzElement standard_boost(const FourVector& p) {
  if (!is_massive_on_shell(p)) {
    std::ostringstream os;
    os.precision(17);
    os << "momentum (" << p.t << ", " << p.x << ", " << p.y << ", " << p.z
       << ") is not on the unit mass shell";
    fail(ErrorCode::kShell, os.str());
  }
  return LorentzElement::from_sl2(standard_boost_spinor(p));
}

Eigen::Matrix3d WignerRotation::so3() const {
  return lorentz_matrix_from_sl2(su2).block<3, 3>(1, 1);
}

WignerRotation rotation_from_su2(const Mat2c& u) {
  WignerRotation w;
  w.su2 = canonicalize_sign(u);
  // su2 = cos(θ/2)·1 - i sin(θ/2) n̂·σ⃗ with sin(θ/2) ≥ 0 for θ ∈ [0, 2π).
  const double c = std::clamp(0.5 * (w.su2(0, 0) + w.su2(1, 1)).real(), -1.0, 1.0);
  const Vec3 s_n(-w.su2(0, 1).imag(), -w.su2(0, 1).real(), -w.su2(0, 0).imag());
  const double s = s_n.norm();
  w.angle = 2.0 * std::atan2(s, c);
  if (s < 1e-15) {
    w.axis = Vec3::UnitZ();
    w.angle = 0.0;
  } else {
    w.axis = s_n / s;
  }
  if (w.angle >= 2.0 * std::numbers::pi) w.angle -= 2.0 * std::numbers::pi;
  return w;
}

WignerRotation wigner_rotation(const LorentzElement& lambda, const FourVector& p) {
  if (!is_massive_on_shell(p)) fail(ErrorCode::kShell, "Wigner rotation needs an on-shell momentum");
  const Mat2c lp = standard_boost_spinor(p);
  // Λp in spinor form keeps det = 1 to rounding; no shell projection needed.
  const FourVector q = lambda.apply_spinor(p);
  const Mat2c lq = standard_boost_spinor(q);
  const Mat2c w = inverse_sl2(lq) * lambda.sl2() * lp;
  const double defect = (w.adjoint() * w - Mat2c::Identity()).cwiseAbs().maxCoeff();
  if (defect > 1e-10) {
    std::ostringstream os;
    os << "Wigner rotation is not unitary (defect " << defect << "); momentum too close to the light cone";
    fail(ErrorCode::kNumericalDegeneracy, os.str());
  }
  return rotation_from_su2(w);
}

LorentzElement random_lorentz(Rng& rng, double max_rapidity) {
  const LorentzElement rot = LorentzElement::from_sl2(haar_su2_sample(rng));
  Vec3 dir(rng.normal(), rng.normal(), rng.normal());
  const double rapidity = max_rapidity * rng.uniform();
  return rot.compose(boost_from_rapidity(dir, rapidity));
}

}  // namespace relqi
