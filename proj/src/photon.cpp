#include "relqi/photon.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "relqi/error.hpp"

namespace relqi {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Mat2c standard_boost_spinor(const Vec3& p) {
  const double energy = p.norm();
  const Vec3 dir = p / energy;
  // z-boost with rapidity ln|p⃗|: diag(√|p⃗|, 1/√|p⃗|).
  Mat2c boost = Mat2c::Zero();
  boost(0, 0) = std::sqrt(energy);
  boost(1, 1) = 1.0 / std::sqrt(energy);
  const Vec3 axis = Vec3::UnitZ().cross(dir);
  const double s = axis.norm();
  const double angle = std::atan2(s, dir(2));
  Mat2c rot;
  if (s > 0.0) {
    rot = rotation(axis, angle).sl2();
  } else if (dir(2) > 0.0) {
    rot = Mat2c::Identity();
  } else {
    rot = rotation(Vec3::UnitX(), std::numbers::pi).sl2();
  }
  return rot * boost;
}

Mat2c inverse_sl2(const Mat2c& a) {
  Mat2c inv;
  inv << a(1, 1), -a(0, 1), -a(1, 0), a(0, 0);
  return inv;
}

void check_null(const FourVector& p) {
  if (!is_forward_null(p)) {
    std::ostringstream os;
    os.precision(17);
    os << "momentum (" << p.t << ", " << p.x << ", " << p.y << ", " << p.z << ") is not on the forward light cone";
    fail(ErrorCode::kShell, os.str());
  }
}

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a < 0.0) a += kTwoPi;
  if (a >= kTwoPi) a -= kTwoPi;
  return a;
}

}  // namespace

bool is_forward_null(const FourVector& p) {
  return p.t > 0.0 && std::isfinite(p.t) && std::abs(p.minkowski_square()) <= kLightConeTolerance * p.t * p.t;
}

LorentzElement massless_standard_boost(const FourVector& p) {
  check_null(p);
  return LorentzElement::from_sl2(standard_boost_spinor(p.spatial()));
}

LittleGroupElement little_group_phase(const LorentzElement& lambda, const FourVector& p) {
  check_null(p);
  const FourVector q = lambda.apply_spinor(p);
  const Mat2c w = inverse_sl2(standard_boost_spinor(q.spatial())) * lambda.sl2() * standard_boost_spinor(p.spatial());
  const double defect = std::abs(w(1, 0));
  if (defect > kTriangularityTolerance) {
    std::ostringstream os;
    os << "little-group element is not upper triangular (|w10| = " << defect << ")";
    fail(ErrorCode::kConvention, os.str());
  }
  LittleGroupElement out;
  out.omega = wrap_angle(-2.0 * std::arg(w(0, 0)));
  // Pick the sign of w with w00 = e^{-iω/2}.
  const Complex expected = std::polar(1.0, -out.omega / 2.0);
  out.sl2 = std::real(w(0, 0) * std::conj(expected)) >= 0.0 ? w : Mat2c(-w);
  out.triangularity_defect = defect;
  out.sl2(1, 0) = 0.0;
  out.beta = out.sl2(0, 1) * std::conj(std::polar(1.0, out.omega / 2.0));
  return out;
}

PhotonMode PhotonMode::make(const FourVector& momentum, Complex a_plus, Complex a_minus) {
  check_null(momentum);
  const double norm2 = std::norm(a_plus) + std::norm(a_minus);
  require(std::abs(norm2 - 1.0) <= tol::kNorm, ErrorCode::kDomain, "helicity amplitudes are not normalized");
  return PhotonMode(momentum, a_plus, a_minus);
}

TwoPhotonState TwoPhotonState::make(const FourVector& momentum, const std::array<Complex, 4>& amplitudes) {
  check_null(momentum);
  double norm2 = 0.0;
  for (const auto& a : amplitudes) norm2 += std::norm(a);
  require(std::abs(norm2 - 1.0) <= tol::kNorm, ErrorCode::kDomain, "two-photon amplitudes are not normalized");
  return TwoPhotonState(momentum, amplitudes);
}

double TwoPhotonState::out_of_code_weight() const {
  return std::norm(amplitudes_[kPlusPlus]) + std::norm(amplitudes_[kMinusMinus]);
}

PhotonMode apply_lorentz_photon(const LorentzElement& lambda, const PhotonMode& state) {
  const double omega = little_group_phase(lambda, state.momentum()).omega;
  const FourVector q = lambda.apply_spinor(state.momentum());
  return PhotonMode(q, state.a_plus() * std::polar(1.0, omega), state.a_minus() * std::polar(1.0, -omega));
}

TwoPhotonState apply_lorentz_photon(const LorentzElement& lambda, const TwoPhotonState& state) {
  const double omega = little_group_phase(lambda, state.momentum()).omega;
  const FourVector q = lambda.apply_spinor(state.momentum());
  std::array<Complex, 4> a = state.amplitudes();
  a[kPlusPlus] *= std::polar(1.0, 2.0 * omega);
  a[kMinusMinus] *= std::polar(1.0, -2.0 * omega);
  return TwoPhotonState(q, a);
}

TwoPhotonState photon_codec_encode(const PureState& logical, const FourVector& p) {
  require(logical.dim() == 2, ErrorCode::kShape, "photon code stores one logical qubit");
  const Complex alpha = logical.amplitudes()(0);
  const Complex beta = logical.amplitudes()(1);
  const double r = std::numbers::sqrt2 / 2.0;
  return TwoPhotonState::make(p, {Complex(0.0), r * (alpha + beta), r * (alpha - beta), Complex(0.0)});
}

PureState photon_codec_decode(const TwoPhotonState& state) {
  const double outside = state.out_of_code_weight();
  if (outside > 1e-12) {
    std::ostringstream os;
    os << "two-photon state has weight " << outside << " outside the zero-helicity code";
    fail(ErrorCode::kOutOfCode, os.str());
  }
  const auto& a = state.amplitudes();
  const double r = std::numbers::sqrt2 / 2.0;
  CVector logical(2);
  logical << r * (a[kPlusMinus] + a[kMinusPlus]), r * (a[kPlusMinus] - a[kMinusPlus]);
  return PureState::from_amplitudes(logical / logical.norm());
}

int dephasing_logical_count(int n) {
  require(n >= 2 && n <= 60, ErrorCode::kDomain, "photon count must lie in [2, 60]");
  if (n % 2 != 0) fail(ErrorCode::kParity, "zero-helicity sector needs an even photon count, got " + std::to_string(n));
  std::uint64_t c = 1;
  const int k = n / 2;
  for (int i = 1; i <= k; ++i) c = c * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return static_cast<int>(std::bit_width(c)) - 1;
}

}  // namespace relqi
