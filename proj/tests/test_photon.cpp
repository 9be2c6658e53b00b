#include <doctest.h>

#include <bit>
#include <cmath>
#include <numbers>

#include "relqi/photon.hpp"
#include "test_util.hpp"

using namespace relqi;
using relqi::testing::code_of;
using relqi::testing::random_null_momentum;

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double x) {
  x = std::fmod(x, 2.0 * kPi);
  return x < 0.0 ? x + 2.0 * kPi : x;
}

double angle_gap(double a, double b) {
  const double d = wrap(a - b);
  return std::min(d, 2.0 * kPi - d);
}

// Plain 4×4 constructions, independent of the spinor map.
Mat4 z_boost4(double xi) {
  Mat4 m = Mat4::Identity();
  m(0, 0) = m(3, 3) = std::cosh(xi);
  m(0, 3) = m(3, 0) = std::sinh(xi);
  return m;
}

Mat4 rotation4(const Vec3& axis, double angle) {
  const Vec3 n = axis.normalized();
  Eigen::Matrix3d k;
  k << 0, -n(2), n(1), n(2), 0, -n(0), -n(1), n(0), 0;
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(1, 1) = Eigen::Matrix3d::Identity() + std::sin(angle) * k + (1.0 - std::cos(angle)) * k * k;
  return m;
}

Mat4 boost4(const Vec3& dir, double xi) {
  const Vec3 n = dir.normalized();
  Mat4 m = Mat4::Identity();
  m(0, 0) = std::cosh(xi);
  m.block<1, 3>(0, 1) = std::sinh(xi) * n.transpose();
  m.block<3, 1>(1, 0) = std::sinh(xi) * n;
  m.block<3, 3>(1, 1) += (std::cosh(xi) - 1.0) * n * n.transpose();
  return m;
}

Mat4 null_standard4(const Eigen::Vector4d& p) {
  const Vec3 s = p.tail<3>();
  const double k = s.norm();
  const Vec3 phat = s / k;
  const Vec3 z(0, 0, 1);
  Mat4 r = Mat4::Identity();
  const Vec3 c = z.cross(phat);
  if (c.norm() > 1e-12) {
    r = rotation4(c, std::atan2(c.norm(), z.dot(phat)));
  } else if (phat(2) < 0.0) {
    r = rotation4(Vec3(1, 0, 0), kPi);
  }
  return r * z_boost4(std::log(k));
}

Vec3 random_unit(Rng& rng) { return Vec3(rng.normal(), rng.normal(), rng.normal()).normalized(); }

}  // namespace

TEST_CASE("massless standard boost") {
  const FourVector fid{1, 0, 0, 1};
  CHECK((massless_standard_boost(fid).mat4() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-14);
  const LorentzElement l2 = massless_standard_boost({2, 0, 0, 2});
  CHECK((l2.mat4() - z_boost4(std::log(2.0))).cwiseAbs().maxCoeff() < 1e-13);
  const LorentzElement down = massless_standard_boost({1, 0, 0, -1});
  const FourVector img = down.apply(fid);
  CHECK(std::abs(img.z + 1.0) < 1e-14);
  CHECK(std::abs(img.t - 1.0) < 1e-14);
  Rng rng(83);
  for (int i = 0; i < 200; ++i) {
    const FourVector p = random_null_momentum(rng);
    const LorentzElement l = massless_standard_boost(p);
    const FourVector q = l.apply(fid);
    CHECK((q.as_vector() - p.as_vector()).cwiseAbs().maxCoeff() < 1e-12 * p.t);
    CHECK((l.mat4() - null_standard4(p.as_vector())).cwiseAbs().maxCoeff() < 1e-10 * std::max(1.0, p.t));
  }
  CHECK(code_of([] { massless_standard_boost({1, 0, 0, 0.5}); }) == ErrorCode::kShell);
  CHECK(code_of([] { massless_standard_boost({-1, 0, 0, 1}); }) == ErrorCode::kShell);
  CHECK(is_forward_null({3, 0, 4, 0}) == false);
  CHECK(is_forward_null({5, 0, 4, 3}));
}

TEST_CASE("little group phase of rotations about and boosts along the momentum") {
  const FourVector p{1, 0, 0, 1};
  for (double theta : {0.3, 1.0, 2.5, 4.0, 6.0}) {
    const LittleGroupElement w = little_group_phase(rotation(Vec3(0, 0, 1), theta), p);
    CHECK(angle_gap(w.omega, theta) < 1e-12);
    CHECK(std::abs(w.beta) < 1e-12);
  }
  const LittleGroupElement b = little_group_phase(boost_from_rapidity(Vec3(0, 0, 1), 0.7), p);
  CHECK(angle_gap(b.omega, 0.0) < 1e-12);
}

TEST_CASE("little group elements are upper triangular and match the 4x4 oracle") {
  Rng rng(89);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 ax = random_unit(rng), dir = random_unit(rng);
    const double theta = 2.0 * kPi * rng.uniform(), xi = 2.0 * rng.uniform();
    const LorentzElement lambda = rotation(ax, theta).compose(boost_from_rapidity(dir, xi));
    const FourVector p = random_null_momentum(rng);
    const LittleGroupElement w = little_group_phase(lambda, p);
    CHECK(w.triangularity_defect < kTriangularityTolerance);
    CHECK(std::abs(std::abs(w.sl2(0, 0)) - 1.0) < 1e-9);

    const Mat4 lam4 = rotation4(ax, theta) * boost4(dir, xi);
    const Eigen::Vector4d q = lam4 * p.as_vector();
    const Mat4 w4 = null_standard4(q).inverse() * lam4 * null_standard4(p.as_vector());
    const double omega = std::atan2(w4(2, 1), w4(1, 1));
    CHECK(angle_gap(w.omega, omega) < 1e-8);
  }
}

TEST_CASE("little group phase is a cocycle") {
  Rng rng(97);
  for (int i = 0; i < 300; ++i) {
    const LorentzElement l1 = random_lorentz(rng, 1.5), l2 = random_lorentz(rng, 1.5);
    const FourVector p = random_null_momentum(rng);
    const double lhs = little_group_phase(l2.compose(l1), p).omega;
    const double rhs = little_group_phase(l2, l1.apply(p)).omega + little_group_phase(l1, p).omega;
    CHECK(angle_gap(lhs, rhs) < 1e-8);
  }
}

TEST_CASE("single photons pick up helicity phases") {
  const FourVector p{1, 0, 0, 1};
  const double r = 1.0 / std::sqrt(2.0);
  const PhotonMode m = PhotonMode::make(p, r, r);
  const double theta = 0.9;
  const PhotonMode out = apply_lorentz_photon(rotation(Vec3(0, 0, 1), theta), m);
  CHECK(std::abs(out.a_plus() - r * std::polar(1.0, theta)) < 1e-12);
  CHECK(std::abs(out.a_minus() - r * std::polar(1.0, -theta)) < 1e-12);
  CHECK(code_of([&] { PhotonMode::make(p, 1.0, 1.0); }) == ErrorCode::kDomain);
  CHECK(code_of([&] { PhotonMode::make({1, 0, 0, 0}, 1.0, 0.0); }) == ErrorCode::kShell);

  Rng rng(101);
  for (int i = 0; i < 100; ++i) {
    const PureState s = random_pure_state(2, rng);
    const PhotonMode in = PhotonMode::make(random_null_momentum(rng), s.amplitudes()(0), s.amplitudes()(1));
    const PhotonMode o = apply_lorentz_photon(random_lorentz(rng, 2.0), in);
    CHECK(std::norm(o.a_plus()) + std::norm(o.a_minus()) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(is_forward_null(o.momentum()));
  }
}

TEST_CASE("two-photon code amplitudes are exactly invariant") {
  Rng rng(103);
  for (int i = 0; i < 1000; ++i) {
    const PureState logical = random_pure_state(2, rng);
    const TwoPhotonState enc = photon_codec_encode(logical, random_null_momentum(rng));
    const TwoPhotonState out = apply_lorentz_photon(random_lorentz(rng, 3.0), enc);
    CHECK(out.amplitudes()[kPlusMinus] == enc.amplitudes()[kPlusMinus]);
    CHECK(out.amplitudes()[kMinusPlus] == enc.amplitudes()[kMinusPlus]);
    CHECK(out.out_of_code_weight() == 0.0);
    const PureState back = photon_codec_decode(out);
    CHECK(fidelity(back, logical) == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("states with nonzero total helicity rotate and are rejected by the decoder") {
  const FourVector p{1, 0, 0, 1};
  const TwoPhotonState pp = TwoPhotonState::make(p, {1.0, 0.0, 0.0, 0.0});
  CHECK(pp.out_of_code_weight() == doctest::Approx(1.0));
  CHECK(code_of([&] { photon_codec_decode(pp); }) == ErrorCode::kOutOfCode);
  const TwoPhotonState out = apply_lorentz_photon(rotation(Vec3(0, 0, 1), 0.5), pp);
  CHECK(std::abs(out.amplitudes()[kPlusPlus] - std::polar(1.0, 1.0)) < 1e-12);
  CHECK(code_of([&] { TwoPhotonState::make(p, {1.0, 1.0, 0.0, 0.0}); }) == ErrorCode::kDomain);
}

TEST_CASE("zero-helicity sector capacity") {
  CHECK(dephasing_logical_count(2) == 1);
  CHECK(dephasing_logical_count(4) == 2);
  for (int n = 2; n <= 16; n += 2) {
    std::uint64_t count = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask)
      if (std::popcount(mask) == n / 2) ++count;
    CHECK(dephasing_logical_count(n) == static_cast<int>(std::bit_width(count)) - 1);
  }
  CHECK(dephasing_logical_count(60) > 0);
  CHECK(code_of([] { dephasing_logical_count(5); }) == ErrorCode::kParity);
  CHECK(code_of([] { dephasing_logical_count(0); }) == ErrorCode::kDomain);
  CHECK(code_of([] { dephasing_logical_count(62); }) == ErrorCode::kDomain);
}
