#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "relqi/lorentz.hpp"
#include "test_util.hpp"

using namespace relqi;
using relqi::testing::code_of;
using relqi::testing::random_massive_momentum;

namespace {

// 4×4 Lorentz algebra in 50-digit arithmetic, built from velocity and
// axis-angle formulas without the double cover.
using HP = boost::multiprecision::cpp_bin_float_50;
using M4 = std::array<std::array<HP, 4>, 4>;

M4 mul(const M4& a, const M4& b) {
  M4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

M4 hp_boost(const std::array<HP, 3>& v) {
  const HP v2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
  M4 b{};
  for (int i = 0; i < 4; ++i) b[i][i] = 1;
  if (v2 == 0) return b;
  const HP g = 1 / sqrt(1 - v2);
  b[0][0] = g;
  for (int i = 0; i < 3; ++i) {
    b[0][i + 1] = b[i + 1][0] = g * v[i];
    for (int j = 0; j < 3; ++j) b[i + 1][j + 1] += (g - 1) * v[i] * v[j] / v2;
  }
  return b;
}

M4 hp_rotation(const std::array<HP, 3>& axis, const HP& angle) {
  const HP len = sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
  const std::array<HP, 3> n = {axis[0] / len, axis[1] / len, axis[2] / len};
  const HP c = cos(angle), s = sin(angle);
  M4 r{};
  r[0][0] = 1;
  const HP cross[3][3] = {{0, -n[2], n[1]}, {n[2], 0, -n[0]}, {-n[1], n[0], 0}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i + 1][j + 1] = (i == j ? c : HP(0)) + (1 - c) * n[i] * n[j] + s * cross[i][j];
  return r;
}

std::array<HP, 4> hp_apply(const M4& m, const std::array<HP, 4>& x) {
  std::array<HP, 4> y{};
  for (int i = 0; i < 4; ++i)
    for (int k = 0; k < 4; ++k) y[i] += m[i][k] * x[k];
  return y;
}

// L(p) is the pure boost with velocity p⃗/p⁰.
M4 hp_standard_boost(const std::array<HP, 4>& p, int sign = 1) {
  return hp_boost({sign * p[1] / p[0], sign * p[2] / p[0], sign * p[3] / p[0]});
}

struct Case {
  Vec3 velocity;
  Vec3 axis;
  double angle;
  Vec3 momentum;
};

// W = L(Λp)⁻¹ Λ L(p) with Λ = R(axis, angle) · B(velocity).
M4 oracle_wigner(const Case& c) {
  const std::array<HP, 3> v = {c.velocity(0), c.velocity(1), c.velocity(2)};
  const M4 lambda = mul(hp_rotation({c.axis(0), c.axis(1), c.axis(2)}, HP(c.angle)), hp_boost(v));
  const std::array<HP, 3> k = {c.momentum(0), c.momentum(1), c.momentum(2)};
  const std::array<HP, 4> p = {sqrt(1 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]), k[0], k[1], k[2]};
  const std::array<HP, 4> q = hp_apply(lambda, p);
  return mul(hp_standard_boost(q, -1), mul(lambda, hp_standard_boost(p)));
}

LorentzElement library_lambda(const Case& c) { return rotation(c.axis, c.angle).compose(boost_from_velocity(c.velocity)); }

Vec3 random_unit(Rng& rng) {
  Vec3 v(rng.normal(), rng.normal(), rng.normal());
  return v.normalized();
}

Case random_case(Rng& rng) {
  return {random_unit(rng) * 0.95 * rng.uniform(), random_unit(rng), 2.0 * std::numbers::pi * rng.uniform(),
          Vec3(rng.normal(), rng.normal(), rng.normal()) * 2.0};
}

double sign_free_distance(const Mat2c& a, const Mat2c& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

const Mat4 kMetric = Eigen::Vector4d(1, -1, -1, -1).asDiagonal();

}  // namespace

TEST_CASE("Wigner rotations agree with the high-precision 4x4 oracle") {
  Rng rng(101);
  for (int i = 0; i < 300; ++i) {
    const Case c = random_case(rng);
    const M4 w = oracle_wigner(c);
    const WignerRotation lib = wigner_rotation(library_lambda(c), FourVector::on_shell(c.momentum));
    const Eigen::Matrix3d r = lib.so3();
    double err = std::abs(static_cast<double>(w[0][0]) - 1.0);
    for (int a = 0; a < 3; ++a) {
      err = std::max(err, std::abs(static_cast<double>(w[0][a + 1])));
      for (int b = 0; b < 3; ++b) err = std::max(err, std::abs(static_cast<double>(w[a + 1][b + 1]) - r(a, b)));
    }
    CHECK(err < 1e-9);
  }
}

TEST_CASE("perpendicular boosts give the closed-form Wigner angle about y") {
  // Observer boost 0.5 along z, particle momentum along x.
  const double v = 0.5;
  const Vec3 k(1.0, 0.0, 0.0);
  const WignerRotation w = wigner_rotation(boost_from_velocity(Vec3(0, 0, v)), FourVector::on_shell(k));
  const double g1 = 1.0 / std::sqrt(1.0 - v * v);
  const double g2 = std::sqrt(1.0 + k.squaredNorm());
  const double expected = std::acos((g1 + g2) / (1.0 + g1 * g2));
  const double angle = w.angle > std::numbers::pi ? 2.0 * std::numbers::pi - w.angle : w.angle;
  CHECK(angle == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(std::abs(w.axis(1)) - 1.0) < 1e-12);
  const M4 oracle = oracle_wigner({Vec3(0, 0, v), Vec3::UnitZ(), 0.0, k});
  CHECK(std::abs(static_cast<double>(oracle[1][3]) - w.so3()(0, 2)) < 1e-12);
}

TEST_CASE("the 4x4 form is a homomorphic image preserving the metric") {
  Rng rng(17);
  for (int i = 0; i < 100; ++i) {
    const LorentzElement a = random_lorentz(rng, 2.0), b = random_lorentz(rng, 2.0);
    CHECK((a.mat4().transpose() * kMetric * a.mat4() - kMetric).cwiseAbs().maxCoeff() < 1e-11);
    CHECK((a.compose(b).mat4() - a.mat4() * b.mat4()).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((a.compose(a.inverse()).mat4() - Mat4::Identity()).cwiseAbs().maxCoeff() < 1e-11);
    CHECK(a.mat4()(0, 0) >= 1.0);
    CHECK(a.mat4().determinant() == doctest::Approx(1.0).epsilon(1e-9));
    const FourVector x{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
    const FourVector y1 = a.apply(x), y2 = a.apply_spinor(x);
    CHECK((y1.as_vector() - y2.as_vector()).norm() < 1e-10 * (1.0 + x.as_vector().norm() * a.mat4().norm()));
  }
}

TEST_CASE("spinor map roundtrip and sign canonicalization") {
  const FourVector x{1.5, 0.2, -0.3, 0.7};
  CHECK((vector_of(spinor_of(x)).as_vector() - x.as_vector()).norm() < 1e-15);
  CHECK(spinor_of(x).determinant().real() == doctest::Approx(x.minkowski_square()));
  Rng rng(4);
  for (int i = 0; i < 50; ++i) {
    const Mat2c u = haar_su2_sample(rng);
    const Mat2c c = canonicalize_sign(u);
    CHECK((canonicalize_sign(Mat2c(-u)) - c).norm() < 1e-15);
    CHECK((lorentz_matrix_from_sl2(u) - lorentz_matrix_from_sl2(-u)).norm() < 1e-14);
  }
  CHECK(code_of([] { LorentzElement::from_sl2(2.0 * Mat2c::Identity()); }) == ErrorCode::kDomain);
}

TEST_CASE("rotations are right-handed and boosts map rest to the velocity") {
  const FourVector ex{0, 1, 0, 0};
  const FourVector y = rotation(Vec3::UnitZ(), std::numbers::pi / 2).apply(ex);
  CHECK(std::abs(y.y - 1.0) < 1e-15);
  CHECK(std::abs(y.x) < 1e-15);
  const Vec3 v(0.3, -0.2, 0.4);
  const FourVector moved = boost_from_velocity(v).apply(FourVector::rest());
  CHECK((moved.spatial() / moved.t - v).norm() < 1e-14);
  CHECK(code_of([] { boost_from_velocity(Vec3(0.6, 0.8, 0.0)); }) == ErrorCode::kSuperluminal);
  CHECK(code_of([] { boost_from_velocity(Vec3(1.0, 0.0, 0.0)); }) == ErrorCode::kSuperluminal);
}

TEST_CASE("standard boosts reach the momentum and check the shell") {
  Rng rng(23);
  for (int i = 0; i < 50; ++i) {
    const FourVector p = random_massive_momentum(rng, 3.0);
    CHECK(is_massive_on_shell(p));
    const LorentzElement l = standard_boost(p);
    CHECK((l.apply(FourVector::rest()).as_vector() - p.as_vector()).norm() < 1e-12 * p.t);
    CHECK((l.sl2() - l.sl2().adjoint()).norm() < 1e-12 * p.t);
  }
  CHECK(code_of([] { standard_boost(FourVector{1.0, 1.0, 0.0, 0.0}); }) == ErrorCode::kShell);
  CHECK(code_of([] { wigner_rotation(LorentzElement::identity(), FourVector{2.0, 0.0, 0.0, 0.0}); }) ==
        ErrorCode::kShell);
}

TEST_CASE("Wigner rotation of a pure rotation is that rotation, of a collinear boost the identity") {
  Rng rng(29);
  for (int i = 0; i < 50; ++i) {
    const Vec3 axis = random_unit(rng);
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const LorentzElement r = rotation(axis, angle);
    const FourVector p = random_massive_momentum(rng);
    CHECK(sign_free_distance(wigner_rotation(r, p).su2, r.sl2()) < 1e-12);
    const Vec3 dir = p.spatial().normalized();
    const WignerRotation w = wigner_rotation(boost_from_rapidity(dir, 3.0 * rng.uniform()), p);
    CHECK(sign_free_distance(w.su2, Mat2c::Identity()) < 1e-12);
  }
}

TEST_CASE("Wigner cocycle law over random triples") {
  Rng rng(31);
  for (int i = 0; i < 1000; ++i) {
    const LorentzElement l1 = random_lorentz(rng, 2.0), l2 = random_lorentz(rng, 2.0);
    const FourVector p = random_massive_momentum(rng);
    const Mat2c lhs = wigner_rotation(l2.compose(l1), p).su2;
    const Mat2c rhs = wigner_rotation(l2, l1.apply_spinor(p)).su2 * wigner_rotation(l1, p).su2;
    CHECK(sign_free_distance(lhs, rhs) < 1e-9);
  }
}

TEST_CASE("axis-angle extraction inverts the rotation constructor") {
  Rng rng(37);
  for (int i = 0; i < 100; ++i) {
    const Vec3 axis = random_unit(rng);
    const double angle = 2.0 * std::numbers::pi * rng.uniform();
    const WignerRotation w = rotation_from_su2(rotation(axis, angle).sl2());
    CHECK(w.angle >= 0.0);
    CHECK(w.angle < 2.0 * std::numbers::pi);
    CHECK(sign_free_distance(rotation(w.axis, w.angle).sl2(), rotation(axis, angle).sl2()) < 1e-12);
    CHECK((w.so3() - rotation(axis, angle).mat4().block<3, 3>(1, 1)).cwiseAbs().maxCoeff() < 1e-12);
  }
}
