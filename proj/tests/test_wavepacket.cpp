#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "relqi/quadrature.hpp"
#include "relqi/wavepacket.hpp"
#include "test_util.hpp"

using namespace relqi;
using relqi::testing::code_of;

namespace {

// Gauss–Hermite nodes by Newton iteration on the orthonormal Hermite recurrence.
struct Rule {
  std::vector<double> x, w;
};

Rule newton_gauss_hermite(int n) {
  Rule r;
  r.x.resize(n);
  r.w.resize(n);
  const double pim4 = std::pow(std::numbers::pi, -0.25);
  double z = 0.0;
  for (int i = 0; i < (n + 1) / 2; ++i) {
    if (i == 0) {
      z = std::sqrt(2.0 * n + 1.0) - 1.85575 * std::pow(2.0 * n + 1.0, -0.16667);
    } else if (i == 1) {
      z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    } else if (i == 2) {
      z = 1.86 * z - 0.86 * r.x[0];
    } else if (i == 3) {
      z = 1.91 * z - 0.91 * r.x[1];
    } else {
      z = 2.0 * z - r.x[i - 2];
    }
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p1 = pim4, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      const double z1 = z;
      z = z1 - p1 / pp;
      if (std::abs(z - z1) <= 1e-15) break;
    }
    r.x[i] = z;
    r.x[n - 1 - i] = -z;
    r.w[i] = r.w[n - 1 - i] = 2.0 / (pp * pp);
  }
  return r;
}

// ⟨Ψ|Ψ_a⟩ for a packet at rest, integrating e^{-i p_z a}/(2p⁰) on the real axis.
std::complex<double> real_axis_overlap(double delta, double a, int n) {
  const Rule r = newton_gauss_hermite(n);
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const double px = delta * r.x[i], py = delta * r.x[j], pz = delta * r.x[k];
        const double w = r.w[i] * r.w[j] * r.w[k] / (2.0 * std::sqrt(1.0 + px * px + py * py + pz * pz));
        num += w * std::exp(std::complex<double>(0.0, -pz * a));
        den += w;
      }
  return num / den;
}

}  // namespace

TEST_CASE("Gauss-Hermite rule integrates even moments exactly") {
  const auto rule = GaussHermiteRule::make(20);
  for (int k = 0; k <= 10; ++k) {
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) sum += rule.weights[i] * std::pow(rule.nodes[i], 2 * k);
    CHECK(sum == doctest::Approx(std::tgamma(k + 0.5)).epsilon(1e-12));
  }
  const Rule oracle = newton_gauss_hermite(32);
  const auto lib = GaussHermiteRule::make(32);
  for (int i = 0; i < 32; ++i) {
    CHECK(std::abs(lib.nodes[static_cast<std::size_t>(i)] - oracle.x[static_cast<std::size_t>(31 - i)]) < 1e-12);
  }
}

TEST_CASE("packets are normalized in the invariant measure") {
  for (double delta : {1e-4, 0.01, 0.1, 0.19}) {
    const GaussianPacket p = make_packet(delta);
    CHECK(p.norm(32) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(p.norm(48) == doctest::Approx(1.0).epsilon(1e-12));
    double total = 0.0;
    for (const auto& node : p.measure_nodes()) {
      total += node.weight;
      CHECK(std::abs(node.p.minkowski_square() - 1.0) < 1e-12);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-13));
  }
  CHECK(code_of([] { make_packet(0.2); }) == ErrorCode::kRegime);
  CHECK(code_of([] { make_packet(0.0); }) == ErrorCode::kRegime);
  CHECK(code_of([] { make_packet(-0.1); }) == ErrorCode::kRegime);
}

TEST_CASE("contour-shifted overlap matches real-axis quadrature where the latter converges") {
  for (double delta : {0.01, 0.05, 0.15}) {
    const GaussianPacket packet = make_packet(delta);
    for (double ad : {0.0, 0.5, 1.0, 2.0, 3.0, 4.0}) {
      const double a = ad / delta;
      const auto lib = overlap(packet, a);
      const auto ref = real_axis_overlap(delta, a, 48);
      CHECK(std::abs(lib - ref) < 1e-10);
    }
  }
}

TEST_CASE("overlap approaches the nonrelativistic Gaussian") {
  // Relative deviation from exp(-a²Δ²/4) stays below Δ² for aΔ up to 2.5.
  for (double delta : {1e-3, 0.01, 0.05, 0.1, 0.19}) {
    const GaussianPacket packet = make_packet(delta);
    for (double ad = 0.0; ad <= 2.5; ad += 0.25) {
      const double a = ad / delta;
      const double exact = gaussian_overlap(delta, a);
      const double rel = std::abs(std::abs(overlap(packet, a)) - exact) / exact;
      CHECK(rel <= delta * delta);
    }
  }
}

TEST_CASE("overlap at large separation stays accurate") {
  const double eps = 1e-3;
  const GaussianPacket packet = make_packet(eps);
  for (double a : {3000.0, 5000.0, 6000.0}) {
    const double exact = gaussian_overlap(eps, a);
    CHECK(std::abs(std::abs(overlap(packet, a)) - exact) / exact < 1e-3);
  }
  CHECK(std::abs(overlap(packet, 0.0) - 1.0) < 1e-13);
}

TEST_CASE("minimum separation sits at the threshold and scales as 1/epsilon") {
  for (double eps : {1e-3, 1e-2, 0.1}) {
    const double a = min_separation(eps);
    CHECK(std::abs(overlap(make_packet(eps), a)) == doctest::Approx(0.01).epsilon(1e-6));
    // Gaussian estimate 2√(ln 100)/ε.
    CHECK(a * eps == doctest::Approx(2.0 * std::sqrt(std::log(100.0))).epsilon(0.05));
  }
  CHECK(min_separation(1e-4) > min_separation(1e-3));
}

TEST_CASE("proton packets of spread 1e-8 need separations of order 100 angstrom") {
  const double a = min_separation(1e-8);
  const double angstrom = natural_length_to_angstrom(a, kProtonMassMeV);
  CHECK(reduced_compton_wavelength_angstrom(kProtonMassMeV) == doctest::Approx(2.1030891e-6).epsilon(1e-6));
  CHECK(angstrom > 10.0);
  CHECK(angstrom < 1000.0);
}

TEST_CASE("lattices enforce distinguishability") {
  const GaussianPacket packet = make_packet(0.01);
  const PureState spin = PureState::basis(8, 0);
  const double a_min = min_separation(0.01);
  const LatticeState ok = make_lattice(3, 1.1 * a_min, packet, spin);
  CHECK(ok.max_pair_overlap < 0.01);
  CHECK(code_of([&] { make_lattice(3, 0.5 * a_min, packet, spin); }) == ErrorCode::kIndistinguishable);
  CHECK(code_of([&] { make_lattice(2, 2.0 * a_min, packet, spin); }) == ErrorCode::kShape);
  const LatticeState single = make_lattice(1, 1.0, packet, PureState::basis(2, 1));
  CHECK(single.n == 1);
}
