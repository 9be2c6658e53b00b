#include "relqi/selftest.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>
#include <string>

#include "relqi/channels.hpp"
#include "relqi/error.hpp"
#include "relqi/lorentz.hpp"
#include "relqi/photon.hpp"
#include "relqi/schur.hpp"
#include "relqi/wavepacket.hpp"

namespace relqi {

namespace {

// Returns an empty string on success, otherwise a description of the failure.
using Check = std::function<std::string(Rng&)>;

std::string describe(const std::string& what, double value, double bound) {
  std::ostringstream os;
  os << what << " = " << value << " exceeds " << bound;
  return os.str();
}

double sign_free_distance(const Mat2c& a, const Mat2c& b) {
  return std::min((a - b).cwiseAbs().maxCoeff(), (a + b).cwiseAbs().maxCoeff());
}

FourVector random_massive(Rng& rng) {
  return FourVector::on_shell(Vec3(rng.normal(), rng.normal(), rng.normal()));
}

FourVector random_null(Rng& rng) {
  const Vec3 k(rng.normal(), rng.normal(), rng.normal());
  return {k.norm(), k(0), k(1), k(2)};
}

std::string check_twirl_single(Rng& rng) {
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix rho = random_density_matrix(2, rng);
    const double d = trace_distance(twirl_single(rho, TwirlMethod::kExactProjector).output,
                                    DensityMatrix::maximally_mixed(2));
    if (d > 1e-12) return describe("distance to I/2", d, 1e-12);
  }
  return {};
}

std::string check_wigner_cocycle(Rng& rng) {
  for (int i = 0; i < 200; ++i) {
    const LorentzElement l1 = random_lorentz(rng, 1.5);
    const LorentzElement l2 = random_lorentz(rng, 1.5);
    const FourVector p = random_massive(rng);
    const Mat2c lhs = wigner_rotation(l2.compose(l1), p).su2;
    const Mat2c rhs = wigner_rotation(l2, l1.apply_spinor(p)).su2 * wigner_rotation(l1, p).su2;
    const double d = sign_free_distance(lhs, rhs);
    if (d > 1e-9) return describe("cocycle defect", d, 1e-9);
  }
  return {};
}

std::string check_schur_blocks(Rng& rng) {
  for (int n = 1; n <= 5; ++n) {
    const SchurBasis basis = schur_basis(n);
    const Mat2c u = haar_su2_sample(rng);
    const CMatrix conj = basis.unitary() * tensor_power(u, n) * basis.unitary().adjoint();
    CMatrix expected = CMatrix::Zero(conj.rows(), conj.cols());
    for (const auto& sec : basis.sectors()) {
      const auto off = static_cast<Eigen::Index>(sec.offset);
      const auto sz = static_cast<Eigen::Index>(sec.size());
      expected.block(off, off, sz, sz) = tensor_product(wigner_d(sec.j, u), identity(sec.multiplicity));
    }
    const double d = (conj - expected).cwiseAbs().maxCoeff();
    if (d > 1e-9) return describe("block structure defect", d, 1e-9);
  }
  return {};
}

std::string check_capacity(Rng&) {
  for (int n = 1; n <= 20; ++n) {
    std::uint64_t total = 0;
    for (HalfInt j : total_spins(n)) {
      if (multiplicity(n, j) != multiplicity_formula(n, j)) return "multiplicity formula mismatch";
      total += static_cast<std::uint64_t>(j.twice() + 1) * multiplicity(n, j);
    }
    if (total != (std::uint64_t{1} << n)) return "capacity identity fails at n = " + std::to_string(n);
  }
  if (logical_qubit_count(4) != 1 || logical_qubit_count(8) != 4) return "logical qubit count";
  return {};
}

std::string check_channels(Rng&) {
  const QuantumChannel approx = boost_channel_approx(gamma(0.5, 0.05));
  const QuantumChannel mix = boost_mixture(BoostPrior::uniform({0.1, 0.5, 0.9}), 0.01);
  const QuantumChannel exact = boost_channel_exact(0.5, GaussianPacket::make(0.05, Vec3::Zero(), 16));
  for (const auto* ch : {&approx, &mix, &exact}) {
    if (!choi_check(*ch).accepted()) return "channel fails the Choi/TP check";
  }
  const double d = choi_distance(exact, approx);
  if (d > 1e-4) return describe("exact vs approximate Choi distance", d, 1e-4);
  return {};
}

std::string check_twirl_idempotent(Rng& rng) {
  const SchurBasis basis = schur_basis(3);
  const DensityMatrix rho = random_density_matrix(8, rng);
  const DensityMatrix once = collective_twirl(rho, basis, TwirlMethod::kExactProjector).output;
  const DensityMatrix twice = collective_twirl(once, basis, TwirlMethod::kExactProjector).output;
  const double d = (once.matrix() - twice.matrix()).cwiseAbs().maxCoeff();
  if (d > 1e-12) return describe("idempotence defect", d, 1e-12);
  return {};
}

std::string check_singlet_code(Rng& rng) {
  const SchurBasis basis = schur_basis(4);
  const NoiselessCodec codec = make_codec(basis, HalfInt::from_int(0), 2);
  for (int i = 0; i < 10; ++i) {
    const PureState logical = random_pure_state(2, rng);
    const DensityMatrix rho = encode(codec, logical).density();
    const DensityMatrix out = collective_twirl(rho, basis, TwirlMethod::kExactProjector).output;
    const double f = fidelity(rho, out);
    if (f < 1.0 - 1e-12) return describe("infidelity", 1.0 - f, 1e-12);
  }
  return {};
}

std::string check_photon(Rng& rng) {
  for (int i = 0; i < 50; ++i) {
    const LorentzElement lambda = random_lorentz(rng, 1.5);
    const FourVector p = random_null(rng);
    const PureState logical = random_pure_state(2, rng);
    const TwoPhotonState encoded = photon_codec_encode(logical, p);
    const PureState back = photon_codec_decode(apply_lorentz_photon(lambda, encoded));
    const double f = fidelity(logical, back);
    if (f < 1.0 - 1e-12) return describe("photon code infidelity", 1.0 - f, 1e-12);
  }
  return {};
}

std::string check_overlap(Rng&) {
  const double eps = 1e-3;
  const GaussianPacket packet = make_packet(eps);
  for (double a : {0.0, 500.0, 1000.0, 2000.0}) {
    const double exact = gaussian_overlap(eps, a);
    const double rel = std::abs(std::abs(overlap(packet, a)) - exact) / exact;
    if (rel > 1e-3) return describe("overlap relative error", rel, 1e-3);
  }
  return {};
}

}  // namespace

int run_selftest(std::ostream& out, std::uint64_t seed) {
  const std::vector<std::pair<std::string, Check>> checks = {
      {"single-qubit twirl", check_twirl_single},
      {"wigner cocycle", check_wigner_cocycle},
      {"schur block structure", check_schur_blocks},
      {"multiplicity and capacity", check_capacity},
      {"channel integrity", check_channels},
      {"twirl idempotence", check_twirl_idempotent},
      {"four-qubit singlet code", check_singlet_code},
      {"photon code invariance", check_photon},
      {"packet overlap", check_overlap},
  };
  int failures = 0;
  std::uint64_t stream = 0;
  for (const auto& [name, check] : checks) {
    Rng rng(seed, ++stream);
    std::string problem;
    try {
      problem = check(rng);
    } catch (const std::exception& e) {
      problem = e.what();
    }
    if (problem.empty()) {
      out << "PASS " << name << "\n";
    } else {
      out << "FAIL " << name << ": " << problem << "\n";
      ++failures;
    }
  }
  out << (failures == 0 ? "all checks passed" : std::to_string(failures) + " check(s) failed") << "\n";
  return failures;
}

}  // namespace relqi
