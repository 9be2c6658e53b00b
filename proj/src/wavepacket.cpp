#include "relqi/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "relqi/error.hpp"
#include "relqi/quadrature.hpp"

namespace relqi {

namespace {

constexpr double kTwoPiCubedInv = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi * std::numbers::pi);
constexpr double kHbarCMeVFm = 197.3269804;
constexpr double kOverlapConvergence = 1e-6;
// Largest imaginary shift of the p_z contour; the branch points of p⁰ sit at
// |Im p_z| ≥ 1.
constexpr double kMaxContourShift = 0.5;

// ∫dμ|ψ|² e^{-i p_z a}, with p_z integrated along Im p_z = -s. For s = aΔ²/2 the
// Gaussian absorbs the oscillation exactly and the remaining integrand is
// smooth: 1/(2p⁰) with complex p_z.
std::complex<double> overlap_quadrature(const GaussianPacket& packet, double a, int nodes) {
  const auto rule = GaussHermiteRule::make(nodes);
  const double d = packet.delta();
  const Vec3& mean = packet.mean_momentum();
  const double s = std::min(0.5 * a * d * d, kMaxContourShift);
  const double residual_k = 2.0 * s / (d * d) - a;  // leftover frequency in p_z
  const double c2 = packet.norm_const() * packet.norm_const();
  const double scale = kTwoPiCubedInv * c2 * d * d * d;

  std::complex<double> total = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double pz_re = mean(2) + d * rule.nodes[k];
    const std::complex<double> pz(pz_re, -s);
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.0, residual_k * d * rule.nodes[k]));
    std::complex<double> inner = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
      const double px = mean(0) + d * rule.nodes[i];
      for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
        const double py = mean(1) + d * rule.nodes[j];
        const std::complex<double> p0 = std::sqrt(1.0 + px * px + py * py + pz * pz);
        inner += rule.weights[i] * rule.weights[j] / (2.0 * p0);
      }
    }
    total += rule.weights[k] * phase * inner;
  }
  // e^{s²/Δ² - s a} from completing the square, e^{-i p̄_z a} from the mean.
  const double envelope = std::exp(s * s / (d * d) - s * a);
  return scale * envelope * std::exp(std::complex<double>(0.0, -mean(2) * a)) * total;
}

}  // namespace

GaussianPacket GaussianPacket::make(double delta, const Vec3& mean_momentum, int nodes_per_axis) {
  if (!(delta > 0.0 && delta < kMaxPacketSpread)) {
    std::ostringstream os;
    os << "packet spread " << delta << " outside (0, " << kMaxPacketSpread << ")";
    fail(ErrorCode::kRegime, os.str());
  }
  require(nodes_per_axis >= 2, ErrorCode::kDomain, "need at least 2 quadrature nodes per axis");
  GaussianPacket packet(delta, mean_momentum, nodes_per_axis);
  packet.norm_const_ = 1.0 / std::sqrt(packet.norm(nodes_per_axis));
  return packet;
}

GaussianPacket make_packet(double delta) { return GaussianPacket::make(delta); }

double GaussianPacket::amplitude(const Vec3& p) const {
  return norm_const_ * std::exp(-(p - mean_).squaredNorm() / (2.0 * delta_ * delta_));
}

std::vector<MomentumNode> GaussianPacket::measure_nodes(int nodes_per_axis) const {
  const auto rule = GaussHermiteRule::make(nodes_per_axis);
  const double scale = kTwoPiCubedInv * norm_const_ * norm_const_ * delta_ * delta_ * delta_;
  std::vector<MomentumNode> out;
  out.reserve(rule.nodes.size() * rule.nodes.size() * rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i)
    for (std::size_t j = 0; j < rule.nodes.size(); ++j)
      for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        const Vec3 p = mean_ + delta_ * Vec3(rule.nodes[i], rule.nodes[j], rule.nodes[k]);
        const FourVector four = FourVector::on_shell(p);
        const double w = scale * rule.weights[i] * rule.weights[j] * rule.weights[k] / (2.0 * four.t);
        out.push_back({four, w});
      }
  return out;
}

double GaussianPacket::norm(int nodes_per_axis) const {
  double total = 0.0;
  for (const auto& node : measure_nodes(nodes_per_axis)) total += node.weight;
  return total;
}

std::complex<double> overlap(const GaussianPacket& packet, double a) {
  require(a >= 0.0 && std::isfinite(a), ErrorCode::kDomain, "translation distance must be >= 0");
  const int n = packet.nodes_per_axis();
  const auto coarse = overlap_quadrature(packet, a, n);
  const auto fine = overlap_quadrature(packet, a, 2 * n);
  if (std::abs(fine - coarse) > kOverlapConvergence) {
    std::ostringstream os;
    os << "overlap quadrature did not converge at a = " << a << " (node-doubling change "
       << std::abs(fine - coarse) << ")";
    fail(ErrorCode::kAccuracy, os.str());
  }
  return coarse;
}

double gaussian_overlap(double delta, double a) { return std::exp(-a * a * delta * delta / 4.0); }

double min_separation(double epsilon, double threshold) {
  require(threshold > 0.0 && threshold < 1.0, ErrorCode::kDomain, "threshold must be in (0, 1)");
  const GaussianPacket packet = make_packet(epsilon);
  const int n = packet.nodes_per_axis();
  auto magnitude = [&](double a) { return std::abs(overlap_quadrature(packet, a, n)); };

  double lo = 0.0;
  double hi = 1.0 / epsilon;
  while (magnitude(hi) > threshold) {
    lo = hi;
    hi *= 2.0;
    require(hi < 1e6 / epsilon, ErrorCode::kAccuracy, "overlap does not fall below threshold");
  }
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    (magnitude(mid) > threshold ? lo : hi) = mid;
  }
  overlap(packet, hi);  // convergence check at the answer
  return hi;
}

double reduced_compton_wavelength_angstrom(double mass_mev) {
  require(mass_mev > 0.0, ErrorCode::kDomain, "mass must be positive");
  return kHbarCMeVFm / mass_mev * 1e-5;
}

LatticeState make_lattice(int n, double spacing, const GaussianPacket& packet, const PureState& spin,
                          double threshold) {
  require(n >= 1, ErrorCode::kDomain, "lattice needs at least one particle");
  require(spacing > 0.0, ErrorCode::kDomain, "lattice spacing must be positive");
  const auto qubits = spin.n_qubits();
  require(qubits && *qubits == n, ErrorCode::kShape, "spin state must live on n qubits");
  double pair = 0.0;
  if (n > 1) {
    const double a_min = min_separation(packet.delta(), threshold);
    if (spacing < a_min) {
      std::ostringstream os;
      os << "spacing " << spacing << " below distinguishability bound " << a_min;
      fail(ErrorCode::kIndistinguishable, os.str());
    }
    // Overlap decreases with separation, so neighbours dominate.
    pair = std::abs(overlap(packet, spacing));
  }
  return LatticeState{n, spacing, packet, spin, pair};
}

}  // namespace relqi
