#pragma once

// Gaussian momentum wavepackets ψ(p) = C exp(-(p - p̄)²/2Δ²) with the invariant
// measure dμ(p) = (2π)^{-3} (2p⁰)^{-1} d³p, their translation overlaps, and
// the one-dimensional lattice of distinguishable particles built from them.
// Momenta are in units of mc and lengths in units of ħ/mc.

#include <complex>
#include <vector>

#include "relqi/lorentz.hpp"
#include "relqi/qmath.hpp"

namespace relqi {

inline constexpr double kMaxPacketSpread = 0.2;
inline constexpr int kDefaultQuadratureNodes = 32;
inline constexpr double kDistinguishabilityThreshold = 0.01;
inline constexpr double kProtonMassMeV = 938.27208816;

struct MomentumNode {
  FourVector p;
  double weight = 0.0;  // dμ weight × |ψ(p)|²
};

class GaussianPacket {
 public:
  /// Requires 0 < delta < 0.2. C is fixed by quadrature so ∫dμ|ψ|² = 1.
  static GaussianPacket make(double delta, const Vec3& mean_momentum = Vec3::Zero(),
                             int nodes_per_axis = kDefaultQuadratureNodes);

  double delta() const { return delta_; }
  const Vec3& mean_momentum() const { return mean_; }
  double norm_const() const { return norm_const_; }
  int nodes_per_axis() const { return nodes_; }

  double amplitude(const Vec3& p) const;

  /// Tensor Gauss–Hermite nodes for ∫dμ(p)|ψ(p)|² g(p) ≈ Σ weight·g(p).
  std::vector<MomentumNode> measure_nodes(int nodes_per_axis) const;
  std::vector<MomentumNode> measure_nodes() const { return measure_nodes(nodes_); }

  /// ∫dμ|ψ|² evaluated with the given node count.
  double norm(int nodes_per_axis) const;

 private:
  GaussianPacket(double delta, const Vec3& mean, int nodes)
      : delta_(delta), mean_(mean), nodes_(nodes) {}
  double delta_;
  Vec3 mean_;
  int nodes_;
  double norm_const_ = 1.0;
};

GaussianPacket make_packet(double delta);

/// ⟨Ψ|Ψ_a⟩ for a translation by a along z. Throws an accuracy error if doubling
/// the node count moves the value by more than 1e-6.
std::complex<double> overlap(const GaussianPacket& packet, double a);

/// The nonrelativistic form exp(-a²Δ²/4).
double gaussian_overlap(double delta, double a);

/// Smallest a with |⟨Ψ|Ψ_a⟩| ≤ threshold for a packet of spread epsilon.
double min_separation(double epsilon, double threshold = kDistinguishabilityThreshold);

/// ħ/(mc) in ångström for a particle of the given rest energy in MeV.
double reduced_compton_wavelength_angstrom(double mass_mev);

/// Converts a length in units of ħ/mc to ångström.
inline double natural_length_to_angstrom(double length, double mass_mev) {
  return length * reduced_compton_wavelength_angstrom(mass_mev);
}

struct LatticeState {
  int n = 0;
  double spacing = 0.0;
  GaussianPacket packet;
  PureState spin;
  /// |overlap| between neighbouring sites, the largest pairwise overlap.
  double max_pair_overlap = 0.0;
};

/// Particles at z = k·spacing, k = 1..n, sharing one spin register. Throws an
/// indistinguishability error when spacing < min_separation(delta).
LatticeState make_lattice(int n, double spacing, const GaussianPacket& packet, const PureState& spin,
                          double threshold = kDistinguishabilityThreshold);

}  // namespace relqi
