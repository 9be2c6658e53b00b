#pragma once

// Massless particles: the little group of the null direction (k, 0, 0, k),
// helicity phases, and the two-photon code spanned by
//   |Ψ_p^±⟩ = (|p,+⟩|p,−⟩ ± |p,−⟩|p,+⟩)/√2,
// whose amplitudes no Lorentz transformation changes. Momenta are in units of
// the reference frequency k.

#include <array>
#include <cstdint>

#include "relqi/lorentz.hpp"
#include "relqi/qmath.hpp"

namespace relqi {

inline constexpr double kLightConeTolerance = 1e-10;
inline constexpr double kTriangularityTolerance = 1e-9;

/// True for p⁰ > 0 and |p·p| ≤ 1e-10·(p⁰)².
bool is_forward_null(const FourVector& p);

/// Takes (1, 0, 0, 1) to p: a z-boost of rapidity ln|p⃗| followed by the
/// rotation carrying ẑ to p̂ about ẑ × p̂. For p̂ = -ẑ the rotation is by π
/// about x̂. Throws a shell error off the forward light cone.
LorentzElement massless_standard_boost(const FourVector& p);

struct LittleGroupElement {
  double omega = 0.0;  // [0, 2π)
  Complex beta;        // null-rotation part, diagnostic only
  /// w = [[e^{-iω/2}, β e^{iω/2}], [0, e^{iω/2}]], so that a rotation by θ
  /// about the momentum axis has ω = θ.
  Mat2c sl2;
  /// |w₁₀| before it is zeroed in sl2.
  double triangularity_defect = 0.0;
};

/// w = l(Λp)⁻¹ A l(p) split as a null rotation times R_z(ω). Throws a
/// convention error if w is not upper triangular within 1e-9.
LittleGroupElement little_group_phase(const LorentzElement& lambda, const FourVector& p);

class PhotonMode {
 public:
  /// Validates the momentum and |a₊|² + |a₋|² = 1 within 1e-12.
  static PhotonMode make(const FourVector& momentum, Complex a_plus, Complex a_minus);

  const FourVector& momentum() const { return momentum_; }
  Complex a_plus() const { return a_plus_; }
  Complex a_minus() const { return a_minus_; }

 private:
  friend PhotonMode apply_lorentz_photon(const LorentzElement&, const PhotonMode&);
  PhotonMode(const FourVector& p, Complex ap, Complex am) : momentum_(p), a_plus_(ap), a_minus_(am) {}
  FourVector momentum_;
  Complex a_plus_;
  Complex a_minus_;
};

/// Helicity index order of two-photon amplitudes.
enum HelicityPair : std::size_t { kPlusPlus = 0, kPlusMinus = 1, kMinusPlus = 2, kMinusMinus = 3 };

/// Two photons in ordered modes (first packet, second packet) sharing one
/// momentum label.
class TwoPhotonState {
 public:
  static TwoPhotonState make(const FourVector& momentum, const std::array<Complex, 4>& amplitudes);

  const FourVector& momentum() const { return momentum_; }
  const std::array<Complex, 4>& amplitudes() const { return amplitudes_; }
  /// Weight on ++ and −−, the components with nonzero total helicity.
  double out_of_code_weight() const;

 private:
  friend TwoPhotonState apply_lorentz_photon(const LorentzElement&, const TwoPhotonState&);
  TwoPhotonState(const FourVector& p, const std::array<Complex, 4>& a) : momentum_(p), amplitudes_(a) {}
  FourVector momentum_;
  std::array<Complex, 4> amplitudes_;
};

/// |p, σ⟩ ↦ e^{iσω}|Λp, σ⟩.
PhotonMode apply_lorentz_photon(const LorentzElement& lambda, const PhotonMode& state);
/// |p, σ₁⟩|p, σ₂⟩ ↦ e^{i(σ₁+σ₂)ω}|Λp, σ₁⟩|Λp, σ₂⟩; components with σ₁ + σ₂ = 0
/// are left untouched.
TwoPhotonState apply_lorentz_photon(const LorentzElement& lambda, const TwoPhotonState& state);

/// α|0⟩ + β|1⟩ ↦ α|Ψ_p^+⟩ + β|Ψ_p^−⟩.
TwoPhotonState photon_codec_encode(const PureState& logical, const FourVector& p);
/// Inverse of the encoder. Throws an out-of-code error when the ++/−− weight
/// exceeds 1e-12.
PureState photon_codec_decode(const TwoPhotonState& state);

/// floor(log₂ C(n, n/2)), the qubits storable in the zero-helicity sector of n
/// photons. Throws a parity error for odd n and a domain error for n < 2 or
/// n > 60.
int dephasing_logical_count(int n);

}  // namespace relqi
