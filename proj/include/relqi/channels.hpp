#pragma once

// Single-qubit decoherence from boosts and unknown reference frames, and the
// collective N-qubit twirl over SU(2).

#include <cstdint>
#include <utility>
#include <vector>

#include "relqi/qmath.hpp"
#include "relqi/schur.hpp"
#include "relqi/wavepacket.hpp"

namespace relqi {

struct GammaParam {
  double v = 0.0;
  double delta = 0.0;
  double gamma = 0.0;
};

/// Γ = (1 - √(1-v²))Δ/v, evaluated as vΔ/(1 + √(1-v²)) so small v loses no
/// digits. Throws a domain error for v outside (0, 1) or delta ≤ 0.
GammaParam gamma(double v, double delta);

inline constexpr double kMaxApproxGamma = 0.5;

/// ρ ↦ (1 - Γ²/4)ρ + (Γ²/8)(σx ρ σx + σy ρ σy). Throws a regime error for Γ ≥ 0.5.
QuantumChannel boost_channel_approx(const GammaParam& g);

/// Spin channel seen by an observer boosted with speed v along z:
/// ρ ↦ ∫dμ|ψ(p)|² D(Ω) ρ D(Ω)†, with Ω the Wigner rotation of each momentum.
/// Uses the packet's Gauss–Hermite grid and throws an accuracy error if a finer
/// grid moves the Choi matrix by more than 1e-9.
QuantumChannel boost_channel_exact(double v, const GaussianPacket& packet);

/// Discrete distribution over boost speeds.
class BoostPrior {
 public:
  /// Normalizes the weights. Throws a domain error for v outside (0, 1),
  /// negative weights, an empty grid or zero total weight.
  static BoostPrior from_weights(std::vector<std::pair<double, double>> grid);
  static BoostPrior point_mass(double v);
  static BoostPrior uniform(const std::vector<double>& speeds);

  const std::vector<std::pair<double, double>>& grid() const { return grid_; }

 private:
  explicit BoostPrior(std::vector<std::pair<double, double>> grid) : grid_(std::move(grid)) {}
  std::vector<std::pair<double, double>> grid_;
};

/// Σ_i p(v_i) · boost_channel_approx(gamma(v_i, delta)), kept in three-Kraus form.
QuantumChannel boost_mixture(const BoostPrior& prior, double delta);

enum class TwirlMethod { kExactProjector, kMonteCarlo };

std::string_view twirl_method_name(TwirlMethod m);

struct TwirlResult {
  DensityMatrix output;
  TwirlMethod method = TwirlMethod::kExactProjector;
  std::uint64_t samples = 0;  // Monte Carlo only
  double stat_tol = 0.0;      // 3/√samples, Monte Carlo only
};

inline constexpr int kMaxExactTwirlQubits = 8;
inline constexpr std::uint64_t kMaxTwirlSamples = 100'000'000;

/// Average of u ρ u† over Haar-random u ∈ SU(2).
TwirlResult twirl_single(const DensityMatrix& rho, TwirlMethod method, std::uint64_t samples = 0,
                         std::uint64_t seed = 0);

/// Average of u^{⊗N} ρ u^{†⊗N}. The exact method replaces every total-spin
/// block by I/(2j+1) ⊗ tr_R(block) and drops the blocks between sectors; it is
/// limited to N ≤ 8.
TwirlResult collective_twirl(const DensityMatrix& rho, const SchurBasis& basis, TwirlMethod method,
                             std::uint64_t samples = 0, std::uint64_t seed = 0);

}  // namespace relqi
