#pragma once

// Decomposition of n spin-1/2 particles into total-spin sectors,
//   (C²)^{⊗n} = ⊕_j  H_{jR} ⊗ H_{jS},
// built by coupling one qubit at a time (left to right) with Clebsch–Gordan
// coefficients. H_{jR} (dimension 2j+1) carries the rotation; H_{jS}
// (dimension = number of coupling paths ending at j) is untouched by any
// collective rotation u^{⊗n} and holds the noiseless encodings.

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "relqi/qmath.hpp"

namespace relqi {

/// Integer or half-integer angular-momentum quantum number, stored as 2j.
class HalfInt {
 public:
  constexpr HalfInt() = default;
  static constexpr HalfInt from_twice(int twice) {
    HalfInt h;
    h.twice_ = twice;
    return h;
  }
  static constexpr HalfInt from_int(int value) { return from_twice(2 * value); }
  /// Accepts "1", "3/2", "0.5", "-1/2".
  static HalfInt parse(std::string_view text);

  constexpr int twice() const { return twice_; }
  constexpr double value() const { return 0.5 * twice_; }
  constexpr bool is_integer() const { return twice_ % 2 == 0; }
  std::string str() const;

  constexpr HalfInt operator+(HalfInt o) const { return from_twice(twice_ + o.twice_); }
  constexpr HalfInt operator-(HalfInt o) const { return from_twice(twice_ - o.twice_); }
  constexpr HalfInt operator-() const { return from_twice(-twice_); }
  constexpr auto operator<=>(const HalfInt&) const = default;

 private:
  int twice_ = 0;
};

inline constexpr HalfInt kHalf = HalfInt::from_twice(1);

/// ⟨j1 m1; j2 m2 | j m⟩ in the Condon–Shortley convention, from the Racah
/// closed form with exact rational arithmetic. Returns 0 when m ≠ m1 + m2.
/// Throws a domain error for a violated triangle or inadmissible m values.
double clebsch_gordan(HalfInt j1, HalfInt j2, HalfInt j, HalfInt m1, HalfInt m2, HalfInt m);

/// Intermediate total spins j_1 = 1/2, j_2, …, j_n of a sequential coupling.
struct CouplingPath {
  std::vector<HalfInt> intermediate;

  int n() const { return static_cast<int>(intermediate.size()); }
  HalfInt final_j() const { return intermediate.back(); }
  bool admissible() const;
  auto operator<=>(const CouplingPath&) const = default;
};

/// All admissible paths of length n ending at j, in lexicographic order.
std::vector<CouplingPath> coupling_paths(int n, HalfInt j);

struct SchurLabel {
  HalfInt j;
  HalfInt m;
  std::size_t path_index = 0;
};

struct SchurSector {
  HalfInt j;
  std::size_t offset = 0;   // first row of the sector
  std::size_t rep_dim = 0;  // 2j + 1
  std::size_t multiplicity = 0;
  std::vector<CouplingPath> paths;

  std::size_t size() const { return rep_dim * multiplicity; }
  /// Row of |j, m, path⟩; rows are ordered m = j, j-1, …, -j (outer) × path
  /// (inner), so the sector is H_{jR} ⊗ H_{jS} in Kronecker order.
  std::size_t row(HalfInt m, std::size_t path_index) const;
};

inline constexpr int kMaxSchurQubits = 10;

class SchurBasis {
 public:
  int n() const { return n_; }
  /// Rows are the coupled basis vectors: coupled = unitary · computational.
  const CMatrix& unitary() const { return unitary_; }
  const std::vector<SchurLabel>& row_labels() const { return labels_; }
  const std::vector<SchurSector>& sectors() const { return sectors_; }
  /// Throws a domain error if n has no sector j.
  const SchurSector& sector(HalfInt j) const;

  CMatrix to_schur(const CMatrix& m) const { return unitary_ * m * unitary_.adjoint(); }
  CMatrix from_schur(const CMatrix& m) const { return unitary_.adjoint() * m * unitary_; }

 private:
  friend SchurBasis schur_basis(int n);
  int n_ = 0;
  CMatrix unitary_;
  std::vector<SchurLabel> labels_;
  std::vector<SchurSector> sectors_;
};

/// Sequential-coupling Schur basis for 1 ≤ n ≤ 10 qubits.
SchurBasis schur_basis(int n);

/// dim H_{jS}, counted over coupling paths. Throws a domain error unless
/// 0 ≤ j ≤ n/2 with n - 2j even.
std::uint64_t multiplicity(int n, HalfInt j);
/// C(n, n/2 - j) - C(n, n/2 - j - 1)
std::uint64_t multiplicity_formula(int n, HalfInt j);
/// Allowed total spins for n qubits, ascending.
std::vector<HalfInt> total_spins(int n);

/// floor(log₂ max_j multiplicity(n, j)), n ≥ 2.
int logical_qubit_count(int n);

/// Total spin J² = (Σ_i σ⃗_i / 2)² on n qubits.
CMatrix total_spin_squared(int n);
/// Spin-j matrices (J_x, J_y, J_z) in the basis m = j, …, -j.
std::array<CMatrix, 3> spin_matrices(HalfInt j);
/// Spin-j representation of an SU(2) element, exp(-iθ n̂·J⃗) for u = exp(-i(θ/2) n̂·σ⃗).
CMatrix wigner_d(HalfInt j, const Mat2c& u);

/// Permutation operator exchanging qubits i and k of n.
CMatrix swap_operator(int n, int i, int k);

class NoiselessCodec {
 public:
  /// Wraps a stored isometry after checking isometry†·isometry = 1.
  static NoiselessCodec from_parts(int n, HalfInt j, CMatrix isometry);

  int n() const { return n_; }
  HalfInt j() const { return j_; }
  HalfInt fiducial_m() const { return j_; }
  std::size_t logical_dim() const { return static_cast<std::size_t>(isometry_.cols()); }
  const CMatrix& isometry() const { return isometry_; }

 private:
  NoiselessCodec(int n, HalfInt j, CMatrix iso) : n_(n), j_(j), isometry_(std::move(iso)) {}
  int n_;
  HalfInt j_;
  CMatrix isometry_;
};

/// Logical basis state k ↦ |j, m = j, path k⟩. Throws a capacity error when
/// logical_dim exceeds multiplicity(n, j).
NoiselessCodec make_codec(const SchurBasis& basis, HalfInt j, std::size_t logical_dim);
NoiselessCodec make_codec(int n, HalfInt j, std::size_t logical_dim);

PureState encode(const NoiselessCodec& codec, const PureState& logical);

struct DecodeResult {
  PureState logical;
  double in_code_weight = 0.0;
};
/// Projects onto the code image; throws an out-of-code error below weight 1e-6.
DecodeResult decode(const NoiselessCodec& codec, const PureState& physical);

/// Logical matrix induced by SWAP(i, k) on the code space.
CMatrix exchange_logical_action(const NoiselessCodec& codec, int i, int k);

struct SingletOutcome {
  double prob_singlet = 0.0;
  std::optional<PureState> post_singlet;
  std::optional<PureState> post_orthogonal;
};
/// Projective measurement {P_singlet(i,k), 1 - P_singlet(i,k)}.
SingletOutcome singlet_measurement(const PureState& state, int i, int k);

struct SectorWeight {
  HalfInt j;
  double weight = 0.0;
};
std::vector<SectorWeight> sector_weights(const DensityMatrix& rho, const SchurBasis& basis);

struct BlockSplit {
  double weight = 0.0;
  DensityMatrix rho_jR;
  DensityMatrix sigma_jS;
  bool correlated = false;
};
/// Normalized j-block and its two marginals on H_{jR} and H_{jS}. Throws an
/// empty-sector error when the block weight is below 1e-12.
BlockSplit block_extract(const DensityMatrix& rho, const SchurBasis& basis, HalfInt j);

/// State supported on one sector, equal to rho_jR ⊗ sigma_jS there.
DensityMatrix assemble_block(const SchurBasis& basis, HalfInt j, const DensityMatrix& rho_jR,
                             const DensityMatrix& sigma_jS);

nlohmann::json codec_to_json(const NoiselessCodec& codec);
NoiselessCodec codec_from_json(const nlohmann::json& j);

}  // namespace relqi
