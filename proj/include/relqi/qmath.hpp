#pragma once

// Dense complex linear algebra and the quantum state / channel types shared by
// every other module. Matrices are Eigen dynamic complex matrices; the state
// and channel classes are validated immutable wrappers around them.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relqi/rng.hpp"

namespace relqi {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Mat2c = Eigen::Matrix2cd;

/// Largest Hilbert-space dimension any operation will build by default.
inline constexpr std::size_t kDefaultDimCap = std::size_t{1} << 14;

namespace tol {
inline constexpr double kNorm = 1e-12;
inline constexpr double kHermitian = 1e-12;
inline constexpr double kTrace = 1e-12;
inline constexpr double kPsd = 1e-10;
inline constexpr double kTracePreserving = 1e-10;
inline constexpr double kChoiPsd = 1e-10;
}  // namespace tol

CMatrix identity(std::size_t dim);
Mat2c pauli_x();
Mat2c pauli_y();
Mat2c pauli_z();

/// Kronecker product a ⊗ b. Throws a size error when the result would exceed
/// `dim_cap` rows or columns.
CMatrix tensor_product(const CMatrix& a, const CMatrix& b, std::size_t dim_cap = kDefaultDimCap);

/// a^{⊗n}
CMatrix tensor_power(const CMatrix& a, int n, std::size_t dim_cap = kDefaultDimCap);

class DensityMatrix;

/// Normalized state vector. Dimension is arbitrary (logical code spaces need
/// not be qubit registers); n_qubits() is set when it is a power of two.
class PureState {
 public:
  static PureState from_amplitudes(CVector amplitudes, bool validate = true);
  static PureState basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amplitudes_.size()); }
  std::optional<int> n_qubits() const;
  const CVector& amplitudes() const { return amplitudes_; }
  double norm() const { return amplitudes_.norm(); }

  DensityMatrix density() const;

 private:
  explicit PureState(CVector amplitudes) : amplitudes_(std::move(amplitudes)) {}
  CVector amplitudes_;
};

class DensityMatrix {
 public:
  /// Validates Hermiticity, unit trace and positivity unless `validate` is false.
  static DensityMatrix from_matrix(CMatrix m, bool validate = true);
  static DensityMatrix maximally_mixed(std::size_t dim);

  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  const CMatrix& matrix() const { return matrix_; }
  Complex operator()(Eigen::Index r, Eigen::Index c) const { return matrix_(r, c); }

 private:
  explicit DensityMatrix(CMatrix m) : matrix_(std::move(m)) {}
  CMatrix matrix_;
};

/// Describes why a matrix is not a density matrix, or nullopt if it is one.
std::optional<std::string> density_defect(const CMatrix& m);

struct ChoiReport {
  double tp_defect = 0.0;
  double min_choi_eig = 0.0;

  bool accepted() const {
    return tp_defect <= tol::kTracePreserving && min_choi_eig >= -tol::kChoiPsd;
  }
};

/// CPTP map in weighted Kraus form, ρ ↦ Σ_k w_k K_k ρ K_k†.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<CMatrix> kraus, std::vector<double> weights = {});

  static QuantumChannel identity(std::size_t dim);
  static QuantumChannel unitary(const CMatrix& u);

  std::size_t dim_in() const { return dim_in_; }
  std::size_t dim_out() const { return dim_out_; }
  const std::vector<CMatrix>& kraus() const { return kraus_; }
  const std::vector<double>& weights() const { return weights_; }

  /// Unnormalized Choi matrix Σ_{ij} |i⟩⟨j| ⊗ E(|i⟩⟨j|), trace = dim_in.
  CMatrix choi() const;

  /// Equivalent channel with at most dim_in·dim_out Kraus operators, obtained
  /// from the eigendecomposition of the Choi matrix.
  QuantumChannel compressed() const;

 private:
  std::size_t dim_in_ = 0;
  std::size_t dim_out_ = 0;
  std::vector<CMatrix> kraus_;
  std::vector<double> weights_;
};

double tp_defect(const QuantumChannel& ch);
ChoiReport choi_check(const QuantumChannel& ch);

/// Throws a channel-integrity error for channels that are not trace preserving.
DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho);

/// Trace distance between the trace-normalized Choi states of two channels.
double choi_distance(const QuantumChannel& a, const QuantumChannel& b);

/// Reduced state on the factors listed in `keep` (ascending, factor 0 is the
/// most significant index). `dims` lists every factor dimension.
DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep,
                            std::span<const std::size_t> dims);
CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> keep,
                      std::span<const std::size_t> dims);

/// Uhlmann fidelity (tr|√ρ√σ|)².
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const PureState& a, const PureState& b);
double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma);
double trace_distance(const CMatrix& a, const CMatrix& b);

double min_hermitian_eigenvalue(const CMatrix& h);
CMatrix hermitian_part(const CMatrix& m);

/// Haar-random SU(2) element from a normalized Gaussian quaternion.
Mat2c haar_su2_sample(Rng& rng);

/// Applies u to qubit `qubit` of every column of `m` (an n-qubit operator or
/// column stack), i.e. (1⊗…⊗u⊗…⊗1)·m.
CMatrix apply_one_qubit_left(const CMatrix& m, const Mat2c& u, int qubit, int n);

/// u^{⊗n} m u^{†⊗n} without forming the 2^n × 2^n collective unitary.
CMatrix conjugate_collective(const CMatrix& m, const Mat2c& u, int n);

PureState random_pure_state(std::size_t dim, Rng& rng);
DensityMatrix random_density_matrix(std::size_t dim, Rng& rng);

}  // namespace relqi
