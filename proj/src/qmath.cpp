#include "relqi/qmath.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "relqi/error.hpp"

namespace relqi {

namespace {

bool all_finite(const CMatrix& m) {
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    const Complex z = m.data()[i];
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  }
  return true;
}

Eigen::VectorXd hermitian_eigenvalues(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Positive square root of a Hermitian PSD matrix; tiny negative eigenvalues
// from rounding are clipped.
CMatrix psd_sqrt(const CMatrix& h) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace

CMatrix identity(std::size_t dim) {
  return CMatrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
}

Mat2c pauli_x() {
  Mat2c m;
  m << 0, 1, 1, 0;
  return m;
}

Mat2c pauli_y() {
  Mat2c m;
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

Mat2c pauli_z() {
  Mat2c m;
  m << 1, 0, 0, -1;
  return m;
}

CMatrix tensor_product(const CMatrix& a, const CMatrix& b, std::size_t dim_cap) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > dim_cap || cols > dim_cap) {
    std::ostringstream os;
    os << "tensor product of dimension " << rows << "x" << cols << " exceeds cap " << dim_cap;
    fail(ErrorCode::kSize, os.str());
  }
  CMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

CMatrix tensor_power(const CMatrix& a, int n, std::size_t dim_cap) {
  require(n >= 1, ErrorCode::kDomain, "tensor power needs n >= 1");
  CMatrix out = a;
  for (int k = 1; k < n; ++k) out = tensor_product(out, a, dim_cap);
  return out;
}

// ---------------------------------------------------------------------------
// States

PureState PureState::from_amplitudes(CVector amplitudes, bool validate) {
  require(amplitudes.size() >= 1, ErrorCode::kShape, "empty state vector");
  if (validate) {
    require(all_finite(amplitudes), ErrorCode::kDomain, "state has non-finite amplitudes");
    const double norm = amplitudes.norm();
    if (std::abs(norm - 1.0) > tol::kNorm) {
      std::ostringstream os;
      os.precision(17);
      os << "state is not normalized (norm " << norm << ")";
      fail(ErrorCode::kDomain, os.str());
    }
  }
  return PureState(std::move(amplitudes));
}

PureState PureState::basis(std::size_t dim, std::size_t index) {
  require(index < dim, ErrorCode::kShape, "basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return PureState(std::move(v));
}

std::optional<int> PureState::n_qubits() const {
  const std::size_t d = dim();
  if (d < 2 || (d & (d - 1)) != 0) return std::nullopt;
  int n = 0;
  while ((std::size_t{1} << n) < d) ++n;
  return n;
}

DensityMatrix PureState::density() const {
  return DensityMatrix::from_matrix(amplitudes_ * amplitudes_.adjoint(), false);
}

std::optional<std::string> density_defect(const CMatrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) return "matrix is not square";
  if (!all_finite(m)) return "matrix has non-finite entries";
  const double herm = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol::kHermitian) return "matrix is not Hermitian";
  if (std::abs(m.trace() - Complex(1.0)) > tol::kTrace) return "trace differs from 1";
  if (min_hermitian_eigenvalue(m) < -tol::kPsd) return "matrix has a negative eigenvalue";
  return std::nullopt;
}

DensityMatrix DensityMatrix::from_matrix(CMatrix m, bool validate) {
  require(m.rows() == m.cols() && m.rows() >= 1, ErrorCode::kShape,
          "density matrix must be square and non-empty");
  if (validate) {
    if (auto defect = density_defect(m)) fail(ErrorCode::kDomain, "invalid density matrix: " + *defect);
  }
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  return DensityMatrix(identity(dim) / static_cast<double>(dim));
}

// ---------------------------------------------------------------------------
// Channels

QuantumChannel::QuantumChannel(std::vector<CMatrix> kraus, std::vector<double> weights)
    : kraus_(std::move(kraus)), weights_(std::move(weights)) {
  require(!kraus_.empty(), ErrorCode::kShape, "channel needs at least one Kraus operator");
  if (weights_.empty()) weights_.assign(kraus_.size(), 1.0);
  require(weights_.size() == kraus_.size(), ErrorCode::kShape, "one weight per Kraus operator");
  dim_out_ = static_cast<std::size_t>(kraus_.front().rows());
  dim_in_ = static_cast<std::size_t>(kraus_.front().cols());
  for (std::size_t k = 0; k < kraus_.size(); ++k) {
    require(static_cast<std::size_t>(kraus_[k].rows()) == dim_out_ &&
                static_cast<std::size_t>(kraus_[k].cols()) == dim_in_,
            ErrorCode::kShape, "Kraus operators must share one shape");
    require(weights_[k] >= 0.0 && std::isfinite(weights_[k]), ErrorCode::kDomain,
            "channel weights must be finite and nonnegative");
  }
}

QuantumChannel QuantumChannel::identity(std::size_t dim) {
  return QuantumChannel({relqi::identity(dim)});
}

QuantumChannel QuantumChannel::unitary(const CMatrix& u) { return QuantumChannel({u}); }

CMatrix QuantumChannel::choi() const {
  const auto din = static_cast<Eigen::Index>(dim_in_);
  const auto dout = static_cast<Eigen::Index>(dim_out_);
  CMatrix j = CMatrix::Zero(din * dout, din * dout);
  CVector vec(din * dout);
  for (std::size_t k = 0; k < kraus_.size(); ++k) {
    // vec[(i, a)] = K[a, i]
    for (Eigen::Index i = 0; i < din; ++i) vec.segment(i * dout, dout) = kraus_[k].col(i);
    j.noalias() += weights_[k] * (vec * vec.adjoint());
  }
  return j;
}

QuantumChannel QuantumChannel::compressed() const {
  const auto din = static_cast<Eigen::Index>(dim_in_);
  const auto dout = static_cast<Eigen::Index>(dim_out_);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(choi()));
  const double cutoff = 1e-15 * static_cast<double>(din);
  std::vector<CMatrix> ops;
  std::vector<double> w;
  for (Eigen::Index e = es.eigenvalues().size() - 1; e >= 0; --e) {
    const double lambda = es.eigenvalues()(e);
    if (lambda <= cutoff) continue;
    CMatrix k(dout, din);
    for (Eigen::Index i = 0; i < din; ++i) k.col(i) = es.eigenvectors().col(e).segment(i * dout, dout);
    ops.push_back(std::move(k));
    w.push_back(lambda);
  }
  require(!ops.empty(), ErrorCode::kChannelIntegrity, "channel has a vanishing Choi matrix");
  return QuantumChannel(std::move(ops), std::move(w));
}

double tp_defect(const QuantumChannel& ch) {
  CMatrix s = CMatrix::Zero(static_cast<Eigen::Index>(ch.dim_in()),
                            static_cast<Eigen::Index>(ch.dim_in()));
  for (std::size_t k = 0; k < ch.kraus().size(); ++k) {
    s.noalias() += ch.weights()[k] * (ch.kraus()[k].adjoint() * ch.kraus()[k]);
  }
  s -= identity(ch.dim_in());
  return hermitian_eigenvalues(hermitian_part(s)).cwiseAbs().maxCoeff();
}

ChoiReport choi_check(const QuantumChannel& ch) {
  ChoiReport r;
  r.tp_defect = tp_defect(ch);
  r.min_choi_eig = min_hermitian_eigenvalue(hermitian_part(ch.choi()));
  return r;
}

DensityMatrix apply_channel(const QuantumChannel& ch, const DensityMatrix& rho) {
  require(rho.dim() == ch.dim_in(), ErrorCode::kShape, "channel input dimension mismatch");
  const double defect = tp_defect(ch);
  if (defect > tol::kTracePreserving) {
    std::ostringstream os;
    os << "channel is not trace preserving (defect " << defect << ")";
    fail(ErrorCode::kChannelIntegrity, os.str());
  }
  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(ch.dim_out()),
                              static_cast<Eigen::Index>(ch.dim_out()));
  for (std::size_t k = 0; k < ch.kraus().size(); ++k) {
    const CMatrix& K = ch.kraus()[k];
    out.noalias() += ch.weights()[k] * (K * rho.matrix() * K.adjoint());
  }
  return DensityMatrix::from_matrix(std::move(out), false);
}

double choi_distance(const QuantumChannel& a, const QuantumChannel& b) {
  require(a.dim_in() == b.dim_in() && a.dim_out() == b.dim_out(), ErrorCode::kShape,
          "channels act on different spaces");
  const double din = static_cast<double>(a.dim_in());
  return trace_distance(CMatrix(a.choi() / din), CMatrix(b.choi() / din));
}

// ---------------------------------------------------------------------------
// Partial trace

CMatrix partial_trace(const CMatrix& m, std::span<const std::size_t> keep,
                      std::span<const std::size_t> dims) {
  const std::size_t total = std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                                            std::multiplies<>());
  require(!dims.empty() && total == static_cast<std::size_t>(m.rows()) && m.rows() == m.cols(),
          ErrorCode::kShape, "factor dimensions do not match the matrix");
  std::vector<bool> kept(dims.size(), false);
  for (std::size_t i = 0; i < keep.size(); ++i) {
    require(keep[i] < dims.size(), ErrorCode::kShape, "kept factor index out of range");
    require(i == 0 || keep[i] > keep[i - 1], ErrorCode::kShape, "kept factors must be ascending");
    kept[keep[i]] = true;
  }

  // Row-major strides: factor 0 is most significant.
  std::vector<std::size_t> stride(dims.size());
  std::size_t s = 1;
  for (std::size_t f = dims.size(); f-- > 0;) {
    stride[f] = s;
    s *= dims[f];
  }

  // Offsets of every kept / traced multi-index into the full index.
  auto offsets = [&](bool want_kept) {
    std::vector<std::size_t> offs{0};
    for (std::size_t f = 0; f < dims.size(); ++f) {
      if (kept[f] != want_kept) continue;
      std::vector<std::size_t> next;
      next.reserve(offs.size() * dims[f]);
      for (std::size_t o : offs)
        for (std::size_t d = 0; d < dims[f]; ++d) next.push_back(o + d * stride[f]);
      offs = std::move(next);
    }
    return offs;
  };
  const auto keep_off = offsets(true);
  const auto trace_off = offsets(false);

  const auto dk = static_cast<Eigen::Index>(keep_off.size());
  CMatrix out = CMatrix::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r) {
    for (Eigen::Index c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (std::size_t t : trace_off) {
        acc += m(static_cast<Eigen::Index>(keep_off[r] + t), static_cast<Eigen::Index>(keep_off[c] + t));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep,
                            std::span<const std::size_t> dims) {
  return DensityMatrix::from_matrix(partial_trace(rho.matrix(), keep, dims));
}

// ---------------------------------------------------------------------------
// Distances

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), ErrorCode::kShape, "fidelity of states with different dimension");
  const CMatrix sr = psd_sqrt(hermitian_part(rho.matrix()));
  const CMatrix inner = hermitian_part(sr * sigma.matrix() * sr);
  const double root_sum = hermitian_eigenvalues(inner).cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double fidelity(const PureState& a, const PureState& b) {
  require(a.dim() == b.dim(), ErrorCode::kShape, "fidelity of states with different dimension");
  return std::clamp(std::norm(a.amplitudes().dot(b.amplitudes())), 0.0, 1.0);
}

double trace_distance(const CMatrix& a, const CMatrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), ErrorCode::kShape,
          "trace distance of matrices with different shape");
  return 0.5 * hermitian_eigenvalues(hermitian_part(a - b)).cwiseAbs().sum();
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  require(rho.dim() == sigma.dim(), ErrorCode::kShape,
          "trace distance of states with different dimension");
  return std::clamp(trace_distance(rho.matrix(), sigma.matrix()), 0.0, 1.0);
}

double min_hermitian_eigenvalue(const CMatrix& h) { return hermitian_eigenvalues(h).minCoeff(); }

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

// ---------------------------------------------------------------------------
// Sampling and collective action

Mat2c haar_su2_sample(Rng& rng) {
  double q[4];
  double n2 = 0.0;
  do {
    n2 = 0.0;
    for (double& x : q) {
      x = rng.normal();
      n2 += x * x;
    }
  } while (n2 == 0.0);
  const double inv = 1.0 / std::sqrt(n2);
  const Complex alpha(q[0] * inv, q[1] * inv);
  const Complex beta(q[2] * inv, q[3] * inv);
  Mat2c u;
  u << alpha, beta, -std::conj(beta), std::conj(alpha);
  return u;
}

CMatrix apply_one_qubit_left(const CMatrix& m, const Mat2c& u, int qubit, int n) {
  require(qubit >= 0 && qubit < n && m.rows() == (Eigen::Index{1} << n), ErrorCode::kShape,
          "one-qubit operator does not fit the register");
  const Eigen::Index bit = Eigen::Index{1} << (n - 1 - qubit);
  CMatrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r & bit) continue;
    const Eigen::Index r1 = r | bit;
    out.row(r) = u(0, 0) * m.row(r) + u(0, 1) * m.row(r1);
    out.row(r1) = u(1, 0) * m.row(r) + u(1, 1) * m.row(r1);
  }
  return out;
}

CMatrix conjugate_collective(const CMatrix& m, const Mat2c& u, int n) {
  CMatrix a = m;
  for (int q = 0; q < n; ++q) a = apply_one_qubit_left(a, u, q, n);
  CMatrix b = a.adjoint();
  for (int q = 0; q < n; ++q) b = apply_one_qubit_left(b, u, q, n);
  return b.adjoint();
}

PureState random_pure_state(std::size_t dim, Rng& rng) {
  CVector v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = Complex(rng.normal(), rng.normal());
  v /= v.norm();
  return PureState::from_amplitudes(std::move(v));
}

DensityMatrix random_density_matrix(std::size_t dim, Rng& rng) {
  const auto d = static_cast<Eigen::Index>(dim);
  CMatrix g(d, d);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = Complex(rng.normal(), rng.normal());
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::from_matrix(hermitian_part(rho));
}

}  // namespace relqi
