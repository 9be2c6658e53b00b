#include "relqi/schur.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include <boost/multiprecision/cpp_int.hpp>

#include "relqi/error.hpp"
#include "relqi/lorentz.hpp"
#include "relqi/state_io.hpp"

namespace relqi {

namespace {

using boost::multiprecision::cpp_int;
using boost::multiprecision::cpp_rational;

cpp_int factorial(int k) {
  cpp_int f = 1;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  std::uint64_t r = 1;
  for (int i = 1; i <= k; ++i) r = r * static_cast<std::uint64_t>(n - k + i) / static_cast<std::uint64_t>(i);
  return r;
}

void check_sector(int n, HalfInt j) {
  if (n < 1) fail(ErrorCode::kDomain, "need at least one qubit");
  if (j.twice() < 0 || j.twice() > n) {
    fail(ErrorCode::kDomain, "total spin " + j.str() + " outside [0, " + std::to_string(n) + "/2]");
  }
  if ((n - j.twice()) % 2 != 0) {
    fail(ErrorCode::kDomain, "total spin " + j.str() + " has the wrong parity for " + std::to_string(n) +
                                 " qubits");
  }
}

// Exchanges bits i and k (qubit 0 = most significant) of a basis index.
std::size_t swap_bits(std::size_t index, int n, int i, int k) {
  const std::size_t bi = std::size_t{1} << (n - 1 - i);
  const std::size_t bk = std::size_t{1} << (n - 1 - k);
  const bool vi = index & bi;
  const bool vk = index & bk;
  if (vi == vk) return index;
  return index ^ bi ^ bk;
}

// SU(2) element as exp(-i(θ/2) n̂·σ⃗) without sign canonicalization; the sign
// matters for half-integer representations.
std::pair<Vec3, double> su2_axis_angle(const Mat2c& u) {
  const double c = std::clamp(0.5 * (u(0, 0) + u(1, 1)).real(), -1.0, 1.0);
  const Vec3 s_n(-u(0, 1).imag(), -u(0, 1).real(), -u(0, 0).imag());
  const double s = s_n.norm();
  if (s < 1e-300) return {Vec3::UnitZ(), c > 0 ? 0.0 : 2.0 * std::numbers::pi};
  return {s_n / s, 2.0 * std::atan2(s, c)};
}

}  // namespace

// ---------------------------------------------------------------------------
// HalfInt

HalfInt HalfInt::parse(std::string_view text) {
  auto bad = [&]() -> HalfInt { fail(ErrorCode::kDomain, "cannot parse spin value '" + std::string(text) + "'"); };
  if (text.empty()) return bad();
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    int num = 0;
    const auto numer = text.substr(0, slash);
    const auto denom = text.substr(slash + 1);
    if (denom != "2") return bad();
    auto [p, ec] = std::from_chars(numer.data(), numer.data() + numer.size(), num);
    if (ec != std::errc() || p != numer.data() + numer.size()) return bad();
    return from_twice(num);
  }
  double v = 0.0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || p != text.data() + text.size()) return bad();
  const double twice = 2.0 * v;
  if (std::abs(twice - std::round(twice)) > 1e-12) return bad();
  return from_twice(static_cast<int>(std::lround(twice)));
}

std::string HalfInt::str() const {
  if (is_integer()) return std::to_string(twice_ / 2);
  return std::to_string(twice_) + "/2";
}

// ---------------------------------------------------------------------------
// Clebsch–Gordan

double clebsch_gordan(HalfInt j1, HalfInt j2, HalfInt j, HalfInt m1, HalfInt m2, HalfInt m) {
  const int J1 = j1.twice(), J2 = j2.twice(), J = j.twice();
  const int M1 = m1.twice(), M2 = m2.twice(), M = m.twice();
  if (J1 < 0 || J2 < 0 || J < 0) fail(ErrorCode::kDomain, "negative angular momentum");
  if (J < std::abs(J1 - J2) || J > J1 + J2 || (J1 + J2 + J) % 2 != 0) {
    fail(ErrorCode::kDomain, "(" + j1.str() + ", " + j2.str() + ", " + j.str() + ") violates the triangle rule");
  }
  auto admissible_m = [](int jj, int mm) { return std::abs(mm) <= jj && (jj + mm) % 2 == 0; };
  if (!admissible_m(J1, M1) || !admissible_m(J2, M2) || !admissible_m(J, M)) {
    fail(ErrorCode::kDomain, "magnetic quantum number out of range");
  }
  if (M != M1 + M2) return 0.0;

  // All arguments below are integers (half of an even number).
  const int a = (J1 + J2 - J) / 2, b = (J1 - J2 + J) / 2, c = (-J1 + J2 + J) / 2;
  const int d = (J1 + J2 + J) / 2 + 1;
  cpp_rational pre = cpp_rational(cpp_int(J + 1) * factorial(a) * factorial(b) * factorial(c), factorial(d));
  pre *= factorial((J + M) / 2) * factorial((J - M) / 2) * factorial((J1 - M1) / 2) *
         factorial((J1 + M1) / 2) * factorial((J2 - M2) / 2) * factorial((J2 + M2) / 2);

  cpp_rational sum = 0;
  for (int k = 0;; ++k) {
    const int f1 = a - k;
    const int f2 = (J1 - M1) / 2 - k;
    const int f3 = (J2 + M2) / 2 - k;
    if (f1 < 0 || f2 < 0 || f3 < 0) break;
    const int f4 = (J - J2 + M1) / 2 + k;
    const int f5 = (J - J1 - M2) / 2 + k;
    if (f4 < 0 || f5 < 0) continue;
    const cpp_int denom = factorial(k) * factorial(f1) * factorial(f2) * factorial(f3) * factorial(f4) * factorial(f5);
    sum += cpp_rational((k % 2 == 0) ? 1 : -1, denom);
  }
  if (sum == 0) return 0.0;
  const double magnitude = std::sqrt(static_cast<double>(pre * sum * sum));
  return sum > 0 ? magnitude : -magnitude;
}

// ---------------------------------------------------------------------------
// Coupling paths and the basis

bool CouplingPath::admissible() const {
  if (intermediate.empty() || intermediate.front() != kHalf) return false;
  for (std::size_t k = 1; k < intermediate.size(); ++k) {
    const int step = intermediate[k].twice() - intermediate[k - 1].twice();
    if ((step != 1 && step != -1) || intermediate[k].twice() < 0) return false;
  }
  return true;
}

std::vector<CouplingPath> coupling_paths(int n, HalfInt j) {
  check_sector(n, j);
  std::vector<CouplingPath> done;
  std::vector<CouplingPath> frontier{CouplingPath{{kHalf}}};
  for (int k = 1; k < n; ++k) {
    std::vector<CouplingPath> next;
    for (const auto& p : frontier) {
      const HalfInt last = p.final_j();
      for (int step : {-1, 1}) {
        const HalfInt nj = HalfInt::from_twice(last.twice() + step);
        // Prune paths that can no longer reach j.
        if (nj.twice() < 0 || std::abs(nj.twice() - j.twice()) > n - 1 - k) continue;
        CouplingPath q = p;
        q.intermediate.push_back(nj);
        next.push_back(std::move(q));
      }
    }
    frontier = std::move(next);
  }
  for (auto& p : frontier)
    if (p.final_j() == j) done.push_back(std::move(p));
  std::sort(done.begin(), done.end());
  return done;
}

std::size_t SchurSector::row(HalfInt m, std::size_t path_index) const {
  require(std::abs(m.twice()) <= j.twice() && (j.twice() - m.twice()) % 2 == 0, ErrorCode::kDomain,
          "m = " + m.str() + " not in sector j = " + j.str());
  require(path_index < multiplicity, ErrorCode::kDomain, "path index out of range");
  const auto m_index = static_cast<std::size_t>((j.twice() - m.twice()) / 2);
  return offset + m_index * multiplicity + path_index;
}

const SchurSector& SchurBasis::sector(HalfInt j) const {
  for (const auto& s : sectors_)
    if (s.j == j) return s;
  fail(ErrorCode::kDomain, "no total-spin sector j = " + j.str() + " for " + std::to_string(n_) + " qubits");
}

SchurBasis schur_basis(int n) {
  if (n < 1 || n > kMaxSchurQubits) {
    fail(ErrorCode::kSize, "Schur basis supports 1..." + std::to_string(kMaxSchurQubits) + " qubits, got " +
                               std::to_string(n));
  }
  // Coupled vectors per path prefix; entry [i] holds m = j - i.
  using Vectors = std::vector<Eigen::VectorXd>;
  std::map<CouplingPath, Vectors> current;
  current[CouplingPath{{kHalf}}] = {Eigen::Vector2d(1.0, 0.0), Eigen::Vector2d(0.0, 1.0)};

  for (int k = 1; k < n; ++k) {
    std::map<CouplingPath, Vectors> next;
    const Eigen::Index new_dim = Eigen::Index{1} << (k + 1);
    for (const auto& [path, vecs] : current) {
      const HalfInt jp = path.final_j();
      for (int step : {1, -1}) {
        const HalfInt jn = HalfInt::from_twice(jp.twice() + step);
        if (jn.twice() < 0) continue;
        Vectors out;
        for (int mt = jn.twice(); mt >= -jn.twice(); mt -= 2) {
          Eigen::VectorXd v = Eigen::VectorXd::Zero(new_dim);
          for (int ms : {1, -1}) {
            const int mp = mt - ms;
            if (std::abs(mp) > jp.twice()) continue;
            const double cg = clebsch_gordan(jp, kHalf, jn, HalfInt::from_twice(mp), HalfInt::from_twice(ms),
                                             HalfInt::from_twice(mt));
            if (cg == 0.0) continue;
            const auto& prev = vecs[static_cast<std::size_t>((jp.twice() - mp) / 2)];
            const Eigen::Index bit = ms == 1 ? 0 : 1;  // |0⟩ is spin up
            for (Eigen::Index idx = 0; idx < prev.size(); ++idx) v(2 * idx + bit) += cg * prev(idx);
          }
          out.push_back(std::move(v));
        }
        CouplingPath q = path;
        q.intermediate.push_back(jn);
        next.emplace(std::move(q), std::move(out));
      }
    }
    current = std::move(next);
  }

  SchurBasis basis;
  basis.n_ = n;
  const auto dim = Eigen::Index{1} << n;
  basis.unitary_ = CMatrix::Zero(dim, dim);
  std::size_t offset = 0;
  for (HalfInt j : total_spins(n)) {
    SchurSector sector;
    sector.j = j;
    sector.offset = offset;
    sector.rep_dim = static_cast<std::size_t>(j.twice() + 1);
    for (const auto& [path, vecs] : current)
      if (path.final_j() == j) sector.paths.push_back(path);
    sector.multiplicity = sector.paths.size();
    for (std::size_t mi = 0; mi < sector.rep_dim; ++mi) {
      for (std::size_t pi = 0; pi < sector.multiplicity; ++pi) {
        const auto row = static_cast<Eigen::Index>(offset + mi * sector.multiplicity + pi);
        basis.unitary_.row(row) = current.at(sector.paths[pi])[mi].transpose().cast<Complex>();
        basis.labels_.push_back({j, HalfInt::from_twice(j.twice() - 2 * static_cast<int>(mi)), pi});
      }
    }
    offset += sector.size();
    basis.sectors_.push_back(std::move(sector));
  }
  return basis;
}

std::vector<HalfInt> total_spins(int n) {
  require(n >= 1, ErrorCode::kDomain, "need at least one qubit");
  std::vector<HalfInt> out;
  for (int t = n % 2; t <= n; t += 2) out.push_back(HalfInt::from_twice(t));
  return out;
}

std::uint64_t multiplicity(int n, HalfInt j) {
  check_sector(n, j);
  // counts[t] = number of paths of the current length ending at 2j = t.
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 2, 0);
  counts[1] = 1;
  for (int k = 1; k < n; ++k) {
    std::vector<std::uint64_t> next(counts.size(), 0);
    for (std::size_t t = 0; t + 1 < counts.size(); ++t) {
      if (counts[t] == 0) continue;
      next[t + 1] += counts[t];
      if (t >= 1) next[t - 1] += counts[t];
    }
    counts = std::move(next);
  }
  return counts[static_cast<std::size_t>(j.twice())];
}

std::uint64_t multiplicity_formula(int n, HalfInt j) {
  check_sector(n, j);
  const int k = (n - j.twice()) / 2;
  return binomial(n, k) - binomial(n, k - 1);
}

int logical_qubit_count(int n) {
  require(n >= 2, ErrorCode::kDomain, "logical qubit count needs n >= 2");
  std::uint64_t best = 0;
  for (HalfInt j : total_spins(n)) best = std::max(best, multiplicity(n, j));
  return static_cast<int>(std::bit_width(best)) - 1;
}

// ---------------------------------------------------------------------------
// Spin operators

CMatrix total_spin_squared(int n) {
  const auto dim = std::size_t{1} << n;
  std::array<CMatrix, 3> total;
  const std::array<Mat2c, 3> paulis = {pauli_x(), pauli_y(), pauli_z()};
  for (int a = 0; a < 3; ++a) {
    total[a] = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (int q = 0; q < n; ++q) {
      CMatrix term = identity(1);
      for (int r = 0; r < n; ++r) term = tensor_product(term, r == q ? CMatrix(paulis[a] / 2.0) : identity(2));
      total[a] += term;
    }
  }
  return total[0] * total[0] + total[1] * total[1] + total[2] * total[2];
}

std::array<CMatrix, 3> spin_matrices(HalfInt j) {
  require(j.twice() >= 0, ErrorCode::kDomain, "spin must be nonnegative");
  const int d = j.twice() + 1;
  CMatrix jz = CMatrix::Zero(d, d);
  CMatrix jp = CMatrix::Zero(d, d);  // raising operator
  const double jv = j.value();
  for (int i = 0; i < d; ++i) {
    const double m = jv - i;
    jz(i, i) = m;
    if (i > 0) jp(i - 1, i) = std::sqrt(jv * (jv + 1) - m * (m + 1));
  }
  const CMatrix jm = jp.adjoint();
  return {CMatrix(0.5 * (jp + jm)), CMatrix(Complex(0, -0.5) * (jp - jm)), jz};
}

CMatrix wigner_d(HalfInt j, const Mat2c& u) {
  const auto [axis, angle] = su2_axis_angle(u);
  const auto js = spin_matrices(j);
  const CMatrix h = axis(0) * js[0] + axis(1) * js[1] + axis(2) * js[2];
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
  CVector phases(es.eigenvalues().size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0.0, -angle * es.eigenvalues()(i)));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

CMatrix swap_operator(int n, int i, int k) {
  require(i >= 0 && k >= 0 && i < n && k < n, ErrorCode::kDomain, "qubit index out of range");
  const auto dim = std::size_t{1} << n;
  CMatrix s = CMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t idx = 0; idx < dim; ++idx)
    s(static_cast<Eigen::Index>(swap_bits(idx, n, i, k)), static_cast<Eigen::Index>(idx)) = 1.0;
  return s;
}

// ---------------------------------------------------------------------------
// Codecs

NoiselessCodec NoiselessCodec::from_parts(int n, HalfInt j, CMatrix isometry) {
  check_sector(n, j);
  require(isometry.rows() == (Eigen::Index{1} << n) && isometry.cols() >= 1, ErrorCode::kShape,
          "isometry must have 2^n rows");
  const double defect =
      (isometry.adjoint() * isometry - identity(static_cast<std::size_t>(isometry.cols()))).cwiseAbs().maxCoeff();
  require(defect <= 1e-12, ErrorCode::kDomain, "codec map is not an isometry");
  return NoiselessCodec(n, j, std::move(isometry));
}

NoiselessCodec make_codec(const SchurBasis& basis, HalfInt j, std::size_t logical_dim) {
  const SchurSector& sector = basis.sector(j);
  require(logical_dim >= 1, ErrorCode::kDomain, "logical dimension must be positive");
  if (logical_dim > sector.multiplicity) {
    fail(ErrorCode::kCapacity, "logical dimension " + std::to_string(logical_dim) + " exceeds multiplicity " +
                                   std::to_string(sector.multiplicity) + " of j = " + j.str());
  }
  CMatrix iso(basis.unitary().cols(), static_cast<Eigen::Index>(logical_dim));
  for (std::size_t k = 0; k < logical_dim; ++k) {
    const auto row = static_cast<Eigen::Index>(sector.row(j, k));
    iso.col(static_cast<Eigen::Index>(k)) = basis.unitary().row(row).adjoint();
  }
  return NoiselessCodec::from_parts(basis.n(), j, std::move(iso));
}

NoiselessCodec make_codec(int n, HalfInt j, std::size_t logical_dim) {
  return make_codec(schur_basis(n), j, logical_dim);
}

PureState encode(const NoiselessCodec& codec, const PureState& logical) {
  require(logical.dim() == codec.logical_dim(), ErrorCode::kShape, "logical state has the wrong dimension");
  return PureState::from_amplitudes(codec.isometry() * logical.amplitudes());
}

DecodeResult decode(const NoiselessCodec& codec, const PureState& physical) {
  require(static_cast<Eigen::Index>(physical.dim()) == codec.isometry().rows(), ErrorCode::kShape,
          "physical state has the wrong dimension");
  CVector logical = codec.isometry().adjoint() * physical.amplitudes();
  const double weight = logical.squaredNorm();
  if (weight < 1e-6) {
    std::ostringstream os;
    os << "state has weight " << weight << " on the code space";
    fail(ErrorCode::kOutOfCode, os.str());
  }
  logical /= std::sqrt(weight);
  return {PureState::from_amplitudes(std::move(logical)), weight};
}

CMatrix exchange_logical_action(const NoiselessCodec& codec, int i, int k) {
  const int n = codec.n();
  require(i != k, ErrorCode::kDomain, "exchange needs two distinct qubits");
  require(i >= 0 && k >= 0 && i < n && k < n, ErrorCode::kDomain, "qubit index out of range");
  const CMatrix& iso = codec.isometry();
  CMatrix swapped(iso.rows(), iso.cols());
  for (Eigen::Index r = 0; r < iso.rows(); ++r)
    swapped.row(static_cast<Eigen::Index>(swap_bits(static_cast<std::size_t>(r), n, i, k))) = iso.row(r);
  CMatrix logical = iso.adjoint() * swapped;
  const double defect =
      (logical.adjoint() * logical - identity(codec.logical_dim())).cwiseAbs().maxCoeff();
  require(defect <= 1e-10, ErrorCode::kNumericalDegeneracy, "exchange does not preserve the code space");
  return logical;
}

SingletOutcome singlet_measurement(const PureState& state, int i, int k) {
  const auto nq = state.n_qubits();
  require(nq.has_value(), ErrorCode::kShape, "singlet measurement needs a qubit register");
  const int n = *nq;
  require(i != k && i >= 0 && k >= 0 && i < n && k < n, ErrorCode::kDomain,
          "singlet measurement needs two distinct valid qubits");
  const CVector& psi = state.amplitudes();
  const std::size_t bi = std::size_t{1} << (n - 1 - i);
  const std::size_t bk = std::size_t{1} << (n - 1 - k);
  CVector proj = CVector::Zero(psi.size());
  for (std::size_t idx = 0; idx < static_cast<std::size_t>(psi.size()); ++idx) {
    if ((idx & bi) || !(idx & bk)) continue;  // idx has (b_i, b_k) = (0, 1)
    const std::size_t partner = idx ^ bi ^ bk;  // (1, 0)
    const Complex c = (psi(static_cast<Eigen::Index>(idx)) - psi(static_cast<Eigen::Index>(partner))) / std::sqrt(2.0);
    proj(static_cast<Eigen::Index>(idx)) = c / std::sqrt(2.0);
    proj(static_cast<Eigen::Index>(partner)) = -c / std::sqrt(2.0);
  }
  SingletOutcome out;
  out.prob_singlet = std::clamp(proj.squaredNorm(), 0.0, 1.0);
  constexpr double kFloor = 1e-15;
  if (out.prob_singlet > kFloor) out.post_singlet = PureState::from_amplitudes(proj / proj.norm());
  const CVector rest = psi - proj;
  if (1.0 - out.prob_singlet > kFloor) out.post_orthogonal = PureState::from_amplitudes(rest / rest.norm());
  return out;
}

std::vector<SectorWeight> sector_weights(const DensityMatrix& rho, const SchurBasis& basis) {
  require(static_cast<Eigen::Index>(rho.dim()) == basis.unitary().rows(), ErrorCode::kShape,
          "state and Schur basis sizes differ");
  const CMatrix s = basis.to_schur(rho.matrix());
  std::vector<SectorWeight> out;
  for (const auto& sec : basis.sectors()) {
    const auto off = static_cast<Eigen::Index>(sec.offset);
    const auto sz = static_cast<Eigen::Index>(sec.size());
    out.push_back({sec.j, s.block(off, off, sz, sz).trace().real()});
  }
  return out;
}

BlockSplit block_extract(const DensityMatrix& rho, const SchurBasis& basis, HalfInt j) {
  require(static_cast<Eigen::Index>(rho.dim()) == basis.unitary().rows(), ErrorCode::kShape,
          "state and Schur basis sizes differ");
  const SchurSector& sec = basis.sector(j);
  const CMatrix s = basis.to_schur(rho.matrix());
  const auto off = static_cast<Eigen::Index>(sec.offset);
  const auto sz = static_cast<Eigen::Index>(sec.size());
  CMatrix block = hermitian_part(s.block(off, off, sz, sz));
  const double weight = block.trace().real();
  if (weight < 1e-12) {
    std::ostringstream os;
    os << "sector j = " << j.str() << " has weight " << weight;
    fail(ErrorCode::kEmptySector, os.str());
  }
  block /= weight;
  const std::array<std::size_t, 2> dims = {sec.rep_dim, sec.multiplicity};
  const std::array<std::size_t, 1> keep_r = {0};
  const std::array<std::size_t, 1> keep_s = {1};
  CMatrix r = partial_trace(block, keep_r, dims);
  CMatrix sg = partial_trace(block, keep_s, dims);
  const double gap = trace_distance(block, tensor_product(r, sg));
  return {weight, DensityMatrix::from_matrix(std::move(r)), DensityMatrix::from_matrix(std::move(sg)), gap > 1e-10};
}

DensityMatrix assemble_block(const SchurBasis& basis, HalfInt j, const DensityMatrix& rho_jR,
                             const DensityMatrix& sigma_jS) {
  const SchurSector& sec = basis.sector(j);
  require(rho_jR.dim() == sec.rep_dim && sigma_jS.dim() == sec.multiplicity, ErrorCode::kShape,
          "factor dimensions do not match the sector");
  CMatrix s = CMatrix::Zero(basis.unitary().rows(), basis.unitary().cols());
  const auto off = static_cast<Eigen::Index>(sec.offset);
  const auto sz = static_cast<Eigen::Index>(sec.size());
  s.block(off, off, sz, sz) = tensor_product(rho_jR.matrix(), sigma_jS.matrix());
  return DensityMatrix::from_matrix(hermitian_part(basis.from_schur(s)));
}

nlohmann::json codec_to_json(const NoiselessCodec& codec) {
  return {{"n", codec.n()}, {"j", codec.j().value()}, {"isometry", matrix_to_json(codec.isometry())}};
}

NoiselessCodec codec_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    const HalfInt spin = HalfInt::parse(j.at("j").dump());
    return NoiselessCodec::from_parts(n, spin, matrix_from_json(j.at("isometry")));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, e.what());
  }
}

}  // namespace relqi
