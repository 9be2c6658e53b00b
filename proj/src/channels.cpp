#include "relqi/channels.hpp"

#include <cmath>
#include <sstream>

#include "relqi/error.hpp"
#include "relqi/lorentz.hpp"
#include "relqi/rng.hpp"

namespace relqi {

namespace {

constexpr double kExactChannelConvergence = 1e-9;

QuantumChannel pauli_mixture(double w_identity, double w_xy) {
  return QuantumChannel({identity(2), CMatrix(pauli_x()), CMatrix(pauli_y())}, {w_identity, w_xy, w_xy});
}

std::vector<CMatrix> wigner_kraus(const LorentzElement& boost, const std::vector<MomentumNode>& nodes,
                                  std::vector<double>& weights) {
  std::vector<CMatrix> kraus;
  kraus.reserve(nodes.size());
  weights.clear();
  weights.reserve(nodes.size());
  for (const auto& node : nodes) {
    kraus.emplace_back(wigner_rotation(boost, node.p).su2);
    weights.push_back(node.weight);
  }
  return kraus;
}

QuantumChannel exact_channel_at(const LorentzElement& boost, const GaussianPacket& packet, int nodes) {
  std::vector<double> weights;
  auto kraus = wigner_kraus(boost, packet.measure_nodes(nodes), weights);
  return QuantumChannel(std::move(kraus), std::move(weights));
}

DensityMatrix finish(CMatrix m) { return DensityMatrix::from_matrix(hermitian_part(m)); }

void check_samples(std::uint64_t samples) {
  require(samples >= 1, ErrorCode::kDomain, "Monte Carlo twirl needs at least one sample");
  require(samples <= kMaxTwirlSamples, ErrorCode::kSize, "too many Monte Carlo samples");
}

// Mean of f(u) over Haar samples, drawn in fixed chunks with one substream each.
template <typename F>
CMatrix haar_average(std::uint64_t samples, std::uint64_t seed, const CMatrix& zero, F&& f) {
  const Rng root(seed);
  CMatrix total = zero;
  const std::uint64_t chunks = (samples + kMonteCarloChunk - 1) / kMonteCarloChunk;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    Rng rng = root.substream(c);
    const std::uint64_t count = std::min<std::uint64_t>(kMonteCarloChunk, samples - c * kMonteCarloChunk);
    CMatrix partial = zero;
    for (std::uint64_t s = 0; s < count; ++s) partial += f(haar_su2_sample(rng));
    total += partial;
  }
  return total / static_cast<double>(samples);
}

}  // namespace

GammaParam gamma(double v, double delta) {
  if (!(v > 0.0 && v < 1.0)) {
    std::ostringstream os;
    os << "boost speed " << v << " outside (0, 1)";
    fail(ErrorCode::kDomain, os.str());
  }
  require(delta > 0.0, ErrorCode::kDomain, "packet spread must be positive");
  return {v, delta, v * delta / (1.0 + std::sqrt((1.0 - v) * (1.0 + v)))};
}

QuantumChannel boost_channel_approx(const GammaParam& g) {
  if (!(g.gamma >= 0.0 && g.gamma < kMaxApproxGamma)) {
    std::ostringstream os;
    os << "Gamma = " << g.gamma << " outside the small-spread regime [0, " << kMaxApproxGamma << ")";
    fail(ErrorCode::kRegime, os.str());
  }
  const double g2 = g.gamma * g.gamma;
  return pauli_mixture(1.0 - g2 / 4.0, g2 / 8.0);
}

QuantumChannel boost_channel_exact(double v, const GaussianPacket& packet) {
  gamma(v, packet.delta());  // domain checks
  const LorentzElement boost = boost_from_velocity(Vec3(0.0, 0.0, v));
  const int n = packet.nodes_per_axis();
  const QuantumChannel coarse = exact_channel_at(boost, packet, n);
  const QuantumChannel fine = exact_channel_at(boost, packet, n + n / 2);
  const double change = (coarse.choi() - fine.choi()).cwiseAbs().maxCoeff();
  if (change > kExactChannelConvergence) {
    std::ostringstream os;
    os << "boost channel quadrature changed by " << change << " under refinement";
    fail(ErrorCode::kAccuracy, os.str());
  }
  return coarse.compressed();
}

BoostPrior BoostPrior::from_weights(std::vector<std::pair<double, double>> grid) {
  require(!grid.empty(), ErrorCode::kDomain, "boost prior needs at least one speed");
  double total = 0.0;
  for (const auto& [v, w] : grid) {
    if (!(v > 0.0 && v < 1.0)) fail(ErrorCode::kDomain, "boost prior speed outside (0, 1)");
    if (!(w >= 0.0) || !std::isfinite(w)) fail(ErrorCode::kDomain, "boost prior weights must be nonnegative");
    total += w;
  }
  require(total > 0.0, ErrorCode::kDomain, "boost prior has zero total weight");
  for (auto& entry : grid) entry.second /= total;
  return BoostPrior(std::move(grid));
}

BoostPrior BoostPrior::point_mass(double v) { return from_weights({{v, 1.0}}); }

BoostPrior BoostPrior::uniform(const std::vector<double>& speeds) {
  std::vector<std::pair<double, double>> grid;
  for (double v : speeds) grid.emplace_back(v, 1.0);
  return from_weights(std::move(grid));
}

QuantumChannel boost_mixture(const BoostPrior& prior, double delta) {
  double w_identity = 0.0;
  double w_xy = 0.0;
  for (const auto& [v, p] : prior.grid()) {
    const QuantumChannel ch = boost_channel_approx(gamma(v, delta));
    w_identity += p * ch.weights()[0];
    w_xy += p * ch.weights()[1];
  }
  return pauli_mixture(w_identity, w_xy);
}

std::string_view twirl_method_name(TwirlMethod m) {
  return m == TwirlMethod::kExactProjector ? "exact-projector" : "monte-carlo";
}

TwirlResult twirl_single(const DensityMatrix& rho, TwirlMethod method, std::uint64_t samples, std::uint64_t seed) {
  require(rho.dim() == 2, ErrorCode::kShape, "single-qubit twirl needs a 2x2 state");
  if (method == TwirlMethod::kExactProjector) {
    return {DensityMatrix::maximally_mixed(2), method, 0, 0.0};
  }
  check_samples(samples);
  const CMatrix& m = rho.matrix();
  CMatrix mean = haar_average(samples, seed, CMatrix::Zero(2, 2),
                              [&](const Mat2c& u) -> CMatrix { return u * m * u.adjoint(); });
  return {finish(std::move(mean)), method, samples, 3.0 / std::sqrt(static_cast<double>(samples))};
}

TwirlResult collective_twirl(const DensityMatrix& rho, const SchurBasis& basis, TwirlMethod method,
                             std::uint64_t samples, std::uint64_t seed) {
  const int n = basis.n();
  require(rho.dim() == (std::size_t{1} << n), ErrorCode::kShape, "state and Schur basis sizes differ");
  if (method == TwirlMethod::kExactProjector) {
    if (n > kMaxExactTwirlQubits) {
      fail(ErrorCode::kSize, "exact collective twirl is limited to " + std::to_string(kMaxExactTwirlQubits) +
                                 " qubits");
    }
    const CMatrix s = basis.to_schur(rho.matrix());
    CMatrix out = CMatrix::Zero(s.rows(), s.cols());
    for (const auto& sec : basis.sectors()) {
      const auto off = static_cast<Eigen::Index>(sec.offset);
      const auto sz = static_cast<Eigen::Index>(sec.size());
      const std::array<std::size_t, 2> dims = {sec.rep_dim, sec.multiplicity};
      const std::array<std::size_t, 1> keep = {1};
      const CMatrix reduced = partial_trace(CMatrix(s.block(off, off, sz, sz)), keep, dims);
      out.block(off, off, sz, sz) =
          tensor_product(identity(sec.rep_dim) / static_cast<double>(sec.rep_dim), reduced);
    }
    return {finish(basis.from_schur(out)), method, 0, 0.0};
  }
  check_samples(samples);
  const CMatrix& m = rho.matrix();
  CMatrix mean = haar_average(samples, seed, CMatrix::Zero(m.rows(), m.cols()),
                              [&](const Mat2c& u) { return conjugate_collective(m, u, n); });
  return {finish(std::move(mean)), method, samples, 3.0 / std::sqrt(static_cast<double>(samples))};
}

}  // namespace relqi
