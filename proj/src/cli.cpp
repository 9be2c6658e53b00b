#include "relqi/cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relqi/channels.hpp"
#include "relqi/lorentz.hpp"
#include "relqi/photon.hpp"
#include "relqi/qmath.hpp"
#include "relqi/schur.hpp"
#include "relqi/selftest.hpp"
#include "relqi/state_io.hpp"
#include "relqi/wavepacket.hpp"

namespace relqi::cli {

namespace {

using Json = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = kDefaultSeed;
  bool deterministic = false;
  std::string output;
  std::string config;
  int nodes = kDefaultQuadratureNodes;
  bool no_validate = false;
};

struct Context {
  Globals g;
  std::vector<std::string> args;
  std::chrono::steady_clock::time_point start;
  std::ostream* out = nullptr;
};

// ---------------------------------------------------------------------------
// Formatting

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double elapsed_seconds(const Context& ctx) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - ctx.start).count();
}

std::string join_args(const std::vector<std::string>& args) {
  std::string s;
  for (const auto& a : args) {
    if (!s.empty()) s += ' ';
    s += a;
  }
  return s;
}

Json meta(const Context& ctx, const std::string& command, bool input_validated = true) {
  Json m;
  m["program"] = "relqi";
  m["version"] = std::string(kVersion);
  m["command"] = command;
  m["args"] = ctx.args;
  m["seed"] = ctx.g.seed;
  m["quadrature_nodes"] = ctx.g.nodes;
  m["input_validated"] = input_validated;
  return m;
}

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json four_vector_json(const FourVector& p) { return Json::array({p.t, p.x, p.y, p.z}); }

Json vec3_json(const Vec3& v) { return Json::array({v(0), v(1), v(2)}); }

Json real_matrix_json(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json to_ordered(const nlohmann::json& j) { return Json::parse(j.dump()); }

class CsvTable {
 public:
  void comment(const std::string& key, const std::string& value) { comments_.emplace_back(key, value); }
  void header(std::vector<std::string> h) { header_ = std::move(h); }
  void row(std::vector<std::string> r) { rows_.push_back(std::move(r)); }

  std::string str() const {
    std::string s;
    for (const auto& [k, v] : comments_) s += "# " + k + ": " + v + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) s += ',';
        s += cells[i];
      }
      s += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return s;
  }

 private:
  std::vector<std::pair<std::string, std::string>> comments_;
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

void csv_meta(CsvTable& t, const Context& ctx, const std::string& command) {
  t.comment("program", "relqi " + std::string(kVersion));
  t.comment("command", command);
  t.comment("args", join_args(ctx.args));
  t.comment("seed", std::to_string(ctx.g.seed));
  t.comment("quadrature_nodes", std::to_string(ctx.g.nodes));
}

void emit_text(const Context& ctx, const std::string& text) {
  if (ctx.g.output.empty()) {
    *ctx.out << text;
    return;
  }
  std::ofstream f(ctx.g.output, std::ios::binary);
  if (!f) fail(ErrorCode::kFormat, "cannot open output file " + ctx.g.output);
  f << text;
  if (!f) fail(ErrorCode::kFormat, "failed writing output file " + ctx.g.output);
}

void emit_json(const Context& ctx, Json report) {
  if (!ctx.g.deterministic) {
    report["meta"]["timestamp"] = timestamp_utc();
    report["meta"]["wall_time_s"] = elapsed_seconds(ctx);
  }
  emit_text(ctx, report.dump(2) + "\n");
}

void emit_csv(const Context& ctx, CsvTable table) {
  if (!ctx.g.deterministic) {
    table.comment("timestamp", timestamp_utc());
    table.comment("wall_time_s", format_double(elapsed_seconds(ctx)));
  }
  emit_text(ctx, table.str());
}

// ---------------------------------------------------------------------------
// Parsing helpers

Vec3 vec3_arg(const std::vector<double>& v, const std::string& name) {
  if (v.size() != 3) throw UsageError(name + " expects three comma-separated numbers");
  return {v[0], v[1], v[2]};
}

std::vector<double> expand_range(const std::string& text, const std::string& name) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ':');) parts.push_back(item);
  if (parts.size() != 3) throw UsageError(name + " expects lo:hi:count");
  double lo = 0.0, hi = 0.0;
  long long count = 0;
  try {
    std::size_t used = 0;
    lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw std::invalid_argument("lo");
    hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw std::invalid_argument("hi");
    count = std::stoll(parts[2], &used);
    if (used != parts[2].size()) throw std::invalid_argument("count");
  } catch (const std::logic_error&) {
    throw UsageError(name + " expects lo:hi:count, got '" + text + "'");
  }
  if (count <= 0 || hi < lo || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw UsageError(name + " '" + text + "' is an empty range");
  }
  if (static_cast<unsigned long long>(count) > kMaxSweepPoints) {
    fail(ErrorCode::kSize, name + " requests " + std::to_string(count) + " points; the limit is " +
                               std::to_string(kMaxSweepPoints));
  }
  std::vector<double> out;
  for (long long i = 0; i < count; ++i) {
    out.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
  }
  return out;
}

void check_point_count(std::size_t n, const std::string& name) {
  if (n == 0) throw UsageError(name + " is empty");
  if (n > kMaxSweepPoints) {
    fail(ErrorCode::kSize, name + " has " + std::to_string(n) + " points; the limit is " +
                               std::to_string(kMaxSweepPoints));
  }
}

LorentzElement lorentz_from_args(const std::vector<double>& boost, const std::vector<double>& rot) {
  LorentzElement lambda = LorentzElement::identity();
  if (!boost.empty()) lambda = boost_from_velocity(vec3_arg(boost, "--boost"));
  if (!rot.empty()) {
    if (rot.size() != 4) throw UsageError("--rotation expects ax,ay,az,angle");
    lambda = rotation(Vec3(rot[0], rot[1], rot[2]), rot[3]).compose(lambda);
  }
  return lambda;
}

// ---------------------------------------------------------------------------
// Input states

struct StateInput {
  std::string preset = "zero";
  std::string file;
};

void add_state_options(CLI::App* sub, StateInput& in, const std::string& default_preset) {
  in.preset = default_preset;
  sub->add_option("--preset", in.preset, "Built-in input state")
      ->check(CLI::IsMember({"zero", "one", "plus", "minus", "mixed", "random", "singlet", "ghz"}))
      ->capture_default_str();
  sub->add_option("--state", in.file, "Input state JSON file (overrides --preset)");
}

DensityMatrix preset_state(const std::string& name, int n, std::uint64_t seed) {
  const std::size_t dim = std::size_t{1} << n;
  auto product = [&](const CVector& q) {
    CMatrix v = CMatrix::Ones(1, 1);
    for (int i = 0; i < n; ++i) v = tensor_product(v, q);
    return PureState::from_amplitudes(CVector(v.col(0))).density();
  };
  const double r = std::numbers::sqrt2 / 2.0;
  if (name == "zero") return PureState::basis(dim, 0).density();
  if (name == "one") return PureState::basis(dim, dim - 1).density();
  if (name == "plus") return product(CVector::Constant(2, r));
  if (name == "minus") {
    CVector q(2);
    q << r, -r;
    return product(q);
  }
  if (name == "mixed") return DensityMatrix::maximally_mixed(dim);
  if (name == "random") {
    Rng rng(seed, 1);
    return random_density_matrix(dim, rng);
  }
  if (name == "ghz") {
    CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
    v(0) = r;
    v(static_cast<Eigen::Index>(dim - 1)) = r;
    return PureState::from_amplitudes(v).density();
  }
  if (name == "singlet") {
    if (n % 2 != 0) fail(ErrorCode::kParity, "singlet preset needs an even qubit count");
    CVector s(4);
    s << 0.0, r, -r, 0.0;
    CMatrix v = CMatrix::Ones(1, 1);
    for (int i = 0; i < n / 2; ++i) v = tensor_product(v, s);
    return PureState::from_amplitudes(CVector(v.col(0))).density();
  }
  throw UsageError("unknown preset " + name);
}

struct ResolvedState {
  DensityMatrix rho;
  bool validated = true;
};

ResolvedState resolve_state(const StateInput& in, int n, const Context& ctx) {
  if (in.file.empty()) return {preset_state(in.preset, n, ctx.g.seed), true};
  const LoadedState loaded = read_state_file(in.file, !ctx.g.no_validate);
  DensityMatrix rho = loaded.density();
  if (rho.dim() != (std::size_t{1} << n)) {
    fail(ErrorCode::kShape, "input state has dimension " + std::to_string(rho.dim()) + ", expected " +
                                std::to_string(std::size_t{1} << n));
  }
  return {std::move(rho), loaded.validated};
}

Json choi_json(const QuantumChannel& ch) {
  const ChoiReport rep = choi_check(ch);
  Json j;
  j["tp_defect"] = rep.tp_defect;
  j["min_choi_eigenvalue"] = rep.min_choi_eig;
  j["accepted"] = rep.accepted();
  return j;
}

Json weights_json(const QuantumChannel& ch) {
  Json w = Json::array();
  for (double x : ch.weights()) w.push_back(x);
  return w;
}

// ---------------------------------------------------------------------------
// Subcommands

void cmd_wigner(const Context& ctx, const std::vector<double>& boost, const std::vector<double>& rot,
                const std::vector<double>& momentum) {
  const LorentzElement lambda = lorentz_from_args(boost, rot);
  const FourVector p = FourVector::on_shell(vec3_arg(momentum, "--momentum"));
  const WignerRotation w = wigner_rotation(lambda, p);
  Json r;
  r["meta"] = meta(ctx, "wigner");
  r["lambda"] = {{"sl2", to_ordered(matrix_to_json(lambda.sl2()))}, {"mat4", real_matrix_json(lambda.mat4())}};
  r["momentum"] = four_vector_json(p);
  r["transformed_momentum"] = four_vector_json(lambda.apply(p));
  r["axis"] = vec3_json(w.axis);
  r["angle"] = w.angle;
  r["su2"] = to_ordered(matrix_to_json(w.su2));
  r["so3"] = real_matrix_json(w.so3());
  emit_json(ctx, std::move(r));
}

struct OverlapArgs {
  double delta = 0.0;
  std::vector<double> a;
  std::string a_range;
  bool min_separation = false;
  double threshold = kDistinguishabilityThreshold;
  std::optional<double> mass_mev;
};

void cmd_overlap(const Context& ctx, const OverlapArgs& o) {
  if (o.min_separation) {
    const double a_min = min_separation(o.delta, o.threshold);
    Json r;
    r["meta"] = meta(ctx, "overlap");
    r["epsilon"] = o.delta;
    r["threshold"] = o.threshold;
    r["a_min"] = a_min;
    r["overlap_at_a_min"] = std::abs(overlap(GaussianPacket::make(o.delta, Vec3::Zero(), ctx.g.nodes), a_min));
    if (o.mass_mev) {
      r["mass_mev"] = *o.mass_mev;
      r["a_min_angstrom"] = natural_length_to_angstrom(a_min, *o.mass_mev);
    }
    emit_json(ctx, std::move(r));
    return;
  }
  std::vector<double> points = o.a;
  if (!o.a_range.empty()) {
    const auto more = expand_range(o.a_range, "--a-range");
    points.insert(points.end(), more.begin(), more.end());
  }
  if (points.empty()) throw UsageError("overlap needs --a, --a-range or --min-separation");
  check_point_count(points.size(), "separation grid");
  const GaussianPacket packet = GaussianPacket::make(o.delta, Vec3::Zero(), ctx.g.nodes);
  CsvTable t;
  csv_meta(t, ctx, "overlap");
  t.header({"a", "delta", "overlap_re", "overlap_abs", "analytic_gaussian"});
  for (double a : points) {
    const Complex ov = overlap(packet, a);
    t.row({format_double(a), format_double(o.delta), format_double(ov.real()), format_double(std::abs(ov)),
           format_double(gaussian_overlap(o.delta, a))});
  }
  emit_csv(ctx, std::move(t));
}

struct ChannelArgs {
  double v = 0.5;
  double delta = 0.01;
  std::vector<double> speeds;
  std::vector<double> weights;
  StateInput input;
};

void cmd_channel(const Context& ctx, const std::string& kind, const ChannelArgs& c) {
  const ResolvedState in = resolve_state(c.input, 1, ctx);
  Json params;
  std::optional<QuantumChannel> ch;
  if (kind == "boost-approx") {
    const GammaParam g = gamma(c.v, c.delta);
    params = {{"v", g.v}, {"delta", g.delta}, {"gamma", g.gamma}};
    ch = boost_channel_approx(g);
  } else if (kind == "boost-exact") {
    const GammaParam g = gamma(c.v, c.delta);
    params = {{"v", g.v}, {"delta", g.delta}, {"gamma", g.gamma}, {"nodes_per_axis", ctx.g.nodes}};
    ch = boost_channel_exact(c.v, GaussianPacket::make(c.delta, Vec3::Zero(), ctx.g.nodes));
    params["choi_distance_to_approx"] = choi_distance(*ch, boost_channel_approx(g));
  } else {
    if (c.speeds.empty()) throw UsageError("mixture needs --speeds");
    if (!c.weights.empty() && c.weights.size() != c.speeds.size()) {
      throw UsageError("--weights must match --speeds in length");
    }
    std::vector<std::pair<double, double>> grid;
    for (std::size_t i = 0; i < c.speeds.size(); ++i)
      grid.emplace_back(c.speeds[i], c.weights.empty() ? 1.0 : c.weights[i]);
    const BoostPrior prior = BoostPrior::from_weights(grid);
    Json prior_json = Json::array();
    for (const auto& [v, w] : prior.grid()) prior_json.push_back({{"v", v}, {"weight", w}});
    params = {{"delta", c.delta}, {"prior", prior_json}};
    ch = boost_mixture(prior, c.delta);
  }
  const DensityMatrix out = apply_channel(*ch, in.rho);
  Json r;
  r["meta"] = meta(ctx, "channel " + kind, in.validated);
  r["channel"] = kind;
  r["params"] = params;
  r["choi_defects"] = choi_json(*ch);
  r["kraus_weights"] = weights_json(*ch);
  r["input_state"] = to_ordered(state_to_json(in.rho));
  r["output_state"] = to_ordered(state_to_json(out));
  r["fidelity_to_input"] = fidelity(in.rho, out);
  emit_json(ctx, std::move(r));
}

struct TwirlArgs {
  int n = 1;
  std::string method = "exact";
  std::uint64_t samples = 100000;
  StateInput input;
};

TwirlResult do_twirl(const DensityMatrix& rho, int n, TwirlMethod method, std::uint64_t samples,
                     std::uint64_t seed, const std::optional<SchurBasis>& basis) {
  if (n == 1) return twirl_single(rho, method, samples, seed);
  return collective_twirl(rho, *basis, method, samples, seed);
}

TwirlMethod method_of(const std::string& s) {
  return s == "exact" ? TwirlMethod::kExactProjector : TwirlMethod::kMonteCarlo;
}

void cmd_twirl(const Context& ctx, const TwirlArgs& t) {
  if (t.n < 1 || t.n > kMaxSchurQubits) {
    fail(ErrorCode::kSize, "twirl supports 1.." + std::to_string(kMaxSchurQubits) + " qubits");
  }
  const ResolvedState in = resolve_state(t.input, t.n, ctx);
  std::optional<SchurBasis> basis;
  if (t.n > 1) basis = schur_basis(t.n);
  const TwirlResult res = do_twirl(in.rho, t.n, method_of(t.method), t.samples, ctx.g.seed, basis);
  Json r;
  r["meta"] = meta(ctx, "twirl", in.validated);
  r["n"] = t.n;
  r["method"] = std::string(twirl_method_name(res.method));
  if (res.method == TwirlMethod::kMonteCarlo) {
    r["samples"] = res.samples;
    r["stat_tol"] = res.stat_tol;
  }
  r["input_state"] = to_ordered(state_to_json(in.rho));
  r["output_state"] = to_ordered(state_to_json(res.output));
  r["fidelity_to_input"] = fidelity(in.rho, res.output);
  r["trace_distance_to_input"] = trace_distance(in.rho, res.output);
  r["trace_distance_to_maximally_mixed"] =
      trace_distance(res.output, DensityMatrix::maximally_mixed(res.output.dim()));
  emit_json(ctx, std::move(r));
}

struct CodecArgs {
  int n = 4;
  std::string j;
  std::size_t dim = 0;
  std::size_t logical_index = 0;
  std::string logical_file;
  std::string state_file;
  bool include_isometry = false;
};

HalfInt codec_spin(const CodecArgs& c) {
  if (!c.j.empty()) return HalfInt::parse(c.j);
  HalfInt best = total_spins(c.n).front();
  for (HalfInt j : total_spins(c.n))
    if (multiplicity(c.n, j) > multiplicity(c.n, best)) best = j;
  return best;
}

NoiselessCodec build_codec(const CodecArgs& c) {
  const HalfInt j = codec_spin(c);
  const std::size_t dim = c.dim ? c.dim : static_cast<std::size_t>(multiplicity(c.n, j));
  return make_codec(c.n, j, dim);
}

void cmd_codec(const Context& ctx, const std::string& action, const CodecArgs& c) {
  if (c.n < 1 || c.n > kMaxSchurQubits) {
    fail(ErrorCode::kSize, "codecs support 1.." + std::to_string(kMaxSchurQubits) + " qubits");
  }
  Json r;
  r["meta"] = meta(ctx, "codec " + action);
  if (action == "info") {
    r["n"] = c.n;
    Json sectors = Json::array();
    for (HalfInt j : total_spins(c.n)) {
      const auto mult = multiplicity(c.n, j);
      sectors.push_back({{"j", j.str()},
                         {"rep_dim", j.twice() + 1},
                         {"multiplicity", mult},
                         {"logical_qubits", static_cast<int>(std::bit_width(mult)) - 1}});
    }
    r["sectors"] = sectors;
    if (c.n >= 2) r["logical_qubit_count"] = logical_qubit_count(c.n);
    if (c.include_isometry) r["codec"] = to_ordered(codec_to_json(build_codec(c)));
    emit_json(ctx, std::move(r));
    return;
  }
  const NoiselessCodec codec = build_codec(c);
  r["n"] = codec.n();
  r["j"] = codec.j().str();
  r["logical_dim"] = codec.logical_dim();
  if (action == "encode") {
    PureState logical = PureState::basis(codec.logical_dim(), 0);
    bool validated = true;
    if (!c.logical_file.empty()) {
      const LoadedState loaded = read_state_file(c.logical_file, !ctx.g.no_validate);
      if (!loaded.is_pure()) fail(ErrorCode::kFormat, "logical state must be a pure state vector");
      logical = std::get<PureState>(loaded.state);
      validated = loaded.validated;
    } else {
      require(c.logical_index < codec.logical_dim(), ErrorCode::kDomain, "--logical-index out of range");
      logical = PureState::basis(codec.logical_dim(), c.logical_index);
    }
    r["meta"]["input_validated"] = validated;
    r["logical_state"] = to_ordered(state_to_json(logical));
    r["physical_state"] = to_ordered(state_to_json(encode(codec, logical)));
  } else {
    if (c.state_file.empty()) throw UsageError("decode needs --state");
    const LoadedState loaded = read_state_file(c.state_file, !ctx.g.no_validate);
    if (!loaded.is_pure()) fail(ErrorCode::kFormat, "physical state must be a pure state vector");
    const DecodeResult d = decode(codec, std::get<PureState>(loaded.state));
    r["meta"]["input_validated"] = loaded.validated;
    r["in_code_weight"] = d.in_code_weight;
    r["logical_state"] = to_ordered(state_to_json(d.logical));
  }
  emit_json(ctx, std::move(r));
}

void cmd_multiplicity(const Context& ctx, int n_max) {
  if (n_max < 1 || n_max > 60) fail(ErrorCode::kDomain, "--n-max must lie in [1, 60]");
  CsvTable t;
  csv_meta(t, ctx, "multiplicity");
  t.header({"n", "j", "multiplicity", "dim_check"});
  for (int n = 1; n <= n_max; ++n) {
    std::uint64_t capacity = 0;
    for (HalfInt j : total_spins(n)) capacity += static_cast<std::uint64_t>(j.twice() + 1) * multiplicity(n, j);
    const bool capacity_ok = capacity == (std::uint64_t{1} << n);
    for (HalfInt j : total_spins(n)) {
      const auto m = multiplicity(n, j);
      const bool ok = capacity_ok && m == multiplicity_formula(n, j);
      t.row({std::to_string(n), j.str(), std::to_string(m), ok ? "ok" : "mismatch"});
    }
  }
  emit_csv(ctx, std::move(t));
}

struct PhotonArgs {
  std::vector<double> boost;
  std::vector<double> rotation;
  std::vector<double> momentum{0.0, 0.0, 1.0};
  std::vector<double> logical{1.0, 0.0, 0.0, 0.0};
};

Json amplitudes_json(const std::array<Complex, 4>& a) {
  Json arr = Json::array();
  for (const auto& z : a) arr.push_back(complex_json(z));
  return arr;
}

void cmd_photon(const Context& ctx, const PhotonArgs& a) {
  const LorentzElement lambda = lorentz_from_args(a.boost, a.rotation);
  const Vec3 k = vec3_arg(a.momentum, "--momentum");
  const FourVector p{k.norm(), k(0), k(1), k(2)};
  if (a.logical.size() != 4) throw UsageError("--logical expects re0,im0,re1,im1");
  CVector l(2);
  l << Complex(a.logical[0], a.logical[1]), Complex(a.logical[2], a.logical[3]);
  const PureState logical = PureState::from_amplitudes(l, !ctx.g.no_validate);
  const LittleGroupElement lg = little_group_phase(lambda, p);
  const TwoPhotonState before = photon_codec_encode(PureState::from_amplitudes(l / l.norm()), p);
  const TwoPhotonState after = apply_lorentz_photon(lambda, before);
  const PureState decoded = photon_codec_decode(after);
  Json r;
  r["meta"] = meta(ctx, "photon", !ctx.g.no_validate);
  r["omega"] = lg.omega;
  r["beta"] = complex_json(lg.beta);
  Json s;
  s["momentum_in"] = four_vector_json(before.momentum());
  s["momentum_out"] = four_vector_json(after.momentum());
  s["amplitudes_in"] = amplitudes_json(before.amplitudes());
  s["amplitudes_out"] = amplitudes_json(after.amplitudes());
  s["logical_in"] = to_ordered(state_to_json(logical));
  s["logical_out"] = to_ordered(state_to_json(decoded));
  s["logical_fidelity"] = fidelity(PureState::from_amplitudes(l / l.norm()), decoded);
  r["state"] = s;
  emit_json(ctx, std::move(r));
}

struct SweepArgs {
  std::string kind = "boost-v";
  std::string v_range = "0.1:0.9:9";
  double v = 0.5;
  double delta = 0.01;
  int halvings = 3;
  int n = 1;
  std::vector<std::uint64_t> samples{1000, 10000, 100000};
  StateInput input;
};

void sweep_boost_v(const Context& ctx, const SweepArgs& s, CsvTable& t) {
  const auto speeds = expand_range(s.v_range, "--v-range");
  const ResolvedState in = resolve_state(s.input, 1, ctx);
  t.comment("input_validated", in.validated ? "true" : "false");
  t.header({"v", "delta", "gamma", "fidelity_to_input", "trace_distance"});
  for (double v : speeds) {
    const GammaParam g = gamma(v, s.delta);
    const DensityMatrix out = apply_channel(boost_channel_approx(g), in.rho);
    t.row({format_double(v), format_double(s.delta), format_double(g.gamma), format_double(fidelity(in.rho, out)),
           format_double(trace_distance(in.rho, out))});
  }
}

void sweep_boost_delta(const Context& ctx, const SweepArgs& s, CsvTable& t) {
  if (s.halvings < 0) throw UsageError("--halvings must be nonnegative");
  check_point_count(static_cast<std::size_t>(s.halvings) + 1, "delta grid");
  t.header({"v", "delta", "gamma", "choi_discrepancy", "shrink_factor"});
  double previous = 0.0;
  for (int k = 0; k <= s.halvings; ++k) {
    const double delta = s.delta / std::ldexp(1.0, k);
    const GammaParam g = gamma(s.v, delta);
    const QuantumChannel exact = boost_channel_exact(s.v, GaussianPacket::make(delta, Vec3::Zero(), ctx.g.nodes));
    const double disc = choi_distance(exact, boost_channel_approx(g));
    t.row({format_double(s.v), format_double(delta), format_double(g.gamma), format_double(disc),
           k == 0 ? std::string() : format_double(previous / disc)});
    previous = disc;
  }
}

void sweep_twirl_mc(const Context& ctx, const SweepArgs& s, CsvTable& t) {
  if (s.n < 1 || s.n > kMaxExactTwirlQubits) {
    fail(ErrorCode::kSize, "twirl sweep supports 1.." + std::to_string(kMaxExactTwirlQubits) + " qubits");
  }
  check_point_count(s.samples.size(), "--samples");
  const ResolvedState in = resolve_state(s.input, s.n, ctx);
  t.comment("input_validated", in.validated ? "true" : "false");
  std::optional<SchurBasis> basis;
  if (s.n > 1) basis = schur_basis(s.n);
  const DensityMatrix exact = do_twirl(in.rho, s.n, TwirlMethod::kExactProjector, 0, ctx.g.seed, basis).output;
  t.header({"n", "samples", "trace_distance_to_exact", "stat_tol", "within_tol"});
  for (std::uint64_t m : s.samples) {
    const TwirlResult mc = do_twirl(in.rho, s.n, TwirlMethod::kMonteCarlo, m, ctx.g.seed, basis);
    const double d = trace_distance(mc.output, exact);
    t.row({std::to_string(s.n), std::to_string(m), format_double(d), format_double(mc.stat_tol),
           d <= mc.stat_tol ? "true" : "false"});
  }
}

void cmd_sweep(const Context& ctx, const SweepArgs& s) {
  CsvTable t;
  csv_meta(t, ctx, "sweep");
  t.comment("kind", s.kind);
  if (s.kind == "boost-v") {
    sweep_boost_v(ctx, s, t);
  } else if (s.kind == "boost-delta") {
    sweep_boost_delta(ctx, s, t);
  } else {
    sweep_twirl_mc(ctx, s, t);
  }
  emit_csv(ctx, std::move(t));
}

// ---------------------------------------------------------------------------
// Config files

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(),
                     [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::optional<std::string> config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return std::nullopt;
}

// Appends key=value settings as flags unless the command line already sets them.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  const auto path = config_path(args);
  if (!path) return args;
  std::ifstream f(*path);
  if (!f) fail(ErrorCode::kFormat, "cannot read config file " + *path);
  std::vector<std::string> extra;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(ErrorCode::kFormat, *path + ":" + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || key == "config") {
      fail(ErrorCode::kFormat, *path + ":" + std::to_string(lineno) + ": invalid key");
    }
    const std::string flag = "--" + key;
    if (flag_present(args, flag)) continue;
    if (value == "true") {
      extra.push_back(flag);
    } else if (value != "false") {
      extra.push_back(flag + "=" + value);
    }
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

int exit_code_for(ErrorCode code) { return is_accuracy_failure(code) ? kExitAccuracy : kExitDomain; }

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  Context ctx;
  ctx.start = std::chrono::steady_clock::now();
  ctx.out = &out;

  std::vector<std::string> args;
  try {
    args = merge_config(raw_args);
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  }
  ctx.args = args;

  CLI::App app{"Relativistic quantum information toolkit", "relqi"};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  app.add_option("--seed", ctx.g.seed, "Random seed")->envname("RELQI_SEED")->capture_default_str();
  app.add_flag("--deterministic", ctx.g.deterministic, "Omit timestamps and timings from reports");
  app.add_option("--output", ctx.g.output, "Write the report to this file");
  app.add_option("--config", ctx.g.config, "Flat key=value file of default flags");
  app.add_option("--nodes", ctx.g.nodes, "Gauss-Hermite nodes per momentum axis")
      ->check(CLI::Range(2, 256))
      ->capture_default_str();
  app.add_flag("--no-validate", ctx.g.no_validate, "Accept input states without invariant checks");

  std::function<void()> action;

  std::vector<double> w_boost, w_rot, w_momentum;
  auto* wigner = app.add_subcommand("wigner", "Wigner rotation of a massive momentum");
  wigner->add_option("--boost", w_boost, "Boost velocity vx,vy,vz")->delimiter(',');
  wigner->add_option("--rotation", w_rot, "Rotation ax,ay,az,angle applied after the boost")->delimiter(',');
  wigner->add_option("--momentum", w_momentum, "Spatial momentum px,py,pz (units of mc)")
      ->delimiter(',')
      ->required();
  wigner->callback([&] { action = [&] { cmd_wigner(ctx, w_boost, w_rot, w_momentum); }; });

  OverlapArgs ov;
  double ov_mass = 0.0;
  auto* overlap_cmd = app.add_subcommand("overlap", "Translation overlaps of a Gaussian packet");
  overlap_cmd->add_option("--delta", ov.delta, "Momentum spread (units of mc)")->required();
  overlap_cmd->add_option("--a", ov.a, "Separations (units of hbar/mc)")->delimiter(',');
  overlap_cmd->add_option("--a-range", ov.a_range, "Separation grid lo:hi:count");
  overlap_cmd->add_flag("--min-separation", ov.min_separation, "Report the smallest distinguishable separation");
  overlap_cmd->add_option("--threshold", ov.threshold, "Overlap threshold")->capture_default_str();
  auto* mass_opt = overlap_cmd->add_option("--mass-mev", ov_mass, "Rest energy for conversion to angstrom");
  overlap_cmd->callback([&] {
    if (mass_opt->count() > 0) ov.mass_mev = ov_mass;
    action = [&] { cmd_overlap(ctx, ov); };
  });

  ChannelArgs ch;
  auto* channel = app.add_subcommand("channel", "Single-qubit boost channels");
  channel->require_subcommand(1);
  for (const std::string kind : {"boost-approx", "boost-exact", "mixture"}) {
    auto* sub = channel->add_subcommand(kind);
    if (kind != "mixture") sub->add_option("--v", ch.v, "Boost speed")->capture_default_str();
    sub->add_option("--delta", ch.delta, "Momentum spread")->capture_default_str();
    if (kind == "mixture") {
      sub->add_option("--speeds", ch.speeds, "Boost speeds")->delimiter(',')->required();
      sub->add_option("--weights", ch.weights, "Prior weights (default uniform)")->delimiter(',');
    }
    add_state_options(sub, ch.input, "zero");
    sub->callback([&, kind] { action = [&, kind] { cmd_channel(ctx, kind, ch); }; });
  }

  TwirlArgs tw;
  auto* twirl = app.add_subcommand("twirl", "Average over collective SU(2) rotations");
  twirl->add_option("--n", tw.n, "Number of qubits")->capture_default_str();
  twirl->add_option("--method", tw.method)->check(CLI::IsMember({"exact", "mc"}))->capture_default_str();
  twirl->add_option("--samples", tw.samples, "Monte Carlo samples")->capture_default_str();
  add_state_options(twirl, tw.input, "zero");
  twirl->callback([&] { action = [&] { cmd_twirl(ctx, tw); }; });

  CodecArgs cd;
  auto* codec = app.add_subcommand("codec", "Noiseless subsystem codes");
  codec->require_subcommand(1);
  for (const std::string act : {"encode", "decode", "info"}) {
    auto* sub = codec->add_subcommand(act);
    sub->add_option("--n", cd.n, "Number of qubits")->capture_default_str();
    sub->add_option("--j", cd.j, "Total spin sector (default: largest multiplicity)");
    sub->add_option("--dim", cd.dim, "Logical dimension (default: full multiplicity)");
    if (act == "encode") {
      sub->add_option("--logical-index", cd.logical_index, "Logical basis state");
      sub->add_option("--logical-state", cd.logical_file, "Logical state JSON file");
    } else if (act == "decode") {
      sub->add_option("--state", cd.state_file, "Physical state JSON file")->required();
    } else {
      sub->add_flag("--include-isometry", cd.include_isometry, "Embed the encoding isometry");
    }
    sub->callback([&, act] { action = [&, act] { cmd_codec(ctx, act, cd); }; });
  }

  int n_max = 8;
  auto* mult = app.add_subcommand("multiplicity", "Total-spin multiplicity table");
  mult->add_option("--n-max", n_max, "Largest qubit count")->capture_default_str();
  mult->callback([&] { action = [&] { cmd_multiplicity(ctx, n_max); }; });

  PhotonArgs ph;
  auto* photon = app.add_subcommand("photon", "Two-photon helicity code under a Lorentz transformation");
  photon->add_option("--boost", ph.boost, "Boost velocity vx,vy,vz")->delimiter(',');
  photon->add_option("--rotation", ph.rotation, "Rotation ax,ay,az,angle applied after the boost")->delimiter(',');
  photon->add_option("--momentum", ph.momentum, "Photon momentum direction and frequency px,py,pz")
      ->delimiter(',');
  photon->add_option("--logical", ph.logical, "Logical amplitudes re0,im0,re1,im1")->delimiter(',');
  photon->callback([&] { action = [&] { cmd_photon(ctx, ph); }; });

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps emitting CSV");
  sweep->add_option("--kind", sw.kind)
      ->check(CLI::IsMember({"boost-v", "boost-delta", "twirl-mc"}))
      ->capture_default_str();
  sweep->add_option("--v-range", sw.v_range, "Speed grid lo:hi:count (boost-v)")->capture_default_str();
  sweep->add_option("--v", sw.v, "Boost speed (boost-delta)")->capture_default_str();
  sweep->add_option("--delta", sw.delta, "Momentum spread; starting value for boost-delta")->capture_default_str();
  sweep->add_option("--halvings", sw.halvings, "Number of halvings of delta (boost-delta)")->capture_default_str();
  sweep->add_option("--n", sw.n, "Number of qubits (twirl-mc)")->capture_default_str();
  sweep->add_option("--samples", sw.samples, "Sample counts (twirl-mc)")->delimiter(',');
  add_state_options(sweep, sw.input, "plus");
  sweep->callback([&] { action = [&] { cmd_sweep(ctx, sw); }; });

  auto* selftest = app.add_subcommand("selftest", "Run the built-in invariant checks");
  selftest->callback([&] {
    action = [&] {
      std::ostringstream log;
      const int failures = run_selftest(log, ctx.g.seed);
      emit_text(ctx, log.str());
      if (failures > 0) fail(ErrorCode::kAccuracy, std::to_string(failures) + " self-test check(s) failed");
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (!action) throw UsageError("no command given");
    action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace relqi::cli
