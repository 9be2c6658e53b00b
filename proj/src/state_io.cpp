#include "relqi/state_io.hpp"

#include <fstream>
#include <sstream>

#include "relqi/error.hpp"

namespace relqi {

nlohmann::json matrix_to_json(const CMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) entries.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"dims", {m.rows(), m.cols()}}, {"entries", std::move(entries)}};
}

CMatrix matrix_from_json(const nlohmann::json& j) {
  try {
    if (!j.is_object() || !j.contains("dims") || !j.contains("entries"))
      fail(ErrorCode::kFormat, "expected an object with \"dims\" and \"entries\"");
    const auto& dims = j.at("dims");
    const auto& entries = j.at("entries");
    if (!dims.is_array() || dims.size() != 2 || !entries.is_array())
      fail(ErrorCode::kFormat, "\"dims\" must be [rows, cols] and \"entries\" an array");
    const auto rows = dims[0].get<long long>();
    const auto cols = dims[1].get<long long>();
    if (rows < 1 || cols < 1) fail(ErrorCode::kFormat, "dimensions must be positive");
    if (static_cast<long long>(entries.size()) != rows * cols)
      fail(ErrorCode::kFormat, "entry count does not match dims");
    CMatrix m(rows, cols);
    for (long long k = 0; k < rows * cols; ++k) {
      const auto& e = entries[static_cast<std::size_t>(k)];
      if (!e.is_array() || e.size() != 2 || !e[0].is_number() || !e[1].is_number())
        fail(ErrorCode::kFormat, "entries must be [re, im] number pairs");
      m(k / cols, k % cols) = Complex(e[0].get<double>(), e[1].get<double>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, e.what());
  }
}

nlohmann::json state_to_json(const PureState& s) { return matrix_to_json(s.amplitudes()); }

nlohmann::json state_to_json(const DensityMatrix& rho) { return matrix_to_json(rho.matrix()); }

DensityMatrix LoadedState::density() const {
  if (const auto* p = std::get_if<PureState>(&state)) return p->density();
  return std::get<DensityMatrix>(state);
}

LoadedState state_from_json(const nlohmann::json& j, bool validate) {
  CMatrix m = matrix_from_json(j);
  try {
    if (m.cols() == 1) {
      return {PureState::from_amplitudes(CVector(m.col(0)), validate), validate};
    }
    if (m.rows() == m.cols()) {
      return {DensityMatrix::from_matrix(std::move(m), validate), validate};
    }
  } catch (const Error& e) {
    fail(ErrorCode::kFormat, e.what());
  }
  fail(ErrorCode::kFormat, "state must be a column vector or a square matrix");
}

LoadedState read_state_file(const std::filesystem::path& path, bool validate) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kFormat, "cannot open " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kFormat, path.string() + ": " + e.what());
  }
  return state_from_json(j, validate);
}

void write_json_file(const std::filesystem::path& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::kFormat, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace relqi
