#pragma once

// JSON interchange for matrices and states:
//   {"dims":[rows,cols],"entries":[[re,im],...]}   (row-major)
// A pure state is a rows×1 column; a density matrix is square.

#include <filesystem>
#include <variant>

#include <json.hpp>

#include "relqi/qmath.hpp"

namespace relqi {

nlohmann::json matrix_to_json(const CMatrix& m);
CMatrix matrix_from_json(const nlohmann::json& j);

nlohmann::json state_to_json(const PureState& s);
nlohmann::json state_to_json(const DensityMatrix& rho);

struct LoadedState {
  std::variant<PureState, DensityMatrix> state;
  bool validated = true;

  bool is_pure() const { return std::holds_alternative<PureState>(state); }
  /// Density matrix view (|ψ⟩⟨ψ| for pure states).
  DensityMatrix density() const;
};

/// Parses and (unless `validate` is false) checks normalization / density
/// invariants. Malformed input or invariant violations raise format errors.
LoadedState state_from_json(const nlohmann::json& j, bool validate = true);

LoadedState read_state_file(const std::filesystem::path& path, bool validate = true);
void write_json_file(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace relqi
