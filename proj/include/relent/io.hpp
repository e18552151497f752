#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "relent/channels.hpp"
#include "relent/forms.hpp"
#include "relent/modular.hpp"
#include "relent/states.hpp"

namespace relent {

using Json = nlohmann::ordered_json;

// Matrix JSON: { "rows": n, "cols": m, "re": [[..]], "im": [[..]] },
// row-major arrays.
Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

// State JSON: matrix fields plus "kind": "density" and optional
// seed/rank metadata.
struct StateMetadata {
  std::optional<std::uint64_t> seed;
  std::optional<int> rank;
};
Json state_to_json(const DensityOperator& rho, const StateMetadata& meta = {});
DensityOperator state_from_json(const Json& j);

// Channel JSON: { "kraus": [MatrixJSON, ...], "d_in": n, "d_out": m }.
Json channel_to_json(const QuantumChannel& c);
QuantumChannel channel_from_json(const Json& j);

// Form JSON: matrix fields plus { "basis": "matrix-units", "space_dim": n }.
Json form_to_json(const PositiveForm& form);
PositiveForm form_from_json(const Json& j);

Json load_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& j);

DensityOperator load_state(const std::string& path);
QuantumChannel load_channel(const std::string& path);

// CSV emitters (header line included).
std::string jensen_table_csv(const std::vector<JensenTrialRow>& rows);
std::string interpolation_trace_csv(const EntropyFormResult& result);

Json chain_link_to_json(const ChainLink& link);

// Order-sensitive FNV-1a over the raw matrix entries; identifies the inputs
// of a CLI report.
std::string inputs_hash(const std::vector<const Matrix*>& matrices);

}  // namespace relent
