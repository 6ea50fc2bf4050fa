#pragma once

#include <string>

#include <json.hpp>

namespace kloostpath {

// Experiment runners behind the CLI: each takes a resolved configuration and
// returns the shared report schema
//   {"kind", "spec", "n_grid"/"p_grid", "series", "value", "assertions", "pass"}
// with deterministic key order and values for a fixed config + seed.
// Supported kinds: equidist, moments, sumprod, census, series-compare.
nlohmann::ordered_json run_experiment(const nlohmann::json& config);

} // namespace kloostpath
