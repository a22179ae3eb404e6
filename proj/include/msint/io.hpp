#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "msint/estimators.hpp"
#include "msint/multistate.hpp"
#include "msint/simulation.hpp"

namespace msint {

using json = nlohmann::json;

/// Malformed document; the message names the offending field.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// {d, tau, grid, paths: [{init, jumps: [[t, state], ...], w}, ...]}
PathSpace pathspace_from_json(const json& doc);
json to_json(const PathSpace& ps);

/// {name, d, tau, grid, rule: "markov"|"entry_time_dependent"|"duration_dependent",
///  initial: [...], transitions: [{time?, from, to, prob, key?}, ...]}
ScenarioConfig scenario_from_json(const json& doc);
json to_json(const ScenarioConfig& s);

/// {kind: "none"|"independent_right"|"state_filtering_conforming"|"violating",
///  times?, probs?, q?, delta?}
CensoringConfig censoring_from_json(const json& doc);
json to_json(const CensoringConfig& c);

/// {d, initial, times, hazard_increments, transition, occupation}; matrices
/// are arrays of rows.
json to_json(const EstimateGrid& grid);

json to_json(const Matrix& m);
json to_json(const RowVector& v);

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws IoError when the file cannot be read and ConfigError when it does
/// not parse.
json read_json_file(const std::filesystem::path& path);

}  // namespace msint
