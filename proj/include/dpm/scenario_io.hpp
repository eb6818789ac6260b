#pragma once

#include "dpm/workload.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace dpm {

/// Parses and validates a scenario document. Sections that are left out
/// (psm, thresholds, rules, lem) take the library defaults. Throws
/// ConfigInvalid with a message naming the offending field or rule row.
Scenario scenario_from_json(std::string_view text);

/// Fully expanded document (every section explicit, full transition table).
std::string scenario_to_json(const Scenario& scenario);

/// Throws ConfigInvalid on hard errors; returns non-fatal warnings such as
/// shadowed rule rows.
std::vector<std::string> validate_scenario(const Scenario& scenario);

}  // namespace dpm
