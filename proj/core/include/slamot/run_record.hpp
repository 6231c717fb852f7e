#pragma once

#include <string>

#include "slamot/pipeline.hpp"

namespace slamot {

/// Canonical JSON of a run: frames, tracks and solver traces. Wall-clock
/// timings are left out so identical runs serialize identically.
std::string to_json(const RunRecord& r);

/// Parses the output of to_json. Throws std::runtime_error on malformed input.
RunRecord run_record_from_json(const std::string& text);

std::string timings_json(const StageTimings& t);

/// solve,frame,iteration,stage,total_cost
std::string residuals_csv(const RunRecord& r);

}  // namespace slamot
