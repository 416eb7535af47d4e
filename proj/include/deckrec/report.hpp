#pragma once

#include <string>

#include <json.hpp>

#include "deckrec/pipeline.hpp"

namespace deckrec {

inline constexpr const char* report_schema = "deckrec-report/1";

/// Machine-readable report. Timings are left out unless requested so that
/// fixed-seed runs serialize identically.
nlohmann::json to_json(const Analysis& an, bool include_timings = false);

std::string to_text(const Analysis& an);

}  // namespace deckrec
