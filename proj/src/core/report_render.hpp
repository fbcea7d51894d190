#pragma once

#include <string>

#include <json.hpp>

namespace ratl {

// Plain-text table for an evaluation, frequency or completeness report JSON
// (dispatch on the "report" field).
std::string render_report_text(const nlohmann::json& report);

} // namespace ratl
