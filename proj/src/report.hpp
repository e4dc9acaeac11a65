#pragma once

#include <string>

#include "stats.hpp"

namespace periorbital {

// Standalone SVG scatter of (mean, difference) with a solid bias line and
// dashed limits of agreement. Output depends only on the report contents.
std::string bland_altman_svg(const AgreementReport& report, const std::string& title);

}  // namespace periorbital
