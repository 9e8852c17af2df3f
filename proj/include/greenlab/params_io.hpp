#pragma once

#include <string>

#include "greenlab/model_core.hpp"

namespace greenlab {

// Flat "key = value" text, one pair per line, # comments, case-sensitive keys.
// Keys that differ by physiological age carry a .pa1/.pa2 suffix (epsilon.pa1,
// C_b.pa2, ...). Missing, unknown and out-of-domain keys are all reported by
// name. parse_params(write_params(p)) == p.
ParameterSet parse_params(const std::string& text);

std::string write_params(const ParameterSet& params);

// Side-by-side CSV of two parameter sets: every scalar with difference and
// b/a ratio, then the sink variation profiles of both.
std::string comparison_csv(const ParameterSet& a, const ParameterSet& b);

}  // namespace greenlab
