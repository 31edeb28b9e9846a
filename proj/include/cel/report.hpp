#pragma once

#include <string>

#include "cel/conformal.hpp"

namespace cel::report {

// Line-delimited records, one JSON object per point, then one aggregate
// object. Field names follow the InvariantReport layout; identical inputs
// (including the seed) produce byte-identical output.
std::string classification_records(const invariants::Classification& c, std::uint64_t seed);

std::string law_records(const lab::TransformationLawReport& r, std::uint64_t seed);

} // namespace cel::report
