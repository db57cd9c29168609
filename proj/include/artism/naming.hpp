#pragma once

#include <string>
#include <vector>

namespace artism {

/// Deterministic ism name: modifier units (all but the last) TitleCased and
/// hyphen-joined, then the head unit TitleCased with "ism" appended after
/// dropping a final vowel. A head already ending in "ism" is kept as is.
///   {"negative volume", "object"}  -> "Negative-Volume Objectism"
///   {"absence", "minimalism"}      -> "Absence Minimalism"
///   {"hollow form", "aura"}        -> "Hollow-Form Aurism"
std::string ism_name_from_units(const std::vector<std::string>& unit_labels);

}  // namespace artism
