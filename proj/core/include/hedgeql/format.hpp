#pragma once

#include <string>

#include "hedgeql/algebra.hpp"

namespace hedgeql {

/// Fixed-point rendering with trailing zeros trimmed, so published
/// boundaries print as written (7.35, 16.8, 26.25, ...).
std::string format_number(double value, int max_decimals = 6);

/// "[0, 7.35]" or "(52.2, 57.6]"; endpoints scaled when given a scale.
std::string format_interval(const FuzzyInterval& interval, const DomainScale* scale = nullptr,
                            int max_decimals = 6);

} // namespace hedgeql
