#pragma once

#include <string>
#include <vector>

namespace greydea {

// Shortest decimal form that round-trips to the same double. Locale-free.
std::string format_full(double value);

// Fixed-point rounding to `decimals` places with trailing zeros stripped,
// matching the source tables' display style (so 0.0030 prints as 0.003 and
// 1.000 prints as 1). Locale-free.
std::string format_paper(double value, int decimals);

// Numeric counterpart of format_paper: value rounded half away from zero to
// `decimals` places.
double round_to(double value, int decimals);

// |predicted - actual| / actual.
double relative_error(double actual, double predicted);

std::string csv_escape(const std::string& field);

// Rows (header first) joined with commas, one record per line.
std::string csv_join(const std::vector<std::vector<std::string>>& rows);

} // namespace greydea
