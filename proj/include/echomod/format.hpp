#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace echomod {

/// Locale-independent shortest round-trip formatting.
std::string format_double(double v);
/// Locale-independent formatting with a fixed number of significant digits.
std::string format_double(double v, int significant_digits);

/// Whole-string parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view text);
std::optional<long long> parse_int(std::string_view text);
std::optional<unsigned long long> parse_u64(std::string_view text);

std::string_view trim(std::string_view s);

}  // namespace echomod
