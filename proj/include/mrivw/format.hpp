#pragma once

#include <string>
#include <string_view>

// Locale-independent number <-> text conversions.
namespace mrivw::fmt {

/// Shortest decimal text that parses back to exactly `value`.
std::string shortest(double value);

/// Fixed-point text with `decimals` digits; a rounded negative zero is
/// printed without its sign.
std::string fixed(double value, int decimals);

/// Strict parse of the whole field (surrounding blanks allowed).
bool parse_double(std::string_view text, double& out);

}  // namespace mrivw::fmt
