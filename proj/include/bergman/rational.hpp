#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <string>
#include <string_view>

namespace bergman {

// Exact rational scalar used by the polyhedral layer and for model
// coefficients/exponents.  Conversion to double happens only at
// quadrature time.
using Rat = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

double to_double(const Rat& r);

// Canonical form: "p" when the denominator is 1, otherwise "p/q".
std::string to_string(const Rat& r);

// Accepts "p", "p/q" and decimal literals such as "0.25" (converted
// exactly).  Throws std::invalid_argument on anything else.
Rat parse_rational(std::string_view s);

}  // namespace bergman
