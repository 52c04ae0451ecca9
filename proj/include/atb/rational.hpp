#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <boost/rational.hpp>

namespace atb {

/// Exact rational used for byte costs, footprints and arithmetic intensity.
/// Compare with == against Rational(n), not a bare integer: boost's mixed
/// operator== recurses forever under C++20 rewritten comparisons.
using Rational = boost::rational<std::int64_t>;

double to_double(const Rational& r);

/// Smallest integer >= r.
std::int64_t ceil_to_int(const Rational& r);

/// Parses "5/4", "2", "1.25" or "1.125" into an exact rational.
/// Throws std::invalid_argument on malformed text or zero denominator.
Rational parse_rational(std::string_view text);

/// Recovers an exact rational from a binary double whose denominator is at
/// most `max_denominator`. Throws std::invalid_argument when no such fraction
/// reproduces the value.
Rational rational_from_double(double value, std::int64_t max_denominator = 1024);

/// "5/4" or "2".
std::string to_string(const Rational& r);

}  // namespace atb
