#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace qmrpm {

/// Exact rational number. All probabilities in the library are carried in this type.
///
/// Beware of gmpxx expression templates: always bind results to `Rational`, never `auto`.
using Rational = mpq_class;

Rational make_rational(long num, long den = 1);

/// Parses "p/q" or "p" (optionally signed). Throws ValidationError on malformed text
/// or a zero denominator.
Rational parse_rational(std::string_view text);

/// Canonical "p/q" text, always with an explicit denominator ("0/1", "3/1").
std::string to_string(const Rational& value);

double to_double(const Rational& value);

/// base^exp with the convention 0^0 = 1.
Rational power(const Rational& base, unsigned exp);

Rational abs_diff(const Rational& a, const Rational& b);

}  // namespace qmrpm
