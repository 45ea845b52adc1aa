#pragma once
#include <boost/multiprecision/cpp_int.hpp>

#include <string>

#include "ct/error.hpp"

namespace ct {

// Exact arithmetic everywhere; floating point would make UNSAT verdicts unsound.
using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

// "3", "-7", "1/2", "-5/3" (canonical: sign on the numerator, positive denominator).
std::string rational_str(const Rational& r);
Rational parse_rational(const std::string& text);
bool looks_like_rational(const std::string& text);

}  // namespace ct
