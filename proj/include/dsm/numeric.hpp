#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace dsm {

using Integer = mpz_class;
using Rational = mpq_class;

// Well-formed input outside an operation's stated domain (distinct from a
// malformed request so callers can report the two differently).
struct domain_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

enum class TieRule {
  half_even,          // ties to the even integer (default everywhere)
  half_away,          // ties away from zero
  half_up,            // ties toward +inf
  half_down,          // ties toward -inf
};

enum class DecimalRound {
  nearest,  // half away from zero
  ceiling,  // toward +inf
};

// Canonical rational p/q with q > 0 and gcd(|p|, q) = 1.
Rational make_rational(const Integer& num, const Integer& den);

// Accepts "p/q", a plain integer, or the power form "2^-9" / "2^5",
// each with an optional leading sign.
Rational parse_rational(std::string_view text);

// Emission is always "p/q", including integer values ("5/1").
std::string to_fraction_string(const Rational& z);

Integer floor_rational(const Rational& z);
Integer ceil_rational(const Rational& z);

// Integer m with |z - m| <= 1/2; ties resolved per rule.
Integer round_to_nearest_int(const Rational& z, TieRule tie = TieRule::half_even);

// Largest multiple of 2^-f not exceeding z, so 0 <= z - result < 2^-f.
Rational truncate_frac_bits(const Rational& z, unsigned frac_bits);

// 2^e for either sign of e.
Rational pow2(long e);

// Fixed-point decimal string with exactly `digits` fractional digits.
std::string decimal_round(const Rational& z, unsigned digits, DecimalRound mode);

// floor(sqrt(n)), n >= 0.
Integer isqrt(const Integer& n);

// Rational bracket lo <= sqrt(x) <= hi with hi - lo <= 2^-precision_bits.
// Exact (lo == hi) when x is the square of a representable rational.
struct SqrtBracket {
  Rational lo;
  Rational hi;
};
SqrtBracket sqrt_bracket(const Rational& x, unsigned precision_bits = 128);

}  // namespace dsm
