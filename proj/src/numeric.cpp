#include "dsm/numeric.hpp"

#include <cctype>
#include <stdexcept>

namespace dsm {

Rational make_rational(const Integer& num, const Integer& den) {
  if (den == 0) throw std::invalid_argument("rational: zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

namespace {

Integer parse_integer(std::string_view s, std::string_view whole) {
  if (s.empty()) throw std::invalid_argument("rational: empty integer in \"" + std::string(whole) + "\"");
  std::size_t start = (s[0] == '+' || s[0] == '-') ? 1 : 0;
  if (start == s.size()) throw std::invalid_argument("rational: bad integer in \"" + std::string(whole) + "\"");
  for (std::size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i])))
      throw std::invalid_argument("rational: bad integer in \"" + std::string(whole) + "\"");
  }
  return Integer(std::string(s), 10);
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw std::invalid_argument("rational: empty string");

  bool negative = false;
  if (s[0] == '+' || s[0] == '-') {
    negative = (s[0] == '-');
    s.remove_prefix(1);
  }

  Rational value;
  if (auto caret = s.find('^'); caret != std::string_view::npos) {
    Integer base = parse_integer(s.substr(0, caret), text);
    if (base != 2) throw std::invalid_argument("rational: only base 2 powers supported in \"" + std::string(text) + "\"");
    Integer expo = parse_integer(s.substr(caret + 1), text);
    if (!expo.fits_slong_p()) throw std::invalid_argument("rational: exponent out of range");
    value = pow2(expo.get_si());
  } else if (auto slash = s.find('/'); slash != std::string_view::npos) {
    Integer num = parse_integer(s.substr(0, slash), text);
    Integer den = parse_integer(s.substr(slash + 1), text);
    if (den <= 0) throw std::invalid_argument("rational: denominator must be positive in \"" + std::string(text) + "\"");
    value = make_rational(num, den);
  } else {
    value = Rational(parse_integer(s, text));
  }
  return negative ? Rational(-value) : value;
}

std::string to_fraction_string(const Rational& z) {
  return z.get_num().get_str() + "/" + z.get_den().get_str();
}

Integer floor_rational(const Rational& z) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), z.get_num().get_mpz_t(), z.get_den().get_mpz_t());
  return q;
}

Integer ceil_rational(const Rational& z) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), z.get_num().get_mpz_t(), z.get_den().get_mpz_t());
  return q;
}

Integer round_to_nearest_int(const Rational& z, TieRule tie) {
  Integer lo = floor_rational(z);
  Rational frac = z - Rational(lo);
  int against_half = cmp(frac, Rational(1, 2));
  if (against_half < 0) return lo;
  if (against_half > 0) return lo + 1;
  switch (tie) {
    case TieRule::half_even:
      return mpz_even_p(lo.get_mpz_t()) ? lo : lo + 1;
    case TieRule::half_away:
      return z >= 0 ? lo + 1 : lo;
    case TieRule::half_up:
      return lo + 1;
    case TieRule::half_down:
      return lo;
  }
  throw std::logic_error("unreachable tie rule");
}

Rational truncate_frac_bits(const Rational& z, unsigned frac_bits) {
  Integer scaled_num = z.get_num() << frac_bits;
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), scaled_num.get_mpz_t(), z.get_den().get_mpz_t());
  Integer den = Integer(1) << frac_bits;
  return make_rational(q, den);
}

Rational pow2(long e) {
  Integer p = Integer(1) << static_cast<unsigned long>(e >= 0 ? e : -e);
  return e >= 0 ? Rational(p) : make_rational(1, p);
}

std::string decimal_round(const Rational& z, unsigned digits, DecimalRound mode) {
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, digits);
  Rational scaled = z * Rational(scale);

  Integer n;
  if (mode == DecimalRound::ceiling) {
    n = ceil_rational(scaled);
  } else {
    Rational mag = abs(scaled) + Rational(1, 2);
    n = floor_rational(mag);
    if (sgn(scaled) < 0) n = -n;
  }

  bool negative = n < 0;
  Integer magnitude = abs(n);
  std::string body = magnitude.get_str();
  if (digits == 0) return (negative ? "-" : "") + body;
  if (body.size() < digits + 1) body.insert(0, digits + 1 - body.size(), '0');
  body.insert(body.size() - digits, ".");
  return (negative ? "-" : "") + body;
}

Integer isqrt(const Integer& n) {
  if (n < 0) throw std::invalid_argument("isqrt: negative argument");
  Integer r;
  mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
  return r;
}

SqrtBracket sqrt_bracket(const Rational& x, unsigned precision_bits) {
  if (x < 0) throw std::invalid_argument("sqrt_bracket: negative argument");
  // sqrt(a/b) = sqrt(a*b)/b; scale by 2^(2p) so the bracket width is 1/(b*2^p).
  Integer scaled = x.get_num() * x.get_den();
  scaled <<= 2 * precision_bits;
  Integer root = isqrt(scaled);
  Integer den = x.get_den() << precision_bits;
  SqrtBracket out;
  out.lo = make_rational(root, den);
  out.hi = (root * root == scaled) ? out.lo : make_rational(root + 1, den);
  return out;
}

}  // namespace dsm
