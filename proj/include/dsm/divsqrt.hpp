#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "dsm/engine.hpp"
#include "dsm/numeric.hpp"

namespace dsm {

// Positive normalized binary floating-point input: (1 + f/2^k) * 2^e with
// 0 <= f < 2^k.
struct FloatLikeInput {
  Integer f;
  unsigned k = 1;
  long e = 0;
};

Rational significand(const FloatLikeInput& x);  // in [1, 2)
Rational float_value(const FloatLikeInput& x);

struct ScaledDiv {
  Rational x;  // in [1/2, 1)
  Rational y;  // in [1, 2)
  long exponent;  // quotient = (x/y) * 2^exponent
};
ScaledDiv scale_div(const FloatLikeInput& x, const FloatLikeInput& y);

struct ScaledSqrt {
  Rational x;  // in [1/4, 1)
  long exponent;  // root = sqrt(x) * 2^exponent
};
ScaledSqrt scale_sqrt(const FloatLikeInput& x);

enum class RecipKind { reciprocal, rsqrt };

// Fixed-point round-to-nearest approximation g of 1/Y (or 1/sqrt(X)) on a
// 2^-kappa grid, with |g(arg) * arg - 1| <= 2^-kappa (reciprocal) resp.
// |g(arg) * sqrt(arg) - 1| < 2^-(kappa+1) (rsqrt); both within sigma_bound.
// A zero sigma budget selects the exact reciprocal (reciprocal kind only).
class RecipApprox {
 public:
  RecipKind kind() const { return kind_; }
  unsigned kappa() const { return kappa_; }
  bool exact() const { return exact_; }
  const Rational& sigma_bound() const { return sigma_bound_; }

  Rational operator()(const Rational& arg) const;

  friend RecipApprox make_recip(RecipKind kind, const Rational& sigma_budget);

 private:
  RecipKind kind_ = RecipKind::reciprocal;
  unsigned kappa_ = 0;
  bool exact_ = false;
  Rational sigma_bound_;
};

RecipApprox make_recip(RecipKind kind, const Rational& sigma_budget);

// State after i digits of the remainder-form recurrences. `v` is the digit
// that produced H_i; `tp` is the proxy computed at this state.
struct RemainderState {
  std::size_t i = 0;
  Integer b = 1;
  Rational h = 0;
  Rational r = 0;
  Integer v = 0;
  Rational tp = 0;
};

enum class RemainderOp { div, div_prescaled, sqrt };

struct RemainderTrace {
  RemainderOp op = RemainderOp::div;
  Rational x;
  Rational y;  // division only
  std::vector<Integer> betas;
  std::vector<Rational> omegas;
  std::vector<RemainderState> states;  // indices 0..steps
};

// Division: R_0 = X; T^p_i = g(Y) R_i; R_{i+1} = beta R_i - v Y.
// Invariant X = H_i Y + R_i / B_i holds exactly. X in [1/2,1), Y in [1,2).
RemainderTrace run_div(const Rational& x, const Rational& y, const std::vector<Integer>& betas,
                       const std::vector<DigitSelection>& dsfs, const RecipApprox& g,
                       std::size_t steps);

// Prescaled variant: R'_0 = g(Y) X; T^p_i = R'_i;
// R'_{i+1} = (beta R'_i - v) - v sigma(Y). Produces the same digits as
// run_div for the same selection functions.
RemainderTrace run_div_prescaled(const Rational& x, const Rational& y,
                                 const std::vector<Integer>& betas,
                                 const std::vector<DigitSelection>& dsfs, const RecipApprox& g,
                                 std::size_t steps);

// Square root: R_0 = X/2; T^p_i = mu_i g(X) R_i with mu_0 = 2, mu_i = 1;
// R_{i+1} = beta R_i - v (H_{i+1} + H_i)/2. Invariant X = H_i^2 + 2 R_i / B_i
// holds exactly. X in [1/4, 1).
RemainderTrace run_sqrt(const Rational& x, const std::vector<Integer>& betas,
                        const std::vector<DigitSelection>& dsfs, const RecipApprox& g,
                        std::size_t steps);

// CSV with columns i,B,H,v,R,Tp; rationals as "p/q".
std::string remainder_trace_csv(const RemainderTrace& trace);

struct RemainderCsvRow {
  std::size_t i;
  Rational b, h, r, tp;
  Integer v;
};
std::vector<RemainderCsvRow> parse_remainder_trace_csv(const std::string& text);

}  // namespace dsm
