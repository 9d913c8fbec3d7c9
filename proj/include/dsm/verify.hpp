#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsm/bounds.hpp"
#include "dsm/divsqrt.hpp"
#include "dsm/engine.hpp"

namespace dsm {

enum class VerifyOp { basic, div, div_prescaled, sqrt };

struct VerifyConfig {
  VerifyOp op = VerifyOp::div;
  std::vector<Integer> betas;
  std::vector<Rational> omegas;  // Omega_1..Omega_n
  Rational sigma;                // ignored for basic
  DsfKind dsf_kind = DsfKind::truncating;
  TieRule tie = TieRule::half_even;
  std::size_t steps = 4;
  unsigned input_grid_bits = 24;    // random inputs drawn from an f/2^k grid
  unsigned sqrt_bracket_bits = 128; // precision of sqrt(X) brackets
};

std::vector<DigitSelection> make_dsfs(const VerifyConfig& config);
BoundTable config_bound_table(const VerifyConfig& config);

struct Violation {
  std::string what;        // which invariant failed, with values
  std::string reproducer;  // the input that triggered it
};

// Checks every invariant of the matching property list against one input.
// `y` is ignored except for division ops; `table` must come from
// config_bound_table(config).
std::vector<Violation> verify_one(const VerifyConfig& config, const BoundTable& table,
                                  const Rational& x, const Rational& y);

struct VerifySummary {
  std::size_t samples = 0;
  std::size_t passed = 0;
  std::vector<Violation> violations;  // first few, with reproducers
};

// Runs `samples` seeded random inputs through verify_one.
VerifySummary verify_random(const VerifyConfig& config, std::size_t samples, std::uint64_t seed);

// Deterministic sample inputs for a given op (also used by the CLI to report
// reproducers).
Rational random_div_x(std::uint64_t bits, unsigned grid_bits);
Rational random_div_y(std::uint64_t bits, unsigned grid_bits);
Rational random_sqrt_x(std::uint64_t bits, unsigned grid_bits);
Rational random_unit(std::uint64_t bits, unsigned grid_bits);  // [0, 1)

}  // namespace dsm
