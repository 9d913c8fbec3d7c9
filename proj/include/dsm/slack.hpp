#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dsm/bounds.hpp"
#include "dsm/engine.hpp"

namespace dsm {

struct SlackConfig {
  ProxyKind op = ProxyKind::division;
  std::vector<Integer> betas;
  std::vector<Rational> omegas;  // Omega_1..Omega_n
  Rational sigma;
  DsfKind dsf_kind = DsfKind::truncating;
  TieRule tie = TieRule::half_even;
  unsigned grid_bits = 24;  // inputs move on a 2^-grid_bits dyadic grid
};

struct SlackReport {
  std::size_t target_i = 0;
  Rational best_x;
  Rational best_y;  // division only
  Integer achieved;  // best |v_i| found
  Integer vmax;      // certified bound on |v_i|
  Rational ratio;    // achieved / vmax
  std::uint64_t evaluations = 0;
  std::uint64_t seed = 0;
};

// Random multistart plus coordinate hill-climbing on the dyadic grid,
// maximizing |v_i| at the target step. Deterministic for a fixed seed.
// Throws std::logic_error if any evaluation exceeds the certified bound
// (that would falsify the bound table).
SlackReport slack_search(const SlackConfig& config, std::size_t target_i, std::uint64_t budget,
                         std::uint64_t seed);

std::string slack_report_csv_header();
std::string slack_report_csv(const SlackReport& report);
std::string slack_report_summary(const SlackReport& report);

}  // namespace dsm
