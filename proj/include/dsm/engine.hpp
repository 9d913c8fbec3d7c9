#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "dsm/numeric.hpp"

namespace dsm {

// Per-step radices beta_i (1-indexed, each >= 2) and the running products
// B_i = beta_1 * ... * beta_i with B_0 = 1.
class RadixSequence {
 public:
  explicit RadixSequence(std::vector<Integer> betas);

  std::size_t size() const { return betas_.size(); }
  const Integer& beta(std::size_t i) const;  // 1-indexed
  const Integer& base(std::size_t i) const;  // B_i, 0-indexed
  const std::vector<Integer>& betas() const { return betas_; }

  bool all_power_of_two() const;
  unsigned radix_bits(std::size_t i) const;  // log2(beta_i); beta_i must be a power of two

 private:
  std::vector<Integer> betas_;
  std::vector<Integer> bases_;
};

bool is_power_of_two(const Integer& n);
unsigned log2_exact(const Integer& n);

enum class DsfKind { exact_nearest, truncating };

// A digit selection function together with its advertised rounding bound:
// |z - select(z)| <= omega for all z.
struct DigitSelection {
  DsfKind kind = DsfKind::exact_nearest;
  Rational omega;
  unsigned frac_bits = 0;  // truncating kind only
  TieRule tie = TieRule::half_even;
  std::function<Integer(const Rational&)> select;
};

// exact_nearest: omega = 1/2.
// truncating: smallest f with 1/2 + 2^-f <= omega_budget; selection first
// truncates to f fraction bits, then rounds to nearest.
// Rejects omega_budget < 1/2 (no selection function exists there).
DigitSelection make_dsf(DsfKind kind, const Rational& omega_budget,
                        TieRule tie = TieRule::half_even);

// Arbitrary selector with a caller-supplied bound (for adversarial tests).
DigitSelection make_custom_dsf(Rational omega, std::function<Integer(const Rational&)> select);

// floor(z_bound + omega): bound on |DSF(z)| over all |z| <= z_bound and all
// selection functions with rounding bound omega.
Integer digit_bound(const Rational& z_bound, const Rational& omega);

// Computable stand-in for the tail: (i, V, T_i) -> T^p_i = (1 + psi_i) T_i.
using TailProxy = std::function<Rational(std::size_t, const Rational&, const Rational&)>;

TailProxy identity_proxy();

// State after i digits. `v` is the digit that produced H_i (0 at i = 0);
// `tp` is the proxy of this state's own tail, filled when the state is made.
struct DsmState {
  std::size_t i = 0;
  Integer b = 1;
  Rational h = 0;
  Rational t = 0;
  Integer v = 0;
  Rational tp = 0;
};

DsmState initial_state(const Rational& v_target, const TailProxy& proxy = identity_proxy());

// One step of the basic recurrence: v = select(beta * T).
DsmState step_basic(const DsmState& state, const Integer& beta_next,
                    const DigitSelection& dsf, const Rational& v_target);

// One step of the proxy recurrence: v = select(beta * T^p) where state.tp
// must have been produced by the same provider (initial_state / step_proxy
// maintain this). The provider is consulted again to fill the next state's tp.
DsmState step_proxy(const DsmState& state, const Integer& beta_next,
                    const DigitSelection& dsf, const TailProxy& proxy,
                    const Rational& v_target);

struct DsmConfig {
  RadixSequence radices;
  std::vector<DigitSelection> dsfs;  // one per step, or a single one reused

  const DigitSelection& dsf(std::size_t i) const;  // 1-indexed
};

enum class RunMode { basic, proxy };

struct DsmTrace {
  std::vector<Integer> betas;
  std::vector<Rational> omegas;
  RunMode mode = RunMode::basic;
  std::vector<DsmState> states;  // indices 0..steps
};

// Runs steps of Algorithm 1 (basic) or Algorithm 2 (proxy). Proxy mode
// requires v_target >= 0. Rejects configs shorter than `steps`.
DsmTrace run(const Rational& v_target, const DsmConfig& config, std::size_t steps,
             RunMode mode, const TailProxy& proxy = identity_proxy());

// CSV with columns i,B,H,v,T,Tp; rationals emitted as "p/q".
std::string trace_csv(const DsmTrace& trace);

struct TraceCsvRow {
  std::size_t i;
  Rational b, h, t, tp;
  Integer v;
};
std::vector<TraceCsvRow> parse_trace_csv(const std::string& text);

}  // namespace dsm
