#include "dsm/engine.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

#include "dsm/csv.hpp"

namespace dsm {

RadixSequence::RadixSequence(std::vector<Integer> betas) : betas_(std::move(betas)) {
  bases_.reserve(betas_.size() + 1);
  bases_.push_back(1);
  for (std::size_t i = 0; i < betas_.size(); ++i) {
    if (betas_[i] < 2) throw std::invalid_argument("radix sequence: every beta must be >= 2");
    bases_.push_back(bases_.back() * betas_[i]);
  }
}

const Integer& RadixSequence::beta(std::size_t i) const {
  if (i < 1 || i > betas_.size()) throw std::out_of_range("radix sequence: beta index");
  return betas_[i - 1];
}

const Integer& RadixSequence::base(std::size_t i) const {
  if (i >= bases_.size()) throw std::out_of_range("radix sequence: base index");
  return bases_[i];
}

bool is_power_of_two(const Integer& n) {
  return n > 0 && mpz_popcount(n.get_mpz_t()) == 1;
}

unsigned log2_exact(const Integer& n) {
  if (!is_power_of_two(n)) throw std::invalid_argument("log2_exact: not a power of two");
  return static_cast<unsigned>(mpz_scan1(n.get_mpz_t(), 0));
}

bool RadixSequence::all_power_of_two() const {
  for (const auto& b : betas_)
    if (!is_power_of_two(b)) return false;
  return true;
}

unsigned RadixSequence::radix_bits(std::size_t i) const { return log2_exact(beta(i)); }

DigitSelection make_dsf(DsfKind kind, const Rational& omega_budget, TieRule tie) {
  const Rational half(1, 2);
  if (omega_budget < half)
    throw std::invalid_argument("dsf: omega budget below 1/2 admits no selection function");

  DigitSelection out;
  out.kind = kind;
  out.tie = tie;
  if (kind == DsfKind::exact_nearest) {
    out.omega = half;
    out.select = [tie](const Rational& z) { return round_to_nearest_int(z, tie); };
    return out;
  }

  Rational slack = omega_budget - half;
  if (slack <= 0)
    throw std::invalid_argument("dsf: truncating kind needs omega budget strictly above 1/2");
  unsigned f = 0;
  while (pow2(-static_cast<long>(f)) > slack) ++f;
  out.frac_bits = f;
  out.omega = half + pow2(-static_cast<long>(f));
  out.select = [f, tie](const Rational& z) {
    return round_to_nearest_int(truncate_frac_bits(z, f), tie);
  };
  return out;
}

DigitSelection make_custom_dsf(Rational omega, std::function<Integer(const Rational&)> select) {
  if (omega < Rational(1, 2))
    throw std::invalid_argument("dsf: omega below 1/2 admits no selection function");
  DigitSelection out;
  out.kind = DsfKind::exact_nearest;
  out.omega = std::move(omega);
  out.select = std::move(select);
  return out;
}

Integer digit_bound(const Rational& z_bound, const Rational& omega) {
  if (z_bound < 0) throw std::invalid_argument("digit_bound: z_bound must be >= 0");
  if (omega < Rational(1, 2)) throw std::invalid_argument("digit_bound: omega must be >= 1/2");
  return floor_rational(z_bound + omega);
}

TailProxy identity_proxy() {
  return [](std::size_t, const Rational&, const Rational& t) { return t; };
}

DsmState initial_state(const Rational& v_target, const TailProxy& proxy) {
  DsmState s;
  s.t = v_target;
  s.tp = proxy(0, v_target, s.t);
  return s;
}

namespace {

DsmState step_on(const DsmState& state, const Rational& selection_arg, const Integer& beta_next,
                 const DigitSelection& dsf, const TailProxy& proxy, const Rational& v_target) {
  DsmState next;
  next.i = state.i + 1;
  next.v = dsf.select(Rational(beta_next) * selection_arg);
  next.b = state.b * beta_next;
  next.h = state.h + make_rational(next.v, next.b);
  next.t = Rational(beta_next) * state.t - Rational(next.v);
  next.tp = proxy(next.i, v_target, next.t);
  return next;
}

}  // namespace

DsmState step_basic(const DsmState& state, const Integer& beta_next, const DigitSelection& dsf,
                    const Rational& v_target) {
  return step_on(state, state.t, beta_next, dsf, identity_proxy(), v_target);
}

DsmState step_proxy(const DsmState& state, const Integer& beta_next, const DigitSelection& dsf,
                    const TailProxy& proxy, const Rational& v_target) {
  return step_on(state, state.tp, beta_next, dsf, proxy, v_target);
}

const DigitSelection& DsmConfig::dsf(std::size_t i) const {
  if (dsfs.empty()) throw std::invalid_argument("config: no digit selection functions");
  if (dsfs.size() == 1) return dsfs[0];
  if (i < 1 || i > dsfs.size()) throw std::invalid_argument("config: dsf index out of range");
  return dsfs[i - 1];
}

DsmTrace run(const Rational& v_target, const DsmConfig& config, std::size_t steps, RunMode mode,
             const TailProxy& proxy) {
  if (config.radices.size() < steps)
    throw std::invalid_argument("run: radix sequence shorter than requested steps");
  if (config.dsfs.size() != 1 && config.dsfs.size() < steps)
    throw std::invalid_argument("run: digit selection sequence shorter than requested steps");
  if (mode == RunMode::proxy && v_target < 0)
    throw std::invalid_argument("run: proxy mode requires V >= 0");
  const TailProxy& p = (mode == RunMode::proxy) ? proxy : identity_proxy();

  DsmTrace trace;
  trace.mode = mode;
  for (std::size_t i = 1; i <= steps; ++i) {
    trace.betas.push_back(config.radices.beta(i));
    trace.omegas.push_back(config.dsf(i).omega);
  }

  trace.states.push_back(initial_state(v_target, p));
  for (std::size_t i = 0; i < steps; ++i) {
    const DsmState& cur = trace.states.back();
    const DigitSelection& dsf = config.dsf(i + 1);
    trace.states.push_back(mode == RunMode::basic
                               ? step_basic(cur, config.radices.beta(i + 1), dsf, v_target)
                               : step_proxy(cur, config.radices.beta(i + 1), dsf, p, v_target));
  }
  return trace;
}

std::string trace_csv(const DsmTrace& trace) {
  std::ostringstream out;
  out << "i,B,H,v,T,Tp\n";
  for (const auto& s : trace.states) {
    out << s.i << ',' << to_fraction_string(Rational(s.b)) << ',' << to_fraction_string(s.h)
        << ',' << s.v << ',' << to_fraction_string(s.t) << ',' << to_fraction_string(s.tp)
        << '\n';
  }
  return out.str();
}

std::vector<TraceCsvRow> parse_trace_csv(const std::string& text) {
  std::vector<TraceCsvRow> rows;
  for (const auto& line : csv::split_lines(text)) {
    auto fields = csv::split_fields(line);
    if (fields.empty() || fields[0] == "i") continue;
    if (fields.size() != 6) throw std::invalid_argument("trace csv: expected 6 columns");
    TraceCsvRow row;
    row.i = std::stoul(fields[0]);
    row.b = parse_rational(fields[1]);
    row.h = parse_rational(fields[2]);
    row.v = Integer(fields[3], 10);
    row.t = parse_rational(fields[4]);
    row.tp = parse_rational(fields[5]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dsm
