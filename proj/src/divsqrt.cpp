#include "dsm/divsqrt.hpp"

#include <sstream>
#include <stdexcept>

#include "dsm/csv.hpp"

namespace dsm {

Rational significand(const FloatLikeInput& x) {
  if (x.k == 0) throw std::invalid_argument("float input: k must be positive");
  Integer scale = Integer(1) << x.k;
  if (x.f < 0 || x.f >= scale)
    throw std::invalid_argument("float input: fraction must satisfy 0 <= f < 2^k");
  return 1 + make_rational(x.f, scale);
}

Rational float_value(const FloatLikeInput& x) { return significand(x) * pow2(x.e); }

ScaledDiv scale_div(const FloatLikeInput& x, const FloatLikeInput& y) {
  ScaledDiv out;
  out.x = significand(x) / 2;
  out.y = significand(y);
  out.exponent = x.e - y.e + 1;
  return out;
}

ScaledSqrt scale_sqrt(const FloatLikeInput& x) {
  ScaledSqrt out;
  bool even = (x.e % 2) == 0;
  out.x = significand(x) / (even ? 4 : 2);
  out.exponent = even ? (x.e + 2) / 2 : (x.e + 1) / 2;
  return out;
}

RecipApprox make_recip(RecipKind kind, const Rational& sigma_budget) {
  if (sigma_budget < 0) throw std::invalid_argument("recip: sigma budget must be >= 0");
  RecipApprox out;
  out.kind_ = kind;
  if (sigma_budget == 0) {
    if (kind == RecipKind::rsqrt)
      throw std::invalid_argument("recip: exact reciprocal square root is not representable");
    out.exact_ = true;
    out.sigma_bound_ = 0;
    return out;
  }
  unsigned kappa = 0;
  while (pow2(-static_cast<long>(kappa)) > sigma_budget) ++kappa;
  out.kappa_ = kappa;
  out.sigma_bound_ = pow2(-static_cast<long>(kappa));
  return out;
}

Rational RecipApprox::operator()(const Rational& arg) const {
  if (arg <= 0) throw std::invalid_argument("recip: argument must be positive");
  if (exact_) return 1 / arg;
  Integer grid = Integer(1) << kappa_;
  if (kind_ == RecipKind::reciprocal) {
    return make_rational(round_to_nearest_int(Rational(grid) / arg), grid);
  }
  // round(2^kappa / sqrt(p/q)) = round(sqrt(2^(2 kappa) p q) / p); with
  // s = floor(2 sqrt(m)) the rounded value is floor((s + p) / (2p)).
  const Integer& p = arg.get_num();
  const Integer& q = arg.get_den();
  Integer m = p * q;
  m <<= 2 * kappa_;
  Integer s = isqrt(4 * m);
  Integer n;
  mpz_fdiv_q(n.get_mpz_t(), Integer(s + p).get_mpz_t(), Integer(2 * p).get_mpz_t());
  return make_rational(n, grid);
}

namespace {

void check_steps(const std::vector<Integer>& betas, const std::vector<DigitSelection>& dsfs,
                 std::size_t steps) {
  if (betas.size() < steps)
    throw std::invalid_argument("run: radix sequence shorter than requested steps");
  if (dsfs.size() != 1 && dsfs.size() < steps)
    throw std::invalid_argument("run: digit selection sequence shorter than requested steps");
  for (std::size_t i = 0; i < steps; ++i)
    if (betas[i] < 2) throw std::invalid_argument("run: every beta must be >= 2");
}

const DigitSelection& dsf_at(const std::vector<DigitSelection>& dsfs, std::size_t i) {
  return dsfs.size() == 1 ? dsfs[0] : dsfs[i - 1];
}

RemainderTrace make_trace(RemainderOp op, const Rational& x, const Rational& y,
                          const std::vector<Integer>& betas,
                          const std::vector<DigitSelection>& dsfs, std::size_t steps) {
  RemainderTrace trace;
  trace.op = op;
  trace.x = x;
  trace.y = y;
  for (std::size_t i = 1; i <= steps; ++i) {
    trace.betas.push_back(betas[i - 1]);
    trace.omegas.push_back(dsf_at(dsfs, i).omega);
  }
  return trace;
}

}  // namespace

RemainderTrace run_div(const Rational& x, const Rational& y, const std::vector<Integer>& betas,
                       const std::vector<DigitSelection>& dsfs, const RecipApprox& g,
                       std::size_t steps) {
  if (x < Rational(1, 2) || x >= 1) throw domain_error("div: X must lie in [1/2, 1)");
  if (y < 1 || y >= 2) throw domain_error("div: Y must lie in [1, 2)");
  check_steps(betas, dsfs, steps);

  Rational gy = g(y);
  RemainderTrace trace = make_trace(RemainderOp::div, x, y, betas, dsfs, steps);
  RemainderState s;
  s.r = x;
  s.tp = gy * s.r;
  trace.states.push_back(s);
  for (std::size_t i = 1; i <= steps; ++i) {
    const Integer& beta = betas[i - 1];
    RemainderState next;
    next.i = i;
    next.v = dsf_at(dsfs, i).select(Rational(beta) * s.tp);
    next.b = s.b * beta;
    next.h = s.h + make_rational(next.v, next.b);
    next.r = Rational(beta) * s.r - Rational(next.v) * y;
    next.tp = gy * next.r;
    trace.states.push_back(next);
    s = next;
  }
  return trace;
}

RemainderTrace run_div_prescaled(const Rational& x, const Rational& y,
                                 const std::vector<Integer>& betas,
                                 const std::vector<DigitSelection>& dsfs, const RecipApprox& g,
                                 std::size_t steps) {
  if (x < Rational(1, 2) || x >= 1) throw domain_error("div: X must lie in [1/2, 1)");
  if (y < 1 || y >= 2) throw domain_error("div: Y must lie in [1, 2)");
  check_steps(betas, dsfs, steps);

  Rational gy = g(y);
  Rational sigma = gy * y - 1;
  RemainderTrace trace = make_trace(RemainderOp::div_prescaled, x, y, betas, dsfs, steps);
  RemainderState s;
  s.r = gy * x;  // R'_0 = X'
  s.tp = s.r;
  trace.states.push_back(s);
  for (std::size_t i = 1; i <= steps; ++i) {
    const Integer& beta = betas[i - 1];
    RemainderState next;
    next.i = i;
    next.v = dsf_at(dsfs, i).select(Rational(beta) * s.tp);
    next.b = s.b * beta;
    next.h = s.h + make_rational(next.v, next.b);
    next.r = (Rational(beta) * s.r - Rational(next.v)) - Rational(next.v) * sigma;
    next.tp = next.r;
    trace.states.push_back(next);
    s = next;
  }
  return trace;
}

RemainderTrace run_sqrt(const Rational& x, const std::vector<Integer>& betas,
                        const std::vector<DigitSelection>& dsfs, const RecipApprox& g,
                        std::size_t steps) {
  if (x < Rational(1, 4) || x >= 1) throw domain_error("sqrt: X must lie in [1/4, 1)");
  check_steps(betas, dsfs, steps);

  Rational gx = g(x);
  RemainderTrace trace = make_trace(RemainderOp::sqrt, x, 0, betas, dsfs, steps);
  RemainderState s;
  s.r = x / 2;
  s.tp = 2 * gx * s.r;  // mu_0 = 2
  trace.states.push_back(s);
  for (std::size_t i = 1; i <= steps; ++i) {
    const Integer& beta = betas[i - 1];
    RemainderState next;
    next.i = i;
    next.v = dsf_at(dsfs, i).select(Rational(beta) * s.tp);
    next.b = s.b * beta;
    next.h = s.h + make_rational(next.v, next.b);
    next.r = Rational(beta) * s.r - Rational(next.v) * (next.h + s.h) / 2;
    next.tp = gx * next.r;  // mu_i = 1 for i > 0
    trace.states.push_back(next);
    s = next;
  }
  return trace;
}

std::string remainder_trace_csv(const RemainderTrace& trace) {
  std::ostringstream out;
  out << "i,B,H,v,R,Tp\n";
  for (const auto& s : trace.states) {
    out << s.i << ',' << to_fraction_string(Rational(s.b)) << ',' << to_fraction_string(s.h)
        << ',' << s.v << ',' << to_fraction_string(s.r) << ',' << to_fraction_string(s.tp)
        << '\n';
  }
  return out.str();
}

std::vector<RemainderCsvRow> parse_remainder_trace_csv(const std::string& text) {
  std::vector<RemainderCsvRow> rows;
  for (const auto& line : csv::split_lines(text)) {
    auto fields = csv::split_fields(line);
    if (fields.empty() || fields[0] == "i") continue;
    if (fields.size() != 6) throw std::invalid_argument("trace csv: expected 6 columns");
    RemainderCsvRow row;
    row.i = std::stoul(fields[0]);
    row.b = parse_rational(fields[1]);
    row.h = parse_rational(fields[2]);
    row.v = Integer(fields[3], 10);
    row.r = parse_rational(fields[4]);
    row.tp = parse_rational(fields[5]);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dsm
