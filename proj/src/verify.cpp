#include "dsm/verify.hpp"

#include <random>
#include <sstream>

namespace dsm {

namespace {

// Closed rational interval; just enough arithmetic for the sqrt checks.
struct Iv {
  Rational lo, hi;
};

Iv iv_point(const Rational& z) { return {z, z}; }

Iv operator+(const Iv& u, const Iv& v) { return {u.lo + v.lo, u.hi + v.hi}; }
Iv operator-(const Iv& u, const Iv& v) { return {u.lo - v.hi, u.hi - v.lo}; }

Iv operator*(const Iv& u, const Iv& v) {
  Rational c1 = u.lo * v.lo, c2 = u.lo * v.hi, c3 = u.hi * v.lo, c4 = u.hi * v.hi;
  Rational lo = std::min(std::min(c1, c2), std::min(c3, c4));
  Rational hi = std::max(std::max(c1, c2), std::max(c3, c4));
  return {lo, hi};
}

Iv operator/(const Iv& u, const Iv& v) {
  if (v.lo <= 0) throw std::logic_error("interval: division by non-positive interval");
  return u * Iv{1 / v.hi, 1 / v.lo};
}

Iv iv_abs(const Iv& u) {
  if (u.lo >= 0) return u;
  if (u.hi <= 0) return {Rational(-u.hi), Rational(-u.lo)};
  Rational negated_lo = -u.lo;
  return {Rational(0), negated_lo > u.hi ? negated_lo : u.hi};
}

bool iv_contains(const Iv& u, const Rational& z) { return u.lo <= z && z <= u.hi; }

std::string fmt(const Rational& z) { return to_fraction_string(z); }

struct Checker {
  std::vector<Violation> out;
  std::string reproducer;

  void fail(const std::string& what) { out.push_back({what, reproducer}); }
  void expect(bool ok, const std::string& what) {
    if (!ok) fail(what);
  }
};

// V <= c with V = sqrt(x): exact via squares.
bool sqrt_le(const Rational& x, const Rational& c) { return c >= 0 && x <= c * c; }
// V >= c with V = sqrt(x).
bool sqrt_ge(const Rational& x, const Rational& c) { return c <= 0 || x >= c * c; }

std::string flags_for(const VerifyConfig& config) {
  std::ostringstream out;
  out << "--betas ";
  for (std::size_t i = 0; i < config.steps; ++i)
    out << (i ? "," : "") << config.betas[i].get_str();
  out << " --omegas ";
  for (std::size_t i = 0; i < config.steps; ++i)
    out << (i ? "," : "") << to_fraction_string(config.omegas[i]);
  out << " --sigma " << to_fraction_string(config.sigma) << " --dsf "
      << (config.dsf_kind == DsfKind::truncating ? "trunc" : "nearest") << " --steps "
      << config.steps;
  return out.str();
}

void check_div(const VerifyConfig& config, const BoundTable& table, const Rational& x,
               const Rational& y, Checker& c) {
  auto dsfs = make_dsfs(config);
  RecipApprox g = make_recip(RecipKind::reciprocal, config.sigma);
  RemainderTrace trace = run_div(x, y, config.betas, dsfs, g, config.steps);

  Rational sigma_y = g(y) * y - 1;
  c.expect(abs(sigma_y) <= config.sigma,
           "|sigma(Y)| <= Sigma violated: sigma(Y)=" + fmt(sigma_y));

  for (const auto& s : trace.states) {
    c.expect(x == s.h * y + s.r / Rational(s.b),
             "division invariant X = H*Y + R/B violated at i=" + std::to_string(s.i));
    Rational tail = s.r / y;
    c.expect(s.tp == (1 + sigma_y) * tail,
             "proxy decomposition Tp = (1+sigma)T violated at i=" + std::to_string(s.i));
    const BoundRow& row = table.rows[s.i];
    c.expect(abs(tail) <= row.t, "|T_i| <= t_i violated at i=" + std::to_string(s.i) +
                                     ": T=" + fmt(tail) + " t=" + fmt(row.t));
    c.expect(abs(s.tp) <= row.tp, "|Tp_i| <= tp_i violated at i=" + std::to_string(s.i) +
                                      ": Tp=" + fmt(s.tp) + " tp=" + fmt(row.tp));
    if (s.i >= 1)
      c.expect(abs(s.v) <= *row.digit_bound,
               "|v_i| <= digit bound violated at i=" + std::to_string(s.i) + ": v=" +
                   s.v.get_str() + " bound=" + row.digit_bound->get_str());
  }

  const auto& last = trace.states.back();
  c.expect(abs(x - last.h * y) * Rational(last.b) <= table.rows.back().t * y,
           "final error |X/Y - H_n| <= t_n/B_n violated");
}

void check_div_prescaled(const VerifyConfig& config, const BoundTable& table, const Rational& x,
                         const Rational& y, Checker& c) {
  auto dsfs = make_dsfs(config);
  RecipApprox g = make_recip(RecipKind::reciprocal, config.sigma);
  RemainderTrace plain = run_div(x, y, config.betas, dsfs, g, config.steps);
  RemainderTrace pre = run_div_prescaled(x, y, config.betas, dsfs, g, config.steps);

  Rational gy = g(y);
  Rational x_scaled = gy * x;
  Rational y_scaled = gy * y;
  for (std::size_t i = 0; i < pre.states.size(); ++i) {
    const auto& s = pre.states[i];
    c.expect(s.v == plain.states[i].v,
             "prescaled digit differs from plain division at i=" + std::to_string(i));
    c.expect(x_scaled == s.h * y_scaled + s.r / Rational(s.b),
             "prescaled invariant X' = H*Y' + R'/B violated at i=" + std::to_string(i));
    c.expect(s.r == gy * plain.states[i].r,
             "prescaled remainder R' = g(Y)*R violated at i=" + std::to_string(i));
    c.expect(s.tp == s.r, "prescaled proxy Tp = R' violated at i=" + std::to_string(i));
    const BoundRow& row = table.rows[i];
    c.expect(abs(s.tp) <= row.tp, "|Tp_i| <= tp_i violated at i=" + std::to_string(i));
  }
}

void check_sqrt(const VerifyConfig& config, const BoundTable& table, const Rational& x,
                Checker& c) {
  auto dsfs = make_dsfs(config);
  RecipApprox g = make_recip(RecipKind::rsqrt, config.sigma);
  RemainderTrace trace = run_sqrt(x, config.betas, dsfs, g, config.steps);

  Rational gx = g(x);
  // |sigma(X)| <= Sigma with sigma = g*sqrt(X) - 1, checked through squares.
  if (config.sigma < 1)
    c.expect(gx * gx * x >= (1 - config.sigma) * (1 - config.sigma),
             "|sigma(X)| <= Sigma violated (low side)");
  c.expect(gx * gx * x <= (1 + config.sigma) * (1 + config.sigma),
           "|sigma(X)| <= Sigma violated (high side)");

  SqrtBracket vb = sqrt_bracket(x, config.sqrt_bracket_bits);
  Iv v_hat{vb.lo, vb.hi};
  Iv sigma_hat = iv_point(gx) * v_hat - iv_point(Rational(1));

  for (const auto& s : trace.states) {
    c.expect(x == s.h * s.h + 2 * s.r / Rational(s.b),
             "sqrt invariant X = H^2 + 2R/B violated at i=" + std::to_string(s.i));
    // (V + H_i)/2 must stay positive; V > -H reduces to squares when H <= 0.
    bool head_ok = s.h >= 0 || x > s.h * s.h;
    c.expect(head_ok, "(V + H_i)/2 > 0 violated at i=" + std::to_string(s.i));

    const BoundRow& row = table.rows[s.i];
    // |T_i| <= t_i with T_i = B_i (V - H_i): two one-sided square comparisons.
    Rational step = row.t / Rational(s.b);
    c.expect(sqrt_le(x, s.h + step) && sqrt_ge(x, s.h - step),
             "|T_i| <= t_i violated at i=" + std::to_string(s.i));
    c.expect(abs(s.tp) <= row.tp, "|Tp_i| <= tp_i violated at i=" + std::to_string(s.i) +
                                      ": Tp=" + fmt(s.tp) + " tp=" + fmt(row.tp));
    if (s.i >= 1)
      c.expect(abs(s.v) <= *row.digit_bound,
               "|v_i| <= digit bound violated at i=" + std::to_string(s.i) + ": v=" +
                   s.v.get_str() + " bound=" + row.digit_bound->get_str());

    // Proxy decomposition Tp_i = mu_i (1+sigma)(1 - T_i/(2 V B_i)) T_i and
    // the |psi_i| <= Psi_i envelope, both via the sqrt bracket.
    Iv tail_hat = (v_hat - iv_point(s.h)) * iv_point(Rational(s.b));
    Rational mu = (s.i == 0) ? 2 : 1;
    Iv denom = iv_point(Rational(2 * s.b)) * v_hat;
    Iv ratio = tail_hat / denom;
    Iv one{Rational(1), Rational(1)};
    Iv decomposition = iv_point(mu) * (one + sigma_hat) * (one - ratio) * tail_hat;
    c.expect(iv_contains(decomposition, s.tp),
             "proxy decomposition for sqrt violated at i=" + std::to_string(s.i));

    Iv psi_hat = (s.i == 0) ? sigma_hat : sigma_hat - (one + sigma_hat) * ratio;
    Iv psi_envelope = (s.i == 0)
                          ? iv_point(config.sigma)
                          : iv_point(config.sigma) +
                                iv_point(1 + config.sigma) * iv_abs(tail_hat) / denom;
    c.expect(iv_abs(psi_hat).hi <= psi_envelope.lo,
             "|psi_i| <= Psi_i violated at i=" + std::to_string(s.i));
  }

  const auto& last = trace.states.back();
  Rational step = table.rows.back().t / Rational(last.b);
  c.expect(sqrt_le(x, last.h + step) && sqrt_ge(x, last.h - step),
           "final error |sqrt(X) - H_n| <= t_n/B_n violated");
}

void check_basic(const VerifyConfig& config, const Rational& v_target, Checker& c) {
  DsmConfig engine_config{RadixSequence(config.betas), make_dsfs(config)};
  DsmTrace trace = run(v_target, engine_config, config.steps, RunMode::basic);

  Rational theta = v_target;
  for (const auto& omega : config.omegas) theta = std::max(theta, omega);

  for (const auto& s : trace.states) {
    c.expect(v_target == s.h + s.t / Rational(s.b),
             "basic invariant V = H + T/B violated at i=" + std::to_string(s.i));
    if (s.i >= 1) {
      const Rational& omega = config.omegas[s.i - 1];
      c.expect(abs(s.t) <= omega, "|T_i| <= Omega_i violated at i=" + std::to_string(s.i));
      Integer bound =
          s.i == 1 ? digit_bound(Rational(config.betas[0]) * v_target, omega)
                   : digit_bound(Rational(config.betas[s.i - 1]) * config.omegas[s.i - 2], omega);
      c.expect(abs(s.v) <= bound, "digit bound violated at i=" + std::to_string(s.i));
      c.expect(abs(v_target - s.h) * pow2(static_cast<long>(s.i)) <= theta,
               "convergence |V - H_i| <= Theta/2^i violated at i=" + std::to_string(s.i));
    }
  }
}

}  // namespace

std::vector<DigitSelection> make_dsfs(const VerifyConfig& config) {
  std::vector<DigitSelection> dsfs;
  dsfs.reserve(config.steps);
  for (std::size_t i = 0; i < config.steps; ++i)
    dsfs.push_back(make_dsf(config.dsf_kind, config.omegas[i], config.tie));
  return dsfs;
}

BoundTable config_bound_table(const VerifyConfig& config) {
  if (config.op == VerifyOp::sqrt) {
    PsiSpec spec = PsiSpec::square_root(config.sigma, config.betas);
    return bound_table(spec, config.betas, config.omegas, config.steps);
  }
  PsiSpec spec = PsiSpec::division(config.sigma);
  return bound_table(spec, config.betas, config.omegas, config.steps);
}

std::vector<Violation> verify_one(const VerifyConfig& config, const BoundTable& table,
                                  const Rational& x, const Rational& y) {
  Checker c;
  std::ostringstream repro;
  switch (config.op) {
    case VerifyOp::basic:
      repro << "run --op basic --x " << to_fraction_string(x) << ' ' << flags_for(config);
      c.reproducer = repro.str();
      check_basic(config, x, c);
      break;
    case VerifyOp::div:
      repro << "run --op div --x " << to_fraction_string(x) << " --y " << to_fraction_string(y)
            << ' ' << flags_for(config);
      c.reproducer = repro.str();
      check_div(config, table, x, y, c);
      break;
    case VerifyOp::div_prescaled:
      repro << "run --op div-prescaled --x " << to_fraction_string(x) << " --y "
            << to_fraction_string(y) << ' ' << flags_for(config);
      c.reproducer = repro.str();
      check_div_prescaled(config, table, x, y, c);
      break;
    case VerifyOp::sqrt:
      repro << "run --op sqrt --x " << to_fraction_string(x) << ' ' << flags_for(config);
      c.reproducer = repro.str();
      check_sqrt(config, table, x, c);
      break;
  }
  return std::move(c.out);
}

namespace {

Rational grid_value(std::uint64_t bits, const Integer& lo, const Integer& span,
                    unsigned grid_bits) {
  Integer offset;
  mpz_fdiv_r(offset.get_mpz_t(), Integer(bits).get_mpz_t(), span.get_mpz_t());
  return make_rational(lo + offset, Integer(1) << grid_bits);
}

}  // namespace

Rational random_div_x(std::uint64_t bits, unsigned grid_bits) {
  Integer half = Integer(1) << (grid_bits - 1);
  return grid_value(bits, half, half, grid_bits);  // [1/2, 1)
}

Rational random_div_y(std::uint64_t bits, unsigned grid_bits) {
  Integer one = Integer(1) << grid_bits;
  return grid_value(bits, one, one, grid_bits);  // [1, 2)
}

Rational random_sqrt_x(std::uint64_t bits, unsigned grid_bits) {
  Integer quarter = Integer(1) << (grid_bits - 2);
  return grid_value(bits, quarter, 3 * quarter, grid_bits);  // [1/4, 1)
}

Rational random_unit(std::uint64_t bits, unsigned grid_bits) {
  return grid_value(bits, 0, Integer(1) << grid_bits, grid_bits);  // [0, 1)
}

VerifySummary verify_random(const VerifyConfig& config, std::size_t samples, std::uint64_t seed) {
  constexpr std::size_t kMaxStoredViolations = 8;
  BoundTable table = config_bound_table(config);
  std::mt19937_64 rng(seed);

  VerifySummary summary;
  summary.samples = samples;
  for (std::size_t n = 0; n < samples; ++n) {
    Rational x, y;
    switch (config.op) {
      case VerifyOp::basic:
        x = random_unit(rng(), config.input_grid_bits);
        break;
      case VerifyOp::div:
      case VerifyOp::div_prescaled:
        x = random_div_x(rng(), config.input_grid_bits);
        y = random_div_y(rng(), config.input_grid_bits);
        break;
      case VerifyOp::sqrt:
        x = random_sqrt_x(rng(), config.input_grid_bits);
        break;
    }
    auto violations = verify_one(config, table, x, y);
    if (violations.empty()) {
      ++summary.passed;
    } else {
      for (auto& v : violations)
        if (summary.violations.size() < kMaxStoredViolations)
          summary.violations.push_back(std::move(v));
    }
  }
  return summary;
}

}  // namespace dsm
