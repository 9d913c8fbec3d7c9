#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "dsm/engine.hpp"

using namespace dsm;

namespace {

std::mt19937_64 rng(911);

Rational random_unit_rational(unsigned grid_bits = 16) {
  Integer den = Integer(1) << grid_bits;
  Integer num;
  mpz_fdiv_r(num.get_mpz_t(), Integer(rng()).get_mpz_t(), den.get_mpz_t());
  return make_rational(num, den);
}

std::vector<Integer> random_betas(std::size_t n) {
  std::vector<Integer> betas;
  for (std::size_t i = 0; i < n; ++i) betas.push_back(2 + static_cast<long>(rng() % 127));
  return betas;
}

}  // namespace

TEST_CASE("radix sequence bookkeeping") {
  RadixSequence seq({128, 32, 128});
  CHECK(seq.base(0) == 1);
  CHECK(seq.base(1) == 128);
  CHECK(seq.base(2) == 4096);
  CHECK(seq.base(3) == 524288);
  CHECK(seq.beta(2) == 32);
  CHECK(seq.all_power_of_two());
  CHECK(seq.radix_bits(1) == 7);
  CHECK(seq.radix_bits(2) == 5);
  CHECK_THROWS_AS(RadixSequence({128, 1}), std::invalid_argument);

  for (int round = 0; round < 50; ++round) {
    RadixSequence s(random_betas(6));
    for (std::size_t i = 0; i < 6; ++i) {
      CHECK(s.base(i + 1) == s.base(i) * s.beta(i + 1));
      CHECK(s.base(i) >= Integer(1) << i);
    }
  }
}

TEST_CASE("make_dsf") {
  DigitSelection trunc58 = make_dsf(DsfKind::truncating, make_rational(5, 8));
  CHECK(trunc58.frac_bits == 3);
  CHECK(trunc58.omega == make_rational(5, 8));

  DigitSelection nearest = make_dsf(DsfKind::exact_nearest, make_rational(1, 2));
  CHECK(nearest.omega == make_rational(1, 2));

  DigitSelection trunc916 = make_dsf(DsfKind::truncating, make_rational(9, 16));
  CHECK(trunc916.frac_bits == 4);
  CHECK(trunc916.omega == make_rational(9, 16));

  CHECK_THROWS_AS(make_dsf(DsfKind::exact_nearest, make_rational(1, 4)), std::invalid_argument);
  CHECK_THROWS_AS(make_dsf(DsfKind::truncating, make_rational(1, 2)), std::invalid_argument);
}

TEST_CASE("measured rounding error never exceeds the advertised omega") {
  for (auto kind : {DsfKind::exact_nearest, DsfKind::truncating}) {
    Rational budget = kind == DsfKind::exact_nearest ? make_rational(1, 2) : make_rational(5, 8);
    DigitSelection dsf = make_dsf(kind, budget);
    for (int n = 0; n < 400; ++n) {
      Rational z = make_rational(static_cast<long>(rng() % 200001) - 100000,
                                 static_cast<long>(rng() % 512) + 1);
      CHECK(abs(z - Rational(dsf.select(z))) <= dsf.omega);
    }
    // Grid points and midpoint neighborhoods.
    for (long k = -8; k <= 8; ++k) {
      for (long off : {-1L, 0L, 1L}) {
        Rational z = Rational(k) + make_rational(1, 2) + make_rational(off, 1 << 10);
        CHECK(abs(z - Rational(dsf.select(z))) <= dsf.omega);
        Rational g = Rational(k) + make_rational(off, 8);
        CHECK(abs(g - Rational(dsf.select(g))) <= dsf.omega);
      }
    }
  }
}

TEST_CASE("digit_bound") {
  // beta * tp_1 for the first division block: 128 * (513/512) * (7/8).
  Rational z = Rational(128) * make_rational(513, 512) * make_rational(7, 8);
  CHECK(digit_bound(z, make_rational(5, 8)) == 112);
  CHECK(digit_bound(Rational(0), make_rational(1, 2)) == 0);
  CHECK_THROWS_AS(digit_bound(Rational(-1), make_rational(1, 2)), std::invalid_argument);
  CHECK_THROWS_AS(digit_bound(Rational(1), make_rational(1, 4)), std::invalid_argument);
}

TEST_CASE("step_basic") {
  DigitSelection dsf = make_dsf(DsfKind::exact_nearest, make_rational(1, 2));

  DsmState s0 = initial_state(make_rational(1, 2));
  DsmState s1 = step_basic(s0, 128, dsf, make_rational(1, 2));
  CHECK(s1.v == 64);
  CHECK(s1.h == make_rational(1, 2));
  CHECK(s1.t == 0);

  DsmState t0 = initial_state(make_rational(1, 3));
  DsmState t1 = step_basic(t0, 2, dsf, make_rational(1, 3));
  CHECK(t1.v == 1);
  CHECK(t1.t == make_rational(-1, 3));

  DsmState z0 = initial_state(Rational(0));
  DsmState z1 = step_basic(z0, 16, dsf, Rational(0));
  CHECK(z1.v == 0);
  CHECK(z1.t == 0);
}

TEST_CASE("step_proxy") {
  DigitSelection dsf = make_dsf(DsfKind::exact_nearest, make_rational(1, 2));

  // T^p_0 = (1 + 2^-9)/2 makes 128 T^p_0 = 64.125, which still selects 64.
  TailProxy bump = [](std::size_t, const Rational&, const Rational& t) -> Rational {
    return (1 + pow2(-9)) * t;
  };
  DsmState s0 = initial_state(make_rational(1, 2), bump);
  CHECK(s0.tp == (1 + pow2(-9)) / 2);
  DsmState s1 = step_proxy(s0, 128, dsf, bump, make_rational(1, 2));
  CHECK(s1.v == 64);

  DsmState z0 = initial_state(Rational(0), bump);
  CHECK(z0.tp == 0);
  CHECK(step_proxy(z0, 128, dsf, bump, Rational(0)).v == 0);

  // A zero-psi proxy reproduces the basic stepper on random inputs.
  for (int n = 0; n < 200; ++n) {
    Rational v = random_unit_rational();
    Integer beta = 2 + static_cast<long>(rng() % 127);
    DsmState a = step_basic(initial_state(v), beta, dsf, v);
    DsmState b = step_proxy(initial_state(v, identity_proxy()), beta, dsf, identity_proxy(), v);
    CHECK(a.v == b.v);
    CHECK(a.t == b.t);
    CHECK(a.h == b.h);
  }
}

TEST_CASE("run") {
  DsmConfig config{RadixSequence({128, 128, 128, 128}),
                   {make_dsf(DsfKind::exact_nearest, make_rational(1, 2))}};

  DsmTrace zeros = run(Rational(0), config, 4, RunMode::basic);
  for (const auto& s : zeros.states) {
    CHECK(s.h == 0);
    CHECK(s.t == 0);
    CHECK(s.v == 0);
  }

  DsmTrace half = run(make_rational(1, 2), config, 2, RunMode::basic);
  CHECK(half.states[2].h == make_rational(1, 2));

  DsmConfig tiny{RadixSequence({2, 2, 2}),
                 {make_dsf(DsfKind::exact_nearest, make_rational(1, 2))}};
  DsmTrace third = run(make_rational(1, 3), tiny, 3, RunMode::basic);
  CHECK(abs(make_rational(1, 3) - third.states[3].h) <= make_rational(1, 16));

  CHECK_THROWS_AS(run(make_rational(1, 3), tiny, 5, RunMode::basic), std::invalid_argument);
  CHECK_THROWS_AS(run(Rational(-1), tiny, 2, RunMode::proxy), std::invalid_argument);
}

TEST_CASE("basic-mode invariants over random runs") {
  for (int round = 0; round < 60; ++round) {
    std::size_t steps = 4;
    auto betas = random_betas(steps);
    std::vector<DigitSelection> dsfs;
    std::vector<Rational> omegas;
    for (std::size_t i = 0; i < steps; ++i) {
      bool trunc = rng() % 2;
      Rational budget = trunc ? make_rational(1, 2) + pow2(-(1 + static_cast<long>(rng() % 6)))
                              : make_rational(1, 2);
      dsfs.push_back(make_dsf(trunc ? DsfKind::truncating : DsfKind::exact_nearest, budget));
      omegas.push_back(dsfs.back().omega);
    }
    Rational v = random_unit_rational();
    DsmConfig config{RadixSequence(betas), dsfs};
    DsmTrace trace = run(v, config, steps, RunMode::basic);

    Rational theta = v;
    for (const auto& omega : omegas) theta = theta >= omega ? theta : omega;

    for (const auto& s : trace.states) {
      // Exact loop invariant, no tolerance.
      CHECK(v == s.h + s.t / Rational(s.b));
      if (s.i >= 1) {
        CHECK(abs(s.t) <= omegas[s.i - 1]);
        Integer bound = s.i == 1
                            ? digit_bound(Rational(betas[0]) * v, omegas[0])
                            : digit_bound(Rational(betas[s.i - 1]) * omegas[s.i - 2],
                                          omegas[s.i - 1]);
        CHECK(abs(s.v) <= bound);
        // Theorem-2 style convergence: |V - H_i| <= Theta / 2^i.
        CHECK(abs(v - s.h) * pow2(static_cast<long>(s.i)) <= theta);
      }
    }
  }
}

TEST_CASE("trace csv round-trips") {
  DsmConfig config{RadixSequence({128, 32, 128}),
                   {make_dsf(DsfKind::truncating, make_rational(5, 8))}};
  for (int round = 0; round < 20; ++round) {
    Rational v = random_unit_rational();
    DsmTrace trace = run(v, config, 3, RunMode::basic);
    auto rows = parse_trace_csv(trace_csv(trace));
    REQUIRE(rows.size() == trace.states.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(rows[i].i == trace.states[i].i);
      CHECK(rows[i].b == Rational(trace.states[i].b));
      CHECK(rows[i].h == trace.states[i].h);
      CHECK(rows[i].v == trace.states[i].v);
      CHECK(rows[i].t == trace.states[i].t);
      CHECK(rows[i].tp == trace.states[i].tp);
    }
  }
}
