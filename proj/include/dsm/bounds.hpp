#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dsm/numeric.hpp"

namespace dsm {

// Finite sum of c * V^n with c >= 0 rational and n integer, kept canonical
// (terms merged by exponent, zero coefficients dropped). Convex on the
// positive reals, so interval maxima occur at the endpoints.
class Posynomial {
 public:
  Posynomial() = default;  // the zero function
  static Posynomial constant(const Rational& c);
  static Posynomial identity();  // nu: u -> u
  static Posynomial term(const Rational& c, long exponent);

  const std::map<long, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  Rational eval(const Rational& u) const;  // u > 0

  Posynomial scaled(const Rational& c) const;  // c >= 0
  Posynomial div_by_nu() const;                // p / nu

  friend Posynomial operator+(const Posynomial& p, const Posynomial& q);
  friend Posynomial operator*(const Posynomial& p, const Posynomial& q);
  bool operator==(const Posynomial& other) const = default;

 private:
  void add_term(const Rational& c, long exponent);
  std::map<long, Rational> terms_;
};

// max(p(a), p(b)), which bounds p on all of [a, b] by convexity. 0 < a <= b.
Rational endpoint_max(const Posynomial& p, const Rational& a, const Rational& b);

enum class ProxyKind { division, square_root };

// The per-step envelope Psi_i on the proxy's relative error, and its lift
// Phi_i from posynomials to posynomials:
//   division:    Psi_i(u, t) = Sigma
//   square root: Psi_0 = Sigma, Psi_i(u, t) = Sigma + (1+Sigma) t / (2 u B_i)
class PsiSpec {
 public:
  static PsiSpec division(Rational sigma);
  static PsiSpec square_root(Rational sigma, std::vector<Integer> betas);

  ProxyKind kind() const { return kind_; }
  const Rational& sigma() const { return sigma_; }
  const std::vector<Integer>& betas() const { return betas_; }
  Integer base(std::size_t i) const;  // B_i

  Rational psi_bound(std::size_t i, const Rational& u, const Rational& t_abs) const;
  Posynomial phi(std::size_t i, const Posynomial& p) const;

 private:
  PsiSpec(ProxyKind kind, Rational sigma, std::vector<Integer> betas);
  ProxyKind kind_;
  Rational sigma_;
  std::vector<Integer> betas_;  // square root only
};

struct TauPair {
  Posynomial tau;
  Posynomial tau_p;
};

// tau_0 = nu; tau_{i+1} = beta_{i+1} Phi_i(tau_i) tau_i + Omega_{i+1};
// tau^p_i = (1 + Phi_i(tau_i)) tau_i. Returns pairs for i = 0..n.
// omegas holds Omega_1..Omega_n. Requires beta_i >= 2, Omega_i >= 1/2,
// Sigma >= 0.
std::vector<TauPair> tau_sequence(const PsiSpec& spec, const std::vector<Integer>& betas,
                                  const std::vector<Rational>& omegas, std::size_t n);

struct BoundRow {
  std::size_t i = 0;
  Integer beta = 0;  // 0 on row 0
  Integer base = 1;  // B_i
  Rational tau_a, phi_a, taup_a;
  Rational tau_b, phi_b, taup_b;
  Rational t;   // max(tau_i(a), tau_i(b))
  Rational tp;  // max(tau^p_i(a), tau^p_i(b))
  std::optional<Integer> digit_bound;  // bound on |v_i|, rows i >= 1
  bool otf_narrow = true;  // |v_i| < beta_i guaranteed (always true on row 1)
  bool otf_wide = true;    // |v_i| < 2 beta_i - 1 guaranteed
};

struct BoundTable {
  ProxyKind kind = ProxyKind::division;
  Rational sigma;
  std::vector<Integer> betas;
  std::vector<Rational> omegas;
  Rational a, b;
  std::vector<BoundRow> rows;              // i = 0..n
  std::vector<TauPair> taus;               // matching tau/tau^p functions
};

// Default intervals: [1/4, 1] for division, [1/2, 1] for square root.
BoundTable bound_table(const PsiSpec& spec, const std::vector<Integer>& betas,
                       const std::vector<Rational>& omegas, std::size_t n);
BoundTable bound_table(const PsiSpec& spec, const std::vector<Integer>& betas,
                       const std::vector<Rational>& omegas, std::size_t n, const Rational& a,
                       const Rational& b);

// Per-i bound t_i on |V - H_i| * B_i (the numerators of the head error bounds).
std::vector<Rational> head_error_bounds(const BoundTable& table);

// CSV columns: i,log2_beta,beta,B,t,t_p,digit_bound,tau_a,phi_a,tau_p_a,
// tau_b,phi_b,tau_p_b,otf_narrow,otf_wide. Rationals emitted as "p/q";
// log2_beta empty when beta is not a power of two.
std::string bound_table_csv(const BoundTable& table);

// Markdown with the same columns, rationals rendered with decimal_round.
std::string bound_table_markdown(const BoundTable& table, unsigned digits = 4,
                                 DecimalRound mode = DecimalRound::nearest);

}  // namespace dsm
