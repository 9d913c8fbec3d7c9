#include "dsm/bounds.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

#include "dsm/engine.hpp"

namespace dsm {

namespace {

Rational pow_rational(const Rational& u, long n) {
  if (n == 0) return Rational(1);
  unsigned long mag = static_cast<unsigned long>(n > 0 ? n : -n);
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), u.get_num().get_mpz_t(), mag);
  mpz_pow_ui(den.get_mpz_t(), u.get_den().get_mpz_t(), mag);
  return n > 0 ? make_rational(num, den) : make_rational(den, num);
}

}  // namespace

void Posynomial::add_term(const Rational& c, long exponent) {
  if (c < 0) throw std::invalid_argument("posynomial: negative coefficient");
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(exponent, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Posynomial Posynomial::constant(const Rational& c) { return term(c, 0); }

Posynomial Posynomial::identity() { return term(1, 1); }

Posynomial Posynomial::term(const Rational& c, long exponent) {
  Posynomial p;
  p.add_term(c, exponent);
  return p;
}

Rational Posynomial::eval(const Rational& u) const {
  if (u <= 0) throw std::invalid_argument("posynomial: evaluation point must be > 0");
  Rational sum = 0;
  for (const auto& [n, c] : terms_) sum += c * pow_rational(u, n);
  return sum;
}

Posynomial Posynomial::scaled(const Rational& c) const {
  if (c < 0) throw std::invalid_argument("posynomial: negative scale");
  Posynomial out;
  if (c == 0) return out;
  for (const auto& [n, coeff] : terms_) out.terms_.emplace(n, c * coeff);
  return out;
}

Posynomial Posynomial::div_by_nu() const {
  Posynomial out;
  for (const auto& [n, coeff] : terms_) out.terms_.emplace(n - 1, coeff);
  return out;
}

Posynomial operator+(const Posynomial& p, const Posynomial& q) {
  Posynomial out = p;
  for (const auto& [n, c] : q.terms_) out.add_term(c, n);
  return out;
}

Posynomial operator*(const Posynomial& p, const Posynomial& q) {
  Posynomial out;
  for (const auto& [np, cp] : p.terms_)
    for (const auto& [nq, cq] : q.terms_) out.add_term(cp * cq, np + nq);
  return out;
}

Rational endpoint_max(const Posynomial& p, const Rational& a, const Rational& b) {
  if (a <= 0) throw std::invalid_argument("endpoint_max: interval must lie in the positive reals");
  if (a > b) throw std::invalid_argument("endpoint_max: empty interval");
  Rational pa = p.eval(a);
  Rational pb = p.eval(b);
  return pa >= pb ? pa : pb;
}

PsiSpec::PsiSpec(ProxyKind kind, Rational sigma, std::vector<Integer> betas)
    : kind_(kind), sigma_(std::move(sigma)), betas_(std::move(betas)) {
  if (sigma_ < 0) throw std::invalid_argument("psi spec: sigma must be >= 0");
  for (const auto& b : betas_)
    if (b < 2) throw std::invalid_argument("psi spec: every beta must be >= 2");
}

PsiSpec PsiSpec::division(Rational sigma) {
  return PsiSpec(ProxyKind::division, std::move(sigma), {});
}

PsiSpec PsiSpec::square_root(Rational sigma, std::vector<Integer> betas) {
  return PsiSpec(ProxyKind::square_root, std::move(sigma), std::move(betas));
}

Integer PsiSpec::base(std::size_t i) const {
  if (i > betas_.size()) throw std::out_of_range("psi spec: base index beyond beta sequence");
  Integer b = 1;
  for (std::size_t j = 0; j < i; ++j) b *= betas_[j];
  return b;
}

Rational PsiSpec::psi_bound(std::size_t i, const Rational& u, const Rational& t_abs) const {
  if (kind_ == ProxyKind::division || i == 0) return sigma_;
  return sigma_ + (1 + sigma_) * t_abs / (2 * u * Rational(base(i)));
}

Posynomial PsiSpec::phi(std::size_t i, const Posynomial& p) const {
  if (kind_ == ProxyKind::division || i == 0) return Posynomial::constant(sigma_);
  Rational coeff = (1 + sigma_) / (2 * Rational(base(i)));
  return Posynomial::constant(sigma_) + p.div_by_nu().scaled(coeff);
}

std::vector<TauPair> tau_sequence(const PsiSpec& spec, const std::vector<Integer>& betas,
                                  const std::vector<Rational>& omegas, std::size_t n) {
  if (betas.size() < n) throw std::invalid_argument("tau sequence: beta sequence shorter than n");
  if (omegas.size() < n) throw std::invalid_argument("tau sequence: omega sequence shorter than n");
  for (std::size_t i = 0; i < n; ++i) {
    if (betas[i] < 2) throw std::invalid_argument("tau sequence: every beta must be >= 2");
    if (omegas[i] < Rational(1, 2))
      throw std::invalid_argument("tau sequence: every omega must be >= 1/2");
  }

  std::vector<TauPair> out;
  out.reserve(n + 1);
  Posynomial tau = Posynomial::identity();
  for (std::size_t i = 0; i <= n; ++i) {
    Posynomial phi_i = spec.phi(i, tau);
    Posynomial taup = (Posynomial::constant(1) + phi_i) * tau;
    out.push_back({tau, taup});
    if (i < n) {
      tau = (phi_i * tau).scaled(Rational(betas[i])) + Posynomial::constant(omegas[i]);
    }
  }
  return out;
}

BoundTable bound_table(const PsiSpec& spec, const std::vector<Integer>& betas,
                       const std::vector<Rational>& omegas, std::size_t n) {
  if (spec.kind() == ProxyKind::division)
    return bound_table(spec, betas, omegas, n, Rational(1, 4), Rational(1));
  return bound_table(spec, betas, omegas, n, Rational(1, 2), Rational(1));
}

BoundTable bound_table(const PsiSpec& spec, const std::vector<Integer>& betas,
                       const std::vector<Rational>& omegas, std::size_t n, const Rational& a,
                       const Rational& b) {
  if (a <= 0 || a > b) throw std::invalid_argument("bound table: interval must satisfy 0 < a <= b");

  BoundTable table;
  table.kind = spec.kind();
  table.sigma = spec.sigma();
  table.betas.assign(betas.begin(), betas.begin() + n);
  table.omegas.assign(omegas.begin(), omegas.begin() + n);
  table.a = a;
  table.b = b;
  table.taus = tau_sequence(spec, betas, omegas, n);

  Integer base = 1;
  for (std::size_t i = 0; i <= n; ++i) {
    BoundRow row;
    row.i = i;
    if (i >= 1) {
      row.beta = betas[i - 1];
      base *= betas[i - 1];
    }
    row.base = base;
    const Posynomial& tau = table.taus[i].tau;
    const Posynomial& taup = table.taus[i].tau_p;
    Posynomial phi_i = spec.phi(i, tau);
    row.tau_a = tau.eval(a);
    row.phi_a = phi_i.eval(a);
    row.taup_a = taup.eval(a);
    row.tau_b = tau.eval(b);
    row.phi_b = phi_i.eval(b);
    row.taup_b = taup.eval(b);
    row.t = endpoint_max(tau, a, b);
    row.tp = endpoint_max(taup, a, b);
    if (i >= 1) {
      const Rational& prev_tp = table.rows[i - 1].tp;
      row.digit_bound = digit_bound(Rational(row.beta) * prev_tp, omegas[i - 1]);
      // v_1 carries no accumulation restriction; later digits must fit the
      // overlap width of the on-the-fly form in use.
      row.otf_narrow = (i == 1) || *row.digit_bound < row.beta;
      row.otf_wide = (i == 1) || *row.digit_bound < 2 * row.beta - 1;
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::vector<Rational> head_error_bounds(const BoundTable& table) {
  std::vector<Rational> out;
  out.reserve(table.rows.size());
  for (const auto& row : table.rows) out.push_back(row.t);
  return out;
}

namespace {

std::string log2_field(const Integer& beta) {
  if (beta == 0 || !is_power_of_two(beta)) return "";
  return std::to_string(log2_exact(beta));
}

}  // namespace

std::string bound_table_csv(const BoundTable& table) {
  std::ostringstream out;
  out << "i,log2_beta,beta,B,t,t_p,digit_bound,tau_a,phi_a,tau_p_a,tau_b,phi_b,tau_p_b,"
         "otf_narrow,otf_wide\n";
  for (const auto& row : table.rows) {
    out << row.i << ',' << log2_field(row.beta) << ',' << row.beta << ',' << row.base << ','
        << to_fraction_string(row.t) << ',' << to_fraction_string(row.tp) << ',';
    if (row.digit_bound) out << *row.digit_bound;
    out << ',' << to_fraction_string(row.tau_a) << ',' << to_fraction_string(row.phi_a) << ','
        << to_fraction_string(row.taup_a) << ',' << to_fraction_string(row.tau_b) << ','
        << to_fraction_string(row.phi_b) << ',' << to_fraction_string(row.taup_b) << ','
        << (row.i >= 1 && row.otf_narrow ? "1" : row.i >= 1 ? "0" : "") << ','
        << (row.i >= 1 && row.otf_wide ? "1" : row.i >= 1 ? "0" : "") << '\n';
  }
  return out.str();
}

std::string bound_table_markdown(const BoundTable& table, unsigned digits, DecimalRound mode) {
  auto fmt = [&](const Rational& z) { return decimal_round(z, digits, mode); };
  std::ostringstream out;
  out << "| i | log2(beta) | beta | B | t | t_p | digit bound | tau(a) | Phi(a) | tau_p(a) |"
         " tau(b) | Phi(b) | tau_p(b) | otf narrow | otf wide |\n";
  out << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& row : table.rows) {
    out << "| " << row.i << " | " << log2_field(row.beta) << " | ";
    if (row.i >= 1) out << row.beta;
    out << " | " << row.base << " | " << fmt(row.t) << " | " << fmt(row.tp) << " | ";
    if (row.digit_bound) out << *row.digit_bound;
    out << " | " << fmt(row.tau_a) << " | " << fmt(row.phi_a) << " | " << fmt(row.taup_a)
        << " | " << fmt(row.tau_b) << " | " << fmt(row.phi_b) << " | " << fmt(row.taup_b)
        << " | " << (row.i >= 1 ? (row.otf_narrow ? "yes" : "no") : "") << " | "
        << (row.i >= 1 ? (row.otf_wide ? "yes" : "no") : "") << " |\n";
  }
  return out.str();
}

}  // namespace dsm
