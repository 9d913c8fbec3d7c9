#include "dsm/slack.hpp"

#include <random>
#include <sstream>
#include <stdexcept>

#include "dsm/divsqrt.hpp"

namespace dsm {

namespace {

struct Domain {
  Integer lo;    // inclusive, in grid units
  Integer hi;    // exclusive
};

struct Searcher {
  const SlackConfig& config;
  std::size_t target_i;
  Integer vmax;
  std::vector<DigitSelection> dsfs;
  RecipApprox g;
  Integer grid_den;
  std::uint64_t evals = 0;
  std::uint64_t budget;

  Integer best_v = -1;
  std::vector<Integer> best_point;

  bool two_dim() const { return config.op == ProxyKind::division; }

  Integer evaluate(const std::vector<Integer>& point) {
    ++evals;
    Rational x = make_rational(point[0], grid_den);
    Integer v;
    if (config.op == ProxyKind::division) {
      Rational y = make_rational(point[1], grid_den);
      v = abs(run_div(x, y, config.betas, dsfs, g, target_i).states.back().v);
    } else {
      v = abs(run_sqrt(x, config.betas, dsfs, g, target_i).states.back().v);
    }
    if (v > vmax)
      throw std::logic_error("slack: evaluation exceeded the certified digit bound");
    return v;
  }

  void consider(const std::vector<Integer>& point) {
    Integer v = evaluate(point);
    // Max ratio wins; ties break toward the lexicographically smallest input.
    if (v > best_v || (v == best_v && point < best_point)) {
      best_v = v;
      best_point = point;
    }
  }

  bool in_domain(const std::vector<Integer>& point, const std::vector<Domain>& domains) const {
    for (std::size_t d = 0; d < point.size(); ++d)
      if (point[d] < domains[d].lo || point[d] >= domains[d].hi) return false;
    return true;
  }

  void hill_climb(std::vector<Integer> point, const std::vector<Domain>& domains) {
    if (!in_domain(point, domains)) return;
    if (evals >= budget) return;
    Integer current = evaluate(point);
    if (current > best_v || (current == best_v && point < best_point)) {
      best_v = current;
      best_point = point;
    }
    Integer step = (domains[0].hi - domains[0].lo) / 4;
    if (step < 1) step = 1;
    while (evals < budget) {
      bool improved = false;
      for (std::size_t d = 0; d < point.size() && evals < budget; ++d) {
        for (int dir : {+1, -1}) {
          if (evals >= budget) break;
          std::vector<Integer> candidate = point;
          candidate[d] += dir * step;
          if (!in_domain(candidate, domains)) continue;
          Integer v = evaluate(candidate);
          if (v > best_v || (v == best_v && candidate < best_point)) {
            best_v = v;
            best_point = candidate;
          }
          if (v > current) {
            current = v;
            point = candidate;
            improved = true;
            break;
          }
        }
      }
      if (!improved) {
        if (step == 1) break;
        step /= 2;
        if (step < 1) step = 1;
      }
    }
  }
};

}  // namespace

SlackReport slack_search(const SlackConfig& config, std::size_t target_i, std::uint64_t budget,
                         std::uint64_t seed) {
  if (budget == 0) throw std::invalid_argument("slack: evaluation budget must be positive");
  if (target_i < 1 || target_i > config.betas.size())
    throw std::invalid_argument("slack: target digit index out of range");
  if (config.omegas.size() < target_i)
    throw std::invalid_argument("slack: omega sequence shorter than target index");

  BoundTable table;
  if (config.op == ProxyKind::division) {
    table = bound_table(PsiSpec::division(config.sigma), config.betas, config.omegas,
                        config.betas.size());
  } else {
    table = bound_table(PsiSpec::square_root(config.sigma, config.betas), config.betas,
                        config.omegas, config.betas.size());
  }

  Searcher search{config,
                  target_i,
                  *table.rows[target_i].digit_bound,
                  {},
                  make_recip(config.op == ProxyKind::division ? RecipKind::reciprocal
                                                              : RecipKind::rsqrt,
                             config.sigma),
                  Integer(1) << config.grid_bits,
                  0,
                  budget,
                  Integer(-1),
                  {}};
  for (std::size_t i = 0; i < target_i; ++i)
    search.dsfs.push_back(make_dsf(config.dsf_kind, config.omegas[i], config.tie));

  Integer unit = search.grid_den;
  std::vector<Domain> domains;
  if (config.op == ProxyKind::division) {
    domains.push_back({unit / 2, unit});      // X in [1/2, 1)
    domains.push_back({unit, 2 * unit});      // Y in [1, 2)
  } else {
    domains.push_back({unit / 4, unit});      // X in [1/4, 1)
  }

  // Domain corners and centers first: digit extremes often sit at the edges.
  auto edge_values = [](const Domain& d) {
    return std::vector<Integer>{d.lo, Integer(d.hi - 1), Integer((d.lo + d.hi) / 2)};
  };
  std::vector<std::vector<Integer>> seeds;
  for (const Integer& x : edge_values(domains[0])) {
    if (domains.size() == 2) {
      for (const Integer& y : edge_values(domains[1])) seeds.push_back({x, y});
    } else {
      seeds.push_back({x});
    }
  }
  for (const auto& s : seeds) {
    if (search.evals >= budget) break;
    search.consider(s);
  }

  std::mt19937_64 rng(seed);
  auto random_point = [&] {
    std::vector<Integer> p;
    for (const auto& d : domains) {
      Integer span = d.hi - d.lo;
      Integer offset;
      mpz_fdiv_r(offset.get_mpz_t(), Integer(rng()).get_mpz_t(), span.get_mpz_t());
      p.push_back(d.lo + offset);
    }
    return p;
  };
  while (search.evals < budget) search.hill_climb(random_point(), domains);

  SlackReport report;
  report.target_i = target_i;
  report.best_x = make_rational(search.best_point[0], search.grid_den);
  if (config.op == ProxyKind::division)
    report.best_y = make_rational(search.best_point[1], search.grid_den);
  report.achieved = search.best_v;
  report.vmax = search.vmax;
  report.ratio = make_rational(search.best_v, search.vmax);
  report.evaluations = search.evals;
  report.seed = seed;
  return report;
}

std::string slack_report_csv_header() {
  return "target_i,best_x,best_y,achieved,vmax,ratio,evaluations,seed\n";
}

std::string slack_report_csv(const SlackReport& report) {
  std::ostringstream out;
  out << report.target_i << ',' << to_fraction_string(report.best_x) << ','
      << to_fraction_string(report.best_y) << ',' << report.achieved << ',' << report.vmax << ','
      << to_fraction_string(report.ratio) << ',' << report.evaluations << ',' << report.seed
      << '\n';
  return out.str();
}

std::string slack_report_summary(const SlackReport& report) {
  std::ostringstream out;
  out << "digit " << report.target_i << ": |v| = " << report.achieved << " of bound "
      << report.vmax << " (" << decimal_round(100 * report.ratio, 1, DecimalRound::nearest)
      << "% after " << report.evaluations << " evaluations, seed " << report.seed << ")";
  return out.str();
}

}  // namespace dsm
