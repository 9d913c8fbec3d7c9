// Command-line front end: bound tables, algorithm runs, verification sweeps,
// on-the-fly accumulation checks, and near-worst-case input search.
//
// Exit codes: 0 success, 1 verification failure or domain violation,
// 2 usage error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dsm/bounds.hpp"
#include "dsm/divsqrt.hpp"
#include "dsm/engine.hpp"
#include "dsm/otf.hpp"
#include "dsm/slack.hpp"
#include "dsm/verify.hpp"

namespace {

using namespace dsm;

Rational parse_field(const std::string& text, const std::string& field) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("--" + field + ": " + e.what());
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) out.push_back(item);
  return out;
}

std::vector<Integer> parse_beta_list(const std::string& text) {
  std::vector<Integer> betas;
  for (const auto& item : split_list(text)) {
    Rational b = parse_field(item, "betas");
    if (b.get_den() != 1 || b < 2)
      throw std::invalid_argument("--betas: every radix must be an integer >= 2");
    betas.push_back(b.get_num());
  }
  if (betas.empty()) throw std::invalid_argument("--betas: empty list");
  return betas;
}

struct CommonSpec {
  std::string op;
  std::string betas_text;
  std::string omega_text;
  std::string omegas_text;
  std::string sigma_text = "0";
  std::string dsf_text = "trunc";
  std::string tie_text = "even";
  std::size_t steps = 0;

  std::vector<Integer> betas;
  std::vector<Rational> omegas;  // Omega_1..Omega_steps
  Rational sigma;
  DsfKind dsf_kind = DsfKind::truncating;
  TieRule tie = TieRule::half_even;

  void add_options(CLI::App* cmd, bool with_sigma = true) {
    cmd->add_option("--betas", betas_text, "comma list of radices beta_1..beta_n")->required();
    cmd->add_option("--omega", omega_text, "digit selection bound Omega (scalar)");
    cmd->add_option("--omegas", omegas_text,
                    "per-step Omega list; n entries for Omega_1..Omega_n, or n+1 entries "
                    "whose first (index 0) slot is ignored");
    if (with_sigma)
      cmd->add_option("--sigma", sigma_text, "reciprocal approximation error bound Sigma");
    cmd->add_option("--dsf", dsf_text, "digit selection kind: trunc | nearest");
    cmd->add_option("--tie", tie_text, "rounding tie rule: even | away | up | down");
    cmd->add_option("--steps", steps, "number of steps (default: length of --betas)");
  }

  void resolve() {
    betas = parse_beta_list(betas_text);
    if (steps == 0) steps = betas.size();
    if (betas.size() < steps)
      throw std::invalid_argument("--betas: list shorter than --steps");

    if (!omega_text.empty() && !omegas_text.empty())
      throw std::invalid_argument("--omega and --omegas are mutually exclusive");
    if (omega_text.empty() && omegas_text.empty())
      throw std::invalid_argument("--omega (or --omegas) is required");
    if (!omega_text.empty()) {
      omegas.assign(steps, parse_field(omega_text, "omega"));
    } else {
      auto items = split_list(omegas_text);
      std::size_t skip = 0;
      if (items.size() == steps + 1) skip = 1;  // leading Omega_0 slot, unused
      else if (items.size() != steps)
        throw std::invalid_argument("--omegas: expected " + std::to_string(steps) + " or " +
                                    std::to_string(steps + 1) + " entries");
      for (std::size_t i = skip; i < items.size(); ++i)
        omegas.push_back(parse_field(items[i], "omegas"));
    }

    sigma = parse_field(sigma_text, "sigma");
    if (sigma < 0) throw std::invalid_argument("--sigma: must be >= 0");

    if (dsf_text == "trunc") dsf_kind = DsfKind::truncating;
    else if (dsf_text == "nearest") dsf_kind = DsfKind::exact_nearest;
    else throw std::invalid_argument("--dsf: expected trunc or nearest");

    if (tie_text == "even") tie = TieRule::half_even;
    else if (tie_text == "away") tie = TieRule::half_away;
    else if (tie_text == "up") tie = TieRule::half_up;
    else if (tie_text == "down") tie = TieRule::half_down;
    else throw std::invalid_argument("--tie: expected even, away, up or down");
  }

  std::vector<DigitSelection> make_dsfs() const {
    std::vector<DigitSelection> dsfs;
    for (std::size_t i = 0; i < steps; ++i) dsfs.push_back(make_dsf(dsf_kind, omegas[i], tie));
    return dsfs;
  }
};

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

struct BoundsArgs {
  CommonSpec common;
  std::string interval_text;
  std::string format = "csv";
  unsigned decimals = 4;
  std::string round_text = "nearest";
};

int cmd_bounds(BoundsArgs& args) {
  args.common.resolve();
  if (args.common.op != "div" && args.common.op != "sqrt")
    throw std::invalid_argument("--op: expected div or sqrt");
  bool division = args.common.op == "div";

  Rational a = division ? Rational(1, 4) : Rational(1, 2);
  Rational b = 1;
  if (!args.interval_text.empty()) {
    auto parts = split_list(args.interval_text);
    if (parts.size() != 2) throw std::invalid_argument("--interval: expected a,b");
    a = parse_field(parts[0], "interval");
    b = parse_field(parts[1], "interval");
  }
  DecimalRound mode;
  if (args.round_text == "nearest") mode = DecimalRound::nearest;
  else if (args.round_text == "ceiling") mode = DecimalRound::ceiling;
  else throw std::invalid_argument("--round: expected nearest or ceiling");

  PsiSpec spec = division ? PsiSpec::division(args.common.sigma)
                          : PsiSpec::square_root(args.common.sigma, args.common.betas);
  BoundTable table =
      bound_table(spec, args.common.betas, args.common.omegas, args.common.steps, a, b);
  auto heads = head_error_bounds(table);

  if (args.format == "csv") {
    std::cout << bound_table_csv(table);
    std::cout << "\ni,head_bound,head_bound_decimal\n";
    for (std::size_t i = 0; i < heads.size(); ++i)
      std::cout << i << ',' << to_fraction_string(heads[i]) << ','
                << decimal_round(heads[i], args.decimals, mode) << '\n';
  } else if (args.format == "markdown") {
    std::cout << bound_table_markdown(table, args.decimals, mode);
    std::cout << "\n| i | head bound |\n|---|---|\n";
    for (std::size_t i = 0; i < heads.size(); ++i)
      std::cout << "| " << i << " | " << decimal_round(heads[i], args.decimals, mode) << " |\n";
  } else if (args.format == "text") {
    std::cout << "t =";
    for (const auto& row : table.rows)
      std::cout << ' ' << decimal_round(row.t, args.decimals, mode);
    std::cout << "\ndigit bounds =";
    for (const auto& row : table.rows)
      if (row.digit_bound) std::cout << ' ' << *row.digit_bound;
    std::cout << "\nhead error bounds: |V - H_i| <= c_i / B_i with c_i =";
    for (const auto& h : heads) std::cout << ' ' << decimal_round(h, args.decimals, mode);
    std::cout << '\n';
  } else {
    throw std::invalid_argument("--format: expected csv, markdown or text");
  }
  return 0;
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

struct RunArgs {
  CommonSpec common;
  std::string x_text, y_text;
  std::string x_fke_text, y_fke_text;
  std::string format = "csv";
};

FloatLikeInput parse_fke(const std::string& text, const std::string& field) {
  auto parts = split_list(text);
  if (parts.size() != 3) throw std::invalid_argument("--" + field + ": expected f,k,e");
  FloatLikeInput out;
  out.f = Integer(parts[0], 10);
  out.k = static_cast<unsigned>(std::stoul(parts[1]));
  out.e = std::stol(parts[2]);
  return out;
}

int cmd_run(RunArgs& args) {
  args.common.resolve();
  const std::string& op = args.common.op;
  if (op != "div" && op != "div-prescaled" && op != "sqrt" && op != "basic")
    throw std::invalid_argument("--op: expected div, div-prescaled, sqrt or basic");

  Rational x, y;
  long result_exponent = 0;
  bool scaled = false;
  if (!args.x_fke_text.empty()) {
    FloatLikeInput fx = parse_fke(args.x_fke_text, "x-fke");
    if (op == "sqrt") {
      ScaledSqrt s = scale_sqrt(fx);
      x = s.x;
      result_exponent = s.exponent;
    } else {
      FloatLikeInput fy = parse_fke(args.y_fke_text, "y-fke");
      ScaledDiv s = scale_div(fx, fy);
      x = s.x;
      y = s.y;
      result_exponent = s.exponent;
    }
    scaled = true;
  } else {
    if (args.x_text.empty()) throw std::invalid_argument("--x: required");
    x = parse_field(args.x_text, "x");
    if (op == "div" || op == "div-prescaled") {
      if (args.y_text.empty()) throw std::invalid_argument("--y: required for division");
      y = parse_field(args.y_text, "y");
    }
  }

  if (scaled) {
    std::cout << "# scaled: X=" << to_fraction_string(x);
    if (op != "sqrt") std::cout << " Y=" << to_fraction_string(y);
    std::cout << " result_exponent=" << result_exponent << '\n';
  }

  auto dsfs = args.common.make_dsfs();
  if (op == "basic") {
    DsmConfig config{RadixSequence(args.common.betas), dsfs};
    DsmTrace trace = run(x, config, args.common.steps, RunMode::basic);
    std::cout << trace_csv(trace);
    return 0;
  }

  RecipApprox g = make_recip(op == "sqrt" ? RecipKind::rsqrt : RecipKind::reciprocal,
                             args.common.sigma);
  RemainderTrace trace =
      op == "sqrt" ? run_sqrt(x, args.common.betas, dsfs, g, args.common.steps)
      : op == "div" ? run_div(x, y, args.common.betas, dsfs, g, args.common.steps)
                    : run_div_prescaled(x, y, args.common.betas, dsfs, g, args.common.steps);
  if (args.format == "text") {
    for (const auto& s : trace.states)
      std::cout << "i=" << s.i << " B=" << s.b << " H=" << to_fraction_string(s.h)
                << " v=" << s.v << " R=" << to_fraction_string(s.r)
                << " Tp=" << to_fraction_string(s.tp) << '\n';
  } else {
    std::cout << remainder_trace_csv(trace);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

struct VerifyArgs {
  CommonSpec common;
  std::size_t samples = 1000;
  std::uint64_t seed = 0;
  unsigned grid_bits = 24;
};

int cmd_verify(VerifyArgs& args) {
  args.common.resolve();
  VerifyConfig config;
  if (args.common.op == "basic") config.op = VerifyOp::basic;
  else if (args.common.op == "div") config.op = VerifyOp::div;
  else if (args.common.op == "div-prescaled") config.op = VerifyOp::div_prescaled;
  else if (args.common.op == "sqrt") config.op = VerifyOp::sqrt;
  else throw std::invalid_argument("--op: expected basic, div, div-prescaled or sqrt");
  config.betas = args.common.betas;
  config.omegas = args.common.omegas;
  config.sigma = args.common.sigma;
  config.dsf_kind = args.common.dsf_kind;
  config.tie = args.common.tie;
  config.steps = args.common.steps;
  config.input_grid_bits = args.grid_bits;

  VerifySummary summary = verify_random(config, args.samples, args.seed);
  std::cout << summary.passed << '/' << summary.samples << " pass (seed " << args.seed << ")\n";
  if (summary.passed == summary.samples) return 0;
  for (const auto& v : summary.violations)
    std::cout << "violation: " << v.what << "\n  reproducer: " << v.reproducer << '\n';
  return 1;
}

// ---------------------------------------------------------------------------
// otf
// ---------------------------------------------------------------------------

struct OtfArgs {
  std::string betas_text;
  std::string digits_text;
  std::string mode_text = "narrow";
  bool dump = false;
};

int cmd_otf(OtfArgs& args) {
  auto betas = parse_beta_list(args.betas_text);
  std::vector<Integer> digits;
  for (const auto& item : split_list(args.digits_text)) digits.emplace_back(item, 10);
  if (digits.empty()) throw std::invalid_argument("--digits: empty list");
  if (digits.size() != betas.size())
    throw std::invalid_argument("--digits: length must match --betas");
  OtfMode mode;
  if (args.mode_text == "narrow") mode = OtfMode::narrow;
  else if (args.mode_text == "wide") mode = OtfMode::wide;
  else throw std::invalid_argument("--mode: expected narrow or wide");

  OtfAccumulator acc = OtfAccumulator::init(mode, digits[0]);
  bool structural_ok = true;
  for (std::size_t i = 1; i < digits.size(); ++i) {
    OtfAccumulator next = acc.append(betas[i], digits[i]);
    for (const auto& upd : next.history().back().updates) {
      const auto& prefix = acc.bits(upd.selector_offset);
      const auto& full = next.bits(upd.target_offset);
      if (!std::equal(prefix.begin(), prefix.end(), full.begin())) structural_ok = false;
    }
    acc = next;
  }

  // Reference accumulation: A_n = sum v_j * (B_n / B_j).
  Integer reference = 0;
  std::ostringstream formula;
  for (std::size_t j = 0; j < digits.size(); ++j) {
    Integer weight = 1;
    for (std::size_t m = j + 1; m < betas.size(); ++m) weight *= betas[m];
    reference += digits[j] * weight;
    if (j) formula << " + ";
    formula << digits[j];
    if (weight != 1) formula << '*' << weight;
  }

  if (args.dump) std::cout << acc.debug_dump();
  std::cout << "otf value = " << acc.value() << '\n';
  std::cout << "reference = " << reference << " (" << formula.str() << ")\n";
  bool ok = acc.value() == reference && structural_ok;
  std::cout << "otf == reference: " << (acc.value() == reference ? "ok" : "MISMATCH") << '\n';
  std::cout << "structural no-carry: " << (structural_ok ? "ok" : "VIOLATED") << '\n';
  return ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// slack
// ---------------------------------------------------------------------------

struct SlackArgs {
  CommonSpec common;
  std::size_t target_i = 1;
  std::uint64_t budget = 10000;
  std::uint64_t seed = 0;
  unsigned grid_bits = 24;
  std::string format = "text";
};

int cmd_slack(SlackArgs& args) {
  args.common.resolve();
  SlackConfig config;
  if (args.common.op == "div") config.op = ProxyKind::division;
  else if (args.common.op == "sqrt") config.op = ProxyKind::square_root;
  else throw std::invalid_argument("--op: expected div or sqrt");
  config.betas = args.common.betas;
  config.omegas = args.common.omegas;
  config.sigma = args.common.sigma;
  config.dsf_kind = args.common.dsf_kind;
  config.tie = args.common.tie;
  config.grid_bits = args.grid_bits;

  SlackReport report = slack_search(config, args.target_i, args.budget, args.seed);
  if (args.format == "csv") {
    std::cout << slack_report_csv_header() << slack_report_csv(report);
  } else {
    std::cout << slack_report_summary(report) << '\n';
    std::cout << "best input: X=" << to_fraction_string(report.best_x);
    if (config.op == ProxyKind::division)
      std::cout << " Y=" << to_fraction_string(report.best_y);
    std::cout << '\n';
  }
  return 0;
}

// Expands `--config FILE` into the flags it contains: one `key=value` per
// line, `#` comments allowed. Flags given explicitly win over file entries.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw std::invalid_argument("--config: missing file name");
      path = args[i + 1];
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      args.erase(args.begin() + i);
      break;
    }
  }
  if (path.empty()) return args;

  std::ifstream file(path);
  if (!file) throw std::invalid_argument("--config: cannot open " + path);
  std::string line;
  while (std::getline(file, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("--config: expected key=value, got \"" + line + "\"");
    std::string key = "--" + line.substr(0, eq);
    if (std::find(args.begin(), args.end(), key) != args.end()) continue;
    args.push_back(key);
    args.push_back(line.substr(eq + 1));
  }
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digit-serial division/square-root runs with certified bounds"};
  app.require_subcommand(1);

  BoundsArgs bounds_args;
  auto* bounds_cmd = app.add_subcommand("bounds", "tail / proxy / digit bound table");
  bounds_cmd->add_option("--op", bounds_args.common.op, "div | sqrt")->required();
  bounds_args.common.add_options(bounds_cmd);
  bounds_cmd->add_option("--interval", bounds_args.interval_text, "V interval a,b");
  bounds_cmd->add_option("--format", bounds_args.format, "csv | markdown | text");
  bounds_cmd->add_option("--decimals", bounds_args.decimals, "display digits");
  bounds_cmd->add_option("--round", bounds_args.round_text, "nearest | ceiling");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "run one input through a DSM");
  run_cmd->add_option("--op", run_args.common.op, "div | div-prescaled | sqrt | basic")
      ->required();
  run_args.common.add_options(run_cmd);
  run_cmd->add_option("--x", run_args.x_text, "X (or V for basic) as a rational");
  run_cmd->add_option("--y", run_args.y_text, "Y as a rational (division)");
  run_cmd->add_option("--x-fke", run_args.x_fke_text, "X as float triple f,k,e (scaled first)");
  run_cmd->add_option("--y-fke", run_args.y_fke_text, "Y as float triple f,k,e");
  run_cmd->add_option("--format", run_args.format, "csv | text");

  VerifyArgs verify_args;
  auto* verify_cmd = app.add_subcommand("verify", "random-input invariant sweep");
  verify_cmd->add_option("--op", verify_args.common.op, "basic | div | div-prescaled | sqrt")
      ->required();
  verify_args.common.add_options(verify_cmd);
  verify_cmd->add_option("--samples", verify_args.samples, "number of random inputs");
  verify_cmd->add_option("--seed", verify_args.seed, "RNG seed (printed in output)");
  verify_cmd->add_option("--grid-bits", verify_args.grid_bits, "input grid resolution");

  OtfArgs otf_args;
  auto* otf_cmd = app.add_subcommand("otf", "on-the-fly accumulation vs. reference");
  otf_cmd->add_option("--betas", otf_args.betas_text, "comma list of radices")->required();
  otf_cmd->add_option("--digits", otf_args.digits_text, "comma list of digits")->required();
  otf_cmd->add_option("--mode", otf_args.mode_text, "narrow | wide");
  otf_cmd->add_flag("--dump", otf_args.dump, "print per-step bit vectors");

  SlackArgs slack_args;
  auto* slack_cmd = app.add_subcommand("slack", "search inputs driving |v_i| toward its bound");
  slack_cmd->add_option("--op", slack_args.common.op, "div | sqrt")->required();
  slack_args.common.add_options(slack_cmd);
  slack_cmd->add_option("--target-i", slack_args.target_i, "digit index to attack")->required();
  slack_cmd->add_option("--budget", slack_args.budget, "evaluation budget");
  slack_cmd->add_option("--seed", slack_args.seed, "RNG seed (printed in output)");
  slack_cmd->add_option("--grid-bits", slack_args.grid_bits, "input grid resolution");
  slack_cmd->add_option("--format", slack_args.format, "csv | text");

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11's vector overload wants reversed args
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    if (bounds_cmd->parsed()) return cmd_bounds(bounds_args);
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (verify_cmd->parsed()) return cmd_verify(verify_args);
    if (otf_cmd->parsed()) return cmd_otf(otf_args);
    if (slack_cmd->parsed()) return cmd_slack(slack_args);
  } catch (const dsm::domain_error& e) {
    std::cerr << "domain violation: " << e.what() << '\n';
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "verification failure: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
