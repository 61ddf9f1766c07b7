#include "explab/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "explab/adaptive.hpp"
#include "explab/channel.hpp"
#include "explab/errors.hpp"
#include "explab/io.hpp"
#include "explab/quantum.hpp"
#include "explab/scalar_search.hpp"

namespace explab {

namespace {

constexpr double kSec4A = 100.0;
constexpr double kSec4B = 1.5;
constexpr double kSec4P = 1e-4;
constexpr double kSec4Q = 0.65;

struct RunConfig {
  std::string command;
  std::optional<std::string> input, out, policy, kind, mode, config;
  std::optional<double> r, s_lo, s_hi, r_lo, r_hi, prior, a, b, p, q, epsilon;
  std::optional<std::size_t> s_count, r_count, n;
  std::optional<std::uint64_t> trials, seed;
};

void add_options(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--input", cfg.input, "Channel-pair or state JSON file");
  sub->add_option("--out", cfg.out, "Output file (default: standard output)");
  sub->add_option("--config", cfg.config, "JSON file with default values for any flag");
  sub->add_option("--r", cfg.r, "Rate r in nats (default 0)");
  sub->add_option("--s-lo", cfg.s_lo, "Lower end of the s grid (default -1)");
  sub->add_option("--s-hi", cfg.s_hi, "Upper end of the s grid (default 0)");
  sub->add_option("--s-count", cfg.s_count, "Number of s grid points (default 201)");
  sub->add_option("--r-lo", cfg.r_lo, "Lower end of the r grid (default 0)");
  sub->add_option("--r-hi", cfg.r_hi, "Upper end of the r grid (default 1)");
  sub->add_option("--r-count", cfg.r_count, "Number of r grid points (default 101)");
  sub->add_option("--kind", cfg.kind, "Curve kind: phi or exponent (default phi)");
  sub->add_option("--n", cfg.n, "Horizon n");
  sub->add_option("--trials", cfg.trials, "Monte-Carlo trials (default 0: none)");
  sub->add_option("--seed", cfg.seed, "64-bit seed (default 0)");
  sub->add_option("--prior", cfg.prior, "Prior weight of W in the Bayes error (default 0.5)");
  sub->add_option("--mode", cfg.mode, "Simulation mode: dp, fixed or mc (default dp)");
  sub->add_option("--policy", cfg.policy, "Policy/test JSON file for simulate");
  sub->add_option("--epsilon", cfg.epsilon, "Regularity window epsilon (default 0.1)");
  sub->add_option("--a", cfg.a, "Example parameter a (default 100)");
  sub->add_option("--b", cfg.b, "Example parameter b (default 1.5)");
  sub->add_option("--p", cfg.p, "Example parameter p (default 0.0001)");
  sub->add_option("--q", cfg.q, "Example parameter q (default 0.65)");
}

std::string normalized_key(std::string key) {
  for (char& c : key) {
    if (c == '_') c = '-';
  }
  return key;
}

template <class T>
void fill(std::optional<T>& slot, const Json& value, const std::string& key) {
  if (slot) return;  // flags win
  try {
    slot = value.get<T>();
  } catch (const Json::exception&) {
    throw IoError("config key \"" + key + "\" has the wrong type");
  }
}

void merge_config(RunConfig& cfg) {
  if (!cfg.config) return;
  const Json j = read_json_file(*cfg.config);
  if (!j.is_object()) throw IoError("config file must be a JSON object");
  for (const auto& [raw, value] : j.items()) {
    const std::string key = normalized_key(raw);
    if (key == "input") fill(cfg.input, value, key);
    else if (key == "out") fill(cfg.out, value, key);
    else if (key == "policy") fill(cfg.policy, value, key);
    else if (key == "kind") fill(cfg.kind, value, key);
    else if (key == "mode") fill(cfg.mode, value, key);
    else if (key == "r") fill(cfg.r, value, key);
    else if (key == "s-lo") fill(cfg.s_lo, value, key);
    else if (key == "s-hi") fill(cfg.s_hi, value, key);
    else if (key == "s-count") fill(cfg.s_count, value, key);
    else if (key == "r-lo") fill(cfg.r_lo, value, key);
    else if (key == "r-hi") fill(cfg.r_hi, value, key);
    else if (key == "r-count") fill(cfg.r_count, value, key);
    else if (key == "n") fill(cfg.n, value, key);
    else if (key == "trials") fill(cfg.trials, value, key);
    else if (key == "seed") fill(cfg.seed, value, key);
    else if (key == "prior") fill(cfg.prior, value, key);
    else if (key == "epsilon") fill(cfg.epsilon, value, key);
    else if (key == "a") fill(cfg.a, value, key);
    else if (key == "b") fill(cfg.b, value, key);
    else if (key == "p") fill(cfg.p, value, key);
    else if (key == "q") fill(cfg.q, value, key);
    else if (key != "command") throw IoError("unknown config key \"" + raw + "\"");
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

const std::string& input_label(const ChannelPair& pair, std::size_t x) { return pair.w().input_labels()[x]; }

ChannelPair load_pair_or_sec4(const RunConfig& cfg) {
  if (cfg.input) return channel_pair_from_json(read_json_file(*cfg.input));
  return sec4_example(cfg.a.value_or(kSec4A), cfg.b.value_or(kSec4B), cfg.p.value_or(kSec4P),
                      cfg.q.value_or(kSec4Q));
}

Json regularity_json(const RegularityReport& reg) {
  return {{"epsilon", json_number(reg.epsilon)},
          {"window", {json_number(reg.window_lo), json_number(reg.window_hi)}},
          {"sup_phi_second", json_number(reg.sup_phi_second)},
          {"stein_slope_gap", json_number(reg.stein_slope_gap)},
          {"regular", reg.regular}};
}

// Stein, Chernoff, Hoeffding and Han-Kobayashi at rate r, with attaining inputs.
Json channel_bounds_json(const ChannelPair& pair, double r) {
  const auto stein = stein_channel(pair);
  const auto chern = chernoff_channel(pair);
  const auto hoeff = hoeffding_channel(r, pair);
  const auto hk = hk_channel(r, pair);
  const auto asym = envelope_asymptote(pair);
  Json attaining = {{"stein", input_label(pair, stein.input)},
                    {"chernoff", input_label(pair, chern.input)},
                    {"hoeffding", input_label(pair, hoeff.input)}};
  if (std::isfinite(hk.value)) {
    const auto best = hk_best_pair(r, pair);
    attaining["hk_two_point"] = {{"x_plus", input_label(pair, best.input.x_plus)},
                                 {"x_minus", input_label(pair, best.input.x_minus)},
                                 {"lambda", json_number(best.input.lambda)},
                                 {"value", json_number(best.value)}};
  }
  return {{"r", json_number(r)},
          {"stein", json_number(stein.value)},
          {"chernoff", json_number(chern.value)},
          {"hoeffding", json_number(hoeff.value)},
          {"hk", json_number(hk.value)},
          {"hk_regime", to_string(hk.regime)},
          {"hk_argmax_s", json_number(hk.argmax_s)},
          {"attaining_inputs", attaining},
          {"r0_env", json_number(asym.r0)},
          {"slope_R_env", json_number(asym.slope_R)}};
}

std::string cmd_bounds(const RunConfig& cfg) {
  if (!cfg.input) throw IoError("bounds needs --input");
  const auto pair = channel_pair_from_json(read_json_file(*cfg.input));
  Json report = {{"command", "bounds"}};
  report.update(channel_bounds_json(pair, cfg.r.value_or(0.0)));
  report["regularity"] = regularity_json(regularity_check(pair, cfg.epsilon.value_or(0.1)));
  return dump(report);
}

std::string cmd_curve(const RunConfig& cfg) {
  const auto pair = load_pair_or_sec4(cfg);
  const std::string kind = cfg.kind.value_or("phi");
  std::ostringstream csv;
  const auto& labels = pair.w().input_labels();
  auto grid_of = [](double lo, double hi, std::size_t count) {
    if (!(lo < hi)) throw DomainError("grid needs lo < hi");
    if (count < 2) throw DomainError("grid needs at least two points");
    return linear_grid(lo, hi, count);
  };
  if (kind == "phi") {
    const auto grid = grid_of(cfg.s_lo.value_or(-1.0), cfg.s_hi.value_or(0.0), cfg.s_count.value_or(201));
    csv << "s";
    for (const auto& l : labels) csv << ",phi_row" << l;
    csv << ",phi_envelope\n";
    for (double s : grid) {
      csv << format_number(s);
      for (std::size_t x = 0; x < pair.inputs(); ++x) csv << ',' << format_number(pair.row_pair(x).phi(s));
      csv << ',' << format_number(channel_phi(s, pair).value) << '\n';
    }
  } else if (kind == "exponent") {
    const auto grid = grid_of(cfg.r_lo.value_or(0.0), cfg.r_hi.value_or(1.0), cfg.r_count.value_or(101));
    if (grid.front() < 0.0) throw DomainError("rates must be nonnegative");
    csv << "r";
    for (const auto& l : labels) csv << ",Be_row" << l;
    for (const auto& l : labels) csv << ",BeStar_row" << l;
    csv << ",hk_channel\n";
    for (double r : grid) {
      csv << format_number(r);
      for (std::size_t x = 0; x < pair.inputs(); ++x) csv << ',' << format_number(hoeffding(r, pair.row_pair(x)).value);
      for (std::size_t x = 0; x < pair.inputs(); ++x) {
        csv << ',' << format_number(han_kobayashi(r, pair.row_pair(x)).value);
      }
      csv << ',' << format_number(hk_channel(r, pair).value) << '\n';
    }
  } else {
    throw IoError("--kind must be phi or exponent");
  }
  return csv.str();
}

Policy one_hot_policy(std::size_t inputs, std::size_t x) {
  return Policy(inputs, [x](History, std::span<double> out) {
    std::fill(out.begin(), out.end(), 0.0);
    out[x] = 1.0;
  });
}

double exponent_of(double error, std::size_t n) { return -std::log(error) / static_cast<double>(n); }

std::string cmd_simulate(const RunConfig& cfg) {
  if (!cfg.n || *cfg.n == 0) throw IoError("simulate needs --n >= 1");
  const std::size_t n = *cfg.n;
  const auto pair = load_pair_or_sec4(cfg);
  const double prior = cfg.prior.value_or(0.5);
  if (!(prior > 0.0 && prior < 1.0)) throw DomainError("--prior must lie in (0, 1)");
  const std::string mode = cfg.mode.value_or("dp");
  if (mode != "dp" && mode != "fixed" && mode != "mc") throw IoError("--mode must be dp, fixed or mc");
  const std::uint64_t trials = cfg.trials.value_or(0);
  const std::uint64_t seed = cfg.seed.value_or(0);
  if (mode == "mc" && trials == 0) throw IoError("mc mode needs --trials >= 1");

  bool enumerable = true;
  try {
    require_enumeration_scale(pair, n);
  } catch (const ScaleError&) {
    enumerable = false;
  }

  Json report = {{"command", "simulate"}, {"mode", mode}, {"n", n}, {"prior", json_number(prior)},
                 {"trials", trials}, {"seed", seed}};
  const auto stein = stein_channel(pair);
  const auto chern = chernoff_channel(pair);
  Json theory = {{"stein_channel", json_number(stein.value)},
                 {"stein_input", input_label(pair, stein.input)},
                 {"chernoff_channel", json_number(chern.value)},
                 {"chernoff_input", input_label(pair, chern.input)}};
  Json exact = Json::object();

  std::optional<InputValue> best_fixed;
  auto fixed = [&]() -> const InputValue& {
    if (!best_fixed) best_fixed = best_fixed_input_bayes(n, pair, prior);
    return *best_fixed;
  };

  std::optional<Policy> policy;
  std::optional<TestFunction> test;
  std::string policy_source;
  if (cfg.policy) {
    auto pf = policy_from_json(read_json_file(*cfg.policy), pair, n, prior);
    policy.emplace(std::move(pf.policy));
    test.emplace(std::move(pf.test));
    policy_source = "file";
  } else if (mode == "dp" && (enumerable || trials == 0)) {
    auto res = optimal_adaptive_bayes(n, pair, prior);  // throws ScaleError past the limit
    exact["adaptive_bayes_error"] = json_number(res.error);
    theory["adaptive_exponent"] = json_number(exponent_of(res.error, n));
    policy.emplace(std::move(res.policy));
    test.emplace(std::move(res.test));
    policy_source = "optimal_adaptive";
  } else {
    const auto& best = fixed();
    policy.emplace(one_hot_policy(pair.inputs(), best.input));
    test.emplace(TestFunction::likelihood_ratio(prior));
    policy_source = mode == "dp" ? "best_fixed_fallback" : "best_fixed";
  }
  report["policy"] = policy_source;

  if (!cfg.policy) {
    const auto& best = fixed();
    theory["best_fixed_bayes_error"] = json_number(best.value);
    theory["best_fixed_input"] = input_label(pair, best.input);
    theory["best_fixed_exponent"] = json_number(exponent_of(best.value, n));
    if (exact.contains("adaptive_bayes_error")) {
      theory["exponent_gap"] = json_number(std::abs(theory["adaptive_exponent"].get<double>() -
                                                    theory["best_fixed_exponent"].get<double>()));
    }
  }

  std::optional<ErrorPair> errors;
  if (mode != "mc" && enumerable) {
    errors = exact_errors(*policy, *test, n, pair);
    exact["alpha"] = json_number(errors->alpha);
    exact["beta"] = json_number(errors->beta);
    exact["bayes_error"] = json_number(prior * errors->alpha + (1.0 - prior) * errors->beta);
  }
  if (trials > 0) {
    const auto est = monte_carlo_errors(*policy, *test, n, pair, trials, seed);
    report["alpha"] = json_number(est.alpha);
    report["beta"] = json_number(est.beta);
    report["half_width_alpha"] = json_number(est.half_width_alpha);
    report["half_width_beta"] = json_number(est.half_width_beta);
    report["source"] = "monte_carlo";
  } else if (errors) {
    report["alpha"] = json_number(errors->alpha);
    report["beta"] = json_number(errors->beta);
    report["half_width_alpha"] = 0;
    report["half_width_beta"] = 0;
    report["source"] = "exact";
  }
  report["exact"] = exact;
  report["theory"] = theory;
  return dump(report);
}

std::string cmd_example_sec4(const RunConfig& cfg) {
  const double a = cfg.a.value_or(kSec4A);
  const double b = cfg.b.value_or(kSec4B);
  const double p = cfg.p.value_or(kSec4P);
  const double q = cfg.q.value_or(kSec4Q);
  const auto pair = sec4_example(a, b, p, q);
  Json report = {{"command", "example-sec4"},
                 {"params", {{"a", json_number(a)}, {"b", json_number(b)}, {"p", json_number(p)}, {"q", json_number(q)}}},
                 {"channel", to_json(pair)},
                 {"divergence_row0", json_number(pair.row_pair(0).relative_entropy())},
                 {"divergence_row1", json_number(pair.row_pair(1).relative_entropy())}};
  report.update(channel_bounds_json(pair, cfg.r.value_or(0.0)));

  // First sign change of phi_row0 - phi_row1 on (-1, 0), refined by bisection.
  auto diff = [&](double s) { return pair.row_pair(0).phi(s) - pair.row_pair(1).phi(s); };
  const auto grid = linear_grid(-1.0, 0.0, 1001);
  Json crossing = nullptr;
  for (std::size_t i = 0; i + 2 < grid.size(); ++i) {
    double lo = grid[i];
    double hi = grid[i + 1];
    if ((diff(lo) > 0.0) == (diff(hi) > 0.0)) continue;
    const bool lo_positive = diff(lo) > 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      const double mid = 0.5 * (lo + hi);
      if ((diff(mid) > 0.0) == lo_positive) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    crossing = json_number(0.5 * (lo + hi));
    break;
  }
  report["phi_crossing_s"] = crossing;

  // Largest gap between the best single-input Han-Kobayashi bound and the channel bound.
  const double stein = stein_channel(pair).value;
  double best_gap = 0.0;
  double best_r = stein;
  for (double r : linear_grid(stein, stein + 1.0, 101)) {
    double per_row = kInf;
    for (std::size_t x = 0; x < pair.inputs(); ++x) per_row = std::min(per_row, han_kobayashi(r, pair.row_pair(x)).value);
    const double gap = per_row - hk_channel(r, pair).value;
    if (gap > best_gap) {
      best_gap = gap;
      best_r = r;
    }
  }
  report["hk_separation"] = {{"max_gap", json_number(best_gap)}, {"at_r", json_number(best_r)}};
  return dump(report);
}

std::string cmd_quantum(const RunConfig& cfg) {
  if (!cfg.input) throw IoError("quantum needs --input");
  const auto [rho, sigma] = state_pair_from_json(read_json_file(*cfg.input));
  SearchOptions options;
  if (cfg.seed) options.seed = *cfg.seed;
  const double r = cfg.r.value_or(0.0);
  const auto bounds = locc_bounds(rho, sigma, r, options);
  const double qre = quantum_relative_entropy(rho, sigma);
  Json report = {{"command", "quantum"},
                 {"r", json_number(r)},
                 {"measured_stein", json_number(bounds.stein)},
                 {"measured_chernoff", json_number(bounds.chernoff)},
                 {"measured_hoeffding", json_number(bounds.hoeffding)},
                 {"measured_hk", json_number(bounds.han_kobayashi)},
                 {"quantum_relative_entropy", json_number(qre)},
                 {"gap", json_number(std::max(0.0, qre - bounds.stein))},
                 {"best_measurement",
                  {{"family", to_string(bounds.stein_measurement.family)},
                   {"elements", to_json(bounds.stein_measurement.measurement)}}},
                 {"search_based", bounds.search_based}};
  return dump(report);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Error exponents for discriminating classical channels and qubit states"};
  app.require_subcommand(1);
  RunConfig cfg;
  struct Command {
    const char* name;
    const char* help;
    std::string (*run)(const RunConfig&);
  };
  const Command commands[] = {
      {"bounds", "Channel-level Stein, Chernoff, Hoeffding and Han-Kobayashi bounds", cmd_bounds},
      {"curve", "CSV of phi curves (--kind phi) or exponent curves (--kind exponent)", cmd_curve},
      {"simulate", "Exact / Monte-Carlo error probabilities of adaptive strategies", cmd_simulate},
      {"example-sec4", "The two-input binary example channel and its bounds", cmd_example_sec4},
      {"quantum", "One-way LOCC bounds for a qubit state pair", cmd_quantum},
  };
  for (const auto& c : commands) add_options(app.add_subcommand(c.name, c.help), cfg);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitIo;
  }

  try {
    for (const auto& c : commands) {
      if (!app.got_subcommand(c.name)) continue;
      cfg.command = c.name;
      merge_config(cfg);
      const std::string text = c.run(cfg);
      if (cfg.out) {
        write_text(*cfg.out, text);
      } else {
        out << text;
      }
    }
    return kExitOk;
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ScaleError& e) {
    err << "scale error: " << e.what() << '\n';
    return kExitScale;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const std::exception& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace explab
