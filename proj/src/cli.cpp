#include "bgi/cli.hpp"

#include <CLI11.hpp>

#include <array>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "bgi/baselines.hpp"
#include "bgi/bounds.hpp"
#include "bgi/eecb.hpp"
#include "bgi/errors.hpp"
#include "bgi/harness.hpp"
#include "bgi/io.hpp"
#include "bgi/triple_elimination.hpp"

namespace bgi {

using nlohmann::json;

namespace {

struct Globals {
  std::uint64_t seed = 0;
  double delta = 0.01;
  double epsilon = 0.01;
  double beta_scale = 1.0;
  std::uint64_t max_rounds = 10'000'000;
  std::string output;
};

struct GenArgs {
  std::string kind = "gpsi";
  std::size_t groups = 5;
  std::size_t arms = 6;
  std::size_t dims = 3;
  std::size_t pareto_count = 1;
  std::vector<double> weights;
  double delta_min = 0.05;
  std::vector<double> a;
  std::string noise_kind;
  std::optional<double> noise_scale;
  std::uint64_t max_attempts = 100000;
};

struct InstanceArgs {
  std::string instance;
  std::vector<double> weights;
};

struct RunArgs {
  std::string algo = "te";
  std::string trace;
  std::optional<double> noise_scale;
};

struct BoundsArgs {
  std::string kind = "te_upper";
  double constant = 1.0;
  bool refined = false;
};

struct SweepArgs {
  std::string config;
  std::size_t workers = 0;
};

void emit(const Globals& g, const json& value, std::ostream& out) {
  const std::string text = value.dump(2) + "\n";
  if (g.output.empty()) {
    out << text;
  } else {
    write_text_file(g.output, text);
  }
}

Instance apply_noise_override(Instance inst, const std::optional<double>& scale) {
  if (scale) {
    if (!(*scale >= 0.0)) throw ArgumentError("noise scale must be non-negative");
    inst.noise.scale = *scale;
  }
  return inst;
}

json cmd_gen(const Globals& g, const GenArgs& a) {
  RngStream rng(g.seed, 0);
  GenerationOptions options;
  options.max_attempts = a.max_attempts;
  if (!a.noise_kind.empty()) options.noise.kind = noise_kind_from_string(a.noise_kind);
  if (a.noise_scale) options.noise.scale = *a.noise_scale;
  Instance inst;
  if (a.kind == "gpsi") {
    inst = gen_random_gpsi(a.groups, a.arms, a.dims, a.pareto_count, g.epsilon, rng, options);
  } else if (a.kind == "lbgi") {
    if (a.weights.empty()) throw ArgumentError("gen --kind lbgi needs --weights");
    inst = gen_random_lbgi(a.groups, a.arms, a.dims, a.weights, a.delta_min, rng, options);
  } else if (a.kind == "hard") {
    HardInstanceParams params;
    if (!a.a.empty()) {
      if (a.a.size() != 5) throw ArgumentError("--a takes exactly five values");
      std::copy(a.a.begin(), a.a.end(), params.a.begin());
    }
    inst = gen_hard_gpsi(a.groups, a.arms, a.dims, g.epsilon, params, rng);
    if (!a.noise_kind.empty()) inst.noise.kind = options.noise.kind;
    if (a.noise_scale) inst.noise.scale = *a.noise_scale;
  } else {
    throw ArgumentError("unknown generator '" + a.kind + "'");
  }
  return instance_to_json(inst);
}

json cmd_gaps(const Globals& g, const InstanceArgs& a) {
  const Instance inst = load_instance(a.instance);
  if (!a.weights.empty()) return lbgi_gaps_to_json(lbgi_gaps(inst.tensor, a.weights));
  return gpsi_gaps_to_json(gpsi_gaps(inst.tensor, g.epsilon));
}

json cmd_run(const Globals& g, const InstanceArgs& ia, const RunArgs& a) {
  const Instance inst = apply_noise_override(load_instance(ia.instance), a.noise_scale);
  RngStream rng(g.seed, replication_stream(0));
  const bool want_trace = !a.trace.empty();
  json result;
  Trace trace;
  if (is_gpsi_algorithm(a.algo)) {
    TeConfig c;
    c.delta = g.delta;
    c.epsilon = g.epsilon;
    c.beta_scale = g.beta_scale;
    c.max_rounds = g.max_rounds;
    c.record_trace = want_trace;
    GpsiResult r;
    if (a.algo == "te") r = run_te(inst, c, rng);
    else if (a.algo == "age") r = run_age(inst, c, rng);
    else if (a.algo == "ge") r = run_ge(inst, c, rng);
    else r = run_unis(inst, g.delta, g.epsilon, rng);
    result = gpsi_result_to_json(r);
    trace = std::move(r.trace);
  } else if (is_lbgi_algorithm(a.algo)) {
    if (ia.weights.empty()) throw ArgumentError("--algo " + a.algo + " needs --weights");
    LbgiResult r;
    if (a.algo == "eecb") {
      EecbConfig c;
      c.weights = ia.weights;
      c.delta = g.delta;
      c.beta_scale = g.beta_scale;
      c.max_rounds = g.max_rounds;
      c.record_trace = want_trace;
      r = run_eecb(inst, c, rng);
    } else {
      TelConfig c;
      c.weights = ia.weights;
      c.delta = g.delta;
      c.beta_scale = g.beta_scale;
      c.max_rounds = g.max_rounds;
      c.record_trace = want_trace;
      TelResult tel = run_tel(inst, c, rng);
      r = std::move(tel.lbgi);
      trace = std::move(tel.pareto_run.trace);
    }
    result = lbgi_result_to_json(r);
    if (trace.empty()) trace = std::move(r.trace);
  } else {
    throw ArgumentError("unknown algorithm '" + a.algo + "'");
  }
  result["algorithm"] = a.algo;
  result["seed"] = g.seed;
  if (want_trace) {
    std::ostringstream os;
    write_trace_jsonl(trace, os);
    write_text_file(a.trace, os.str());
  }
  return result;
}

json cmd_bounds(const Globals& g, const InstanceArgs& ia, const BoundsArgs& a) {
  const Instance inst = load_instance(ia.instance);
  BoundReport r;
  if (a.kind == "te_upper") {
    r = te_upper_bound(inst.tensor, g.epsilon, g.delta, a.constant);
  } else if (a.kind == "gpsi_lower") {
    r = gpsi_lower_bound(inst.tensor, g.epsilon, g.delta);
  } else if (a.kind == "eecb_upper" || a.kind == "lbgi_lower") {
    if (ia.weights.empty()) throw ArgumentError("bounds --kind " + a.kind + " needs --weights");
    r = a.kind == "eecb_upper" ? eecb_upper_bound(inst.tensor, ia.weights, g.delta, a.constant, a.refined)
                               : lbgi_lower_bound(inst.tensor, ia.weights, g.delta);
  } else {
    throw ArgumentError("unknown bound kind '" + a.kind + "'");
  }
  return bound_report_to_json(r);
}

json cmd_sweep(const Globals& g, const CLI::App& app, const SweepArgs& a) {
  json j;
  try {
    j = json::parse(read_text_file(a.config));
  } catch (const json::parse_error& e) {
    throw ArgumentError("cannot parse " + a.config + ": " + e.what());
  }
  ExperimentConfig config = config_from_json(j);
  if (app.count("--seed")) config.master_seed = g.seed;
  if (app.count("--delta")) config.delta = g.delta;
  if (app.count("--epsilon")) config.epsilon = g.epsilon;
  if (app.count("--beta-scale")) config.beta_scale = g.beta_scale;
  if (app.count("--max-rounds")) config.max_rounds = g.max_rounds;
  if (a.workers) config.workers = a.workers;
  if (!g.output.empty()) config.output_dir = g.output;
  const SweepResult result = run_sweep(config);
  json failures = json::array();
  for (const auto& f : result.failures) failures.push_back({{"grid_point", f.grid_point}, {"message", f.message}});
  return json{{"summary", summary_to_json(result.summary)}, {"grid_failures", failures},
              {"records", result.records.size()}};
}

void report(std::ostream& err, const std::string& kind, const std::string& message) {
  err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Best group identification toolkit", "bgi"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master seed");
  app.add_option("--delta", g.delta, "Confidence parameter");
  app.add_option("--epsilon", g.epsilon, "Pareto slack");
  app.add_option("--beta-scale", g.beta_scale, "Confidence radius multiplier");
  app.add_option("--max-rounds", g.max_rounds, "Round budget per run");
  app.add_option("--output", g.output, "Write the result here instead of stdout (sweep: output directory)");

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate an instance");
  gen_cmd->add_option("--kind", gen.kind, "gpsi, lbgi or hard")->check(CLI::IsMember({"gpsi", "lbgi", "hard"}));
  gen_cmd->add_option("--groups", gen.groups);
  gen_cmd->add_option("--arms", gen.arms);
  gen_cmd->add_option("--dims", gen.dims);
  gen_cmd->add_option("--pareto-count", gen.pareto_count);
  gen_cmd->add_option("--weights", gen.weights);
  gen_cmd->add_option("--delta-min", gen.delta_min);
  gen_cmd->add_option("--a", gen.a, "Five hard-instance levels a1..a5");
  gen_cmd->add_option("--noise-kind", gen.noise_kind)->check(CLI::IsMember({"independent_gaussian", "fully_dependent"}));
  gen_cmd->add_option("--noise-scale", gen.noise_scale);
  gen_cmd->add_option("--max-attempts", gen.max_attempts);

  InstanceArgs inst_args;
  auto* gaps_cmd = app.add_subcommand("gaps", "Print the gap report of an instance");
  gaps_cmd->add_option("--instance", inst_args.instance)->required();
  gaps_cmd->add_option("--weights", inst_args.weights, "Weighted report when given");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run one algorithm on one instance");
  run_cmd->add_option("--instance", inst_args.instance)->required();
  run_cmd->add_option("--weights", inst_args.weights);
  run_cmd->add_option("--algo", run.algo)->check(CLI::IsMember({"te", "age", "ge", "unis", "eecb", "tel"}));
  run_cmd->add_option("--trace", run.trace, "Write the event trace as JSON lines");
  run_cmd->add_option("--noise-scale", run.noise_scale, "Override the instance noise scale");

  BoundsArgs bounds;
  auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate a sample-complexity expression");
  bounds_cmd->add_option("--instance", inst_args.instance)->required();
  bounds_cmd->add_option("--weights", inst_args.weights);
  bounds_cmd->add_option("--kind", bounds.kind)
      ->check(CLI::IsMember({"te_upper", "gpsi_lower", "eecb_upper", "lbgi_lower"}));
  bounds_cmd->add_option("--constant", bounds.constant);
  bounds_cmd->add_flag("--refined", bounds.refined);

  SweepArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment sweep from a config file");
  sweep_cmd->add_option("--config", sweep.config)->required();
  sweep_cmd->add_option("--workers", sweep.workers);

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    report(err, "usage_error", e.what());
    return 2;
  }

  try {
    json result;
    if (*gen_cmd) result = cmd_gen(g, gen);
    else if (*gaps_cmd) result = cmd_gaps(g, inst_args);
    else if (*run_cmd) result = cmd_run(g, inst_args, run);
    else if (*bounds_cmd) result = cmd_bounds(g, inst_args, bounds);
    else result = cmd_sweep(g, app, sweep);
    if (*sweep_cmd) {
      out << result.dump(2) << '\n';
    } else {
      emit(g, result, out);
    }
    return 0;
  } catch (const IoError& e) {
    report(err, "io_error", e.what());
    return 1;
  } catch (const std::exception& e) {
    report(err, error_kind(e), e.what());
    return 3;
  }
}

}  // namespace bgi
