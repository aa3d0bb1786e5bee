#include "bgi/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "bgi/baselines.hpp"
#include "bgi/eecb.hpp"
#include "bgi/errors.hpp"
#include "bgi/io.hpp"
#include "bgi/triple_elimination.hpp"

namespace bgi {

using nlohmann::json;

std::string to_string(Preset preset) {
  switch (preset) {
    case Preset::vary_n:
      return "vary_n";
    case Preset::vary_k:
      return "vary_k";
    case Preset::weight_sweep:
      return "weight_sweep";
    case Preset::custom:
      return "custom";
  }
  return "unknown";
}

Preset preset_from_string(const std::string& name) {
  if (name == "vary_n") return Preset::vary_n;
  if (name == "vary_k") return Preset::vary_k;
  if (name == "weight_sweep") return Preset::weight_sweep;
  if (name == "custom") return Preset::custom;
  throw ArgumentError("unknown preset '" + name + "'");
}

bool is_gpsi_algorithm(const std::string& id) { return id == "te" || id == "age" || id == "ge" || id == "unis"; }
bool is_lbgi_algorithm(const std::string& id) { return id == "eecb" || id == "tel"; }

std::string format_real(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

const std::vector<std::vector<double>> kPaperWeights = {
    {0.1, 0.1, 1.0}, {1.0, 1.0, 0.1}, {0.1, 1.0, 1.0}, {1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}};

// Uniform draws essentially never give every group a gap above 3 * 0.05 once
// N reaches 5, so desk sweeps draw instances with a smaller threshold while
// the algorithms still run at epsilon = 0.05.
constexpr double kDeskGenerationEpsilon = 0.035;

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig preset_config(Preset preset, Scale scale) {
  ExperimentConfig c;
  c.preset = preset;
  const bool desk = scale == Scale::desk;
  c.delta = desk ? 0.1 : 0.01;
  c.epsilon = desk ? 0.05 : 0.01;
  c.replications = desk ? 10 : 20;
  if (desk) c.max_generation_attempts = 1'000'000;
  switch (preset) {
    case Preset::vary_n:
      c.algorithms = {"te", "age", "ge", "unis"};
      c.n_values = desk ? std::vector<std::size_t>{3, 4, 5} : std::vector<std::size_t>{3, 5, 7, 9};
      c.n_arms = 6;
      c.n_dims = 3;
      if (desk) c.generation_epsilon = kDeskGenerationEpsilon;
      break;
    case Preset::vary_k:
      c.algorithms = {"te", "age", "ge", "unis"};
      c.k_values = desk ? std::vector<std::size_t>{2, 4, 6} : std::vector<std::size_t>{2, 4, 6, 8, 10};
      c.n_groups = 5;
      c.n_dims = 3;
      c.pareto_count = 2;
      if (desk) c.generation_epsilon = kDeskGenerationEpsilon;
      break;
    case Preset::weight_sweep:
      c.algorithms = {"eecb", "tel"};
      c.weights = kPaperWeights;
      c.n_groups = 5;
      c.n_arms = 5;
      c.n_dims = 3;
      c.replications = desk ? 5 : 20;
      c.delta_min = 0.05;
      break;
    case Preset::custom:
      c.algorithms = {"te"};
      c.replications = 1;
      break;
  }
  return c;
}

ExperimentConfig config_from_json(const json& j) {
  try {
    ExperimentConfig c;
    if (j.contains("preset")) {
      const Preset preset = preset_from_string(j.at("preset").get<std::string>());
      Scale scale = Scale::desk;
      if (j.contains("scale")) {
        const auto s = j.at("scale").get<std::string>();
        if (s == "paper") scale = Scale::paper;
        else if (s != "desk") throw ArgumentError("scale must be desk or paper");
      }
      c = preset_config(preset, scale);
    }
    read_if(j, "algorithms", c.algorithms);
    read_if(j, "delta", c.delta);
    read_if(j, "epsilon", c.epsilon);
    read_if(j, "beta_scale", c.beta_scale);
    read_if(j, "replications", c.replications);
    read_if(j, "master_seed", c.master_seed);
    if (j.contains("grid")) {
      const json& g = j.at("grid");
      read_if(g, "n_values", c.n_values);
      read_if(g, "k_values", c.k_values);
      read_if(g, "weights", c.weights);
      read_if(g, "weight_labels", c.weight_labels);
    }
    read_if(j, "n_groups", c.n_groups);
    read_if(j, "n_arms", c.n_arms);
    read_if(j, "n_dims", c.n_dims);
    if (j.contains("pareto_count")) c.pareto_count = j.at("pareto_count").get<std::size_t>();
    if (j.contains("generation_epsilon")) c.generation_epsilon = j.at("generation_epsilon").get<double>();
    read_if(j, "delta_min", c.delta_min);
    if (j.contains("pareto_gap_min")) {
      if (j.at("pareto_gap_min").is_null()) c.pareto_gap_min.reset();
      else c.pareto_gap_min = j.at("pareto_gap_min").get<double>();
    }
    if (j.contains("noise")) {
      c.noise.kind = noise_kind_from_string(j.at("noise").at("kind").get<std::string>());
      c.noise.scale = j.at("noise").at("scale").get<double>();
    }
    read_if(j, "max_rounds", c.max_rounds);
    read_if(j, "max_generation_attempts", c.max_generation_attempts);
    read_if(j, "workers", c.workers);
    read_if(j, "regenerate_instances", c.regenerate_instances);
    read_if(j, "record_timing", c.record_timing);
    if (j.contains("instance_file")) c.instance_file = j.at("instance_file").get<std::string>();
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    return c;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed experiment config: ") + e.what());
  }
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"preset", to_string(c.preset)},
         {"algorithms", c.algorithms},
         {"delta", c.delta},
         {"epsilon", c.epsilon},
         {"beta_scale", c.beta_scale},
         {"replications", c.replications},
         {"master_seed", c.master_seed},
         {"grid", {{"n_values", c.n_values}, {"k_values", c.k_values}, {"weights", c.weights},
                   {"weight_labels", c.weight_labels}}},
         {"n_groups", c.n_groups},
         {"n_arms", c.n_arms},
         {"n_dims", c.n_dims},
         {"delta_min", c.delta_min},
         {"noise", {{"kind", to_string(c.noise.kind)}, {"scale", c.noise.scale}}},
         {"max_rounds", c.max_rounds},
         {"max_generation_attempts", c.max_generation_attempts},
         {"regenerate_instances", c.regenerate_instances},
         {"record_timing", c.record_timing}};
  if (c.pareto_count) j["pareto_count"] = *c.pareto_count;
  if (c.pareto_gap_min) j["pareto_gap_min"] = *c.pareto_gap_min;
  if (c.generation_epsilon) j["generation_epsilon"] = *c.generation_epsilon;
  if (c.instance_file) j["instance_file"] = c.instance_file->string();
  return j;
}

std::uint64_t replication_stream(std::size_t replication) {
  // Stream 0 is reserved for instance generation.
  return splitmix64(replication + 0x9e3779b97f4a7c15ULL) | 1ULL;
}

std::pair<double, double> mean_and_std(const std::vector<double>& values) {
  if (values.empty()) return {0.0, 0.0};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  if (values.size() == 1) return {mean, 0.0};
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size() - 1))};
}

namespace {

struct GridPoint {
  std::string label;
  std::size_t n_groups;
  std::size_t n_arms;
  std::size_t n_dims;
  std::size_t pareto_count;
  std::vector<double> weights;  // weighted problem only
};

bool weighted_problem(const ExperimentConfig& c) {
  return std::any_of(c.algorithms.begin(), c.algorithms.end(), is_lbgi_algorithm);
}

void validate(const ExperimentConfig& c) {
  if (c.algorithms.empty()) throw ArgumentError("no algorithms configured");
  const bool lbgi = weighted_problem(c);
  for (const auto& a : c.algorithms) {
    if (!is_gpsi_algorithm(a) && !is_lbgi_algorithm(a)) throw ArgumentError("unknown algorithm '" + a + "'");
    if (is_gpsi_algorithm(a) == lbgi) throw ArgumentError("algorithms mix the Pareto and weighted problems");
  }
  if (c.replications < 1) throw ArgumentError("replications must be at least 1");
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw ArgumentError("delta must lie in (0,1)");
  if (!(c.epsilon > 0.0)) throw ArgumentError("epsilon must be positive");
  if (!(c.beta_scale > 0.0)) throw ArgumentError("beta_scale must be positive");
  switch (c.preset) {
    case Preset::vary_n:
      if (c.n_values.empty()) throw ArgumentError("vary_n needs grid.n_values");
      if (lbgi) throw ArgumentError("vary_n runs Pareto-set algorithms");
      break;
    case Preset::vary_k:
      if (c.k_values.empty()) throw ArgumentError("vary_k needs grid.k_values");
      if (lbgi) throw ArgumentError("vary_k runs Pareto-set algorithms");
      break;
    case Preset::weight_sweep:
      if (c.weights.empty()) throw ArgumentError("weight_sweep needs grid.weights");
      if (!lbgi) throw ArgumentError("weight_sweep runs weighted algorithms");
      break;
    case Preset::custom:
      if (lbgi && c.weights.empty()) throw ArgumentError("weighted algorithms need grid.weights");
      break;
  }
}

std::vector<GridPoint> grid_points(const ExperimentConfig& c) {
  std::vector<GridPoint> out;
  const auto pareto = [&](std::size_t n) {
    return c.pareto_count.value_or(static_cast<std::size_t>(std::ceil(0.3 * static_cast<double>(n))));
  };
  switch (c.preset) {
    case Preset::vary_n:
      for (std::size_t n : c.n_values) out.push_back({"N=" + std::to_string(n), n, c.n_arms, c.n_dims, pareto(n), {}});
      break;
    case Preset::vary_k:
      for (std::size_t k : c.k_values) {
        out.push_back({"K=" + std::to_string(k), c.n_groups, k, c.n_dims, c.pareto_count.value_or(2), {}});
      }
      break;
    case Preset::weight_sweep:
    case Preset::custom:
      if (c.weights.empty()) {
        out.push_back({"custom", c.n_groups, c.n_arms, c.n_dims, c.pareto_count.value_or(1), {}});
      }
      for (std::size_t w = 0; w < c.weights.size(); ++w) {
        const std::string label = w < c.weight_labels.size() ? c.weight_labels[w] : "w" + std::to_string(w + 1);
        out.push_back({label, c.n_groups, c.n_arms, c.n_dims, 1, c.weights[w]});
      }
      break;
  }
  return out;
}

GenerationOptions generation_options(const ExperimentConfig& c) {
  GenerationOptions o;
  o.max_attempts = c.max_generation_attempts;
  o.noise = c.noise;
  o.min_pareto_gap = c.pareto_gap_min;
  o.pareto_gap_epsilon = kTelEpsilon;
  return o;
}

// One instance for the grid point (or one per replication when regenerating).
Instance make_instance(const ExperimentConfig& c, const GridPoint& g, std::uint64_t stream) {
  if (c.instance_file) {
    Instance inst = load_instance(*c.instance_file);
    if (inst.label.empty()) inst.label = c.instance_file->stem().string();
    return inst;
  }
  RngStream rng(c.master_seed, stream);
  if (weighted_problem(c)) {
    // The weight sweep shares one instance across all weight vectors, so it
    // must satisfy the constraints under each of them.
    Instance inst = gen_random_lbgi_multi(g.n_groups, g.n_arms, g.n_dims, c.weights, c.delta_min, rng,
                                          generation_options(c));
    inst.label += "-s" + std::to_string(stream);
    return inst;
  }
  Instance inst = gen_random_gpsi(g.n_groups, g.n_arms, g.n_dims, g.pareto_count,
                                  c.generation_epsilon.value_or(c.epsilon), rng,
                                  generation_options(c));
  inst.label += "-s" + std::to_string(stream);
  return inst;
}

struct Task {
  std::size_t grid_index;
  std::size_t algorithm_index;
  std::size_t replication;
};

bool gpsi_correct(const GroupSet& answer, const ArmMeansTensor& truth, double epsilon) {
  const EfficiencyMatrix eff = efficiency(truth);
  const GroupSet exact = pareto_set(eff, 0.0);
  const GroupSet relaxed = pareto_set(eff, epsilon);
  return std::includes(answer.begin(), answer.end(), exact.begin(), exact.end()) &&
         std::includes(relaxed.begin(), relaxed.end(), answer.begin(), answer.end());
}

ExperimentRecord run_task(const ExperimentConfig& c, const GridPoint& g, const Instance& inst,
                          const std::string& algorithm, std::size_t replication) {
  ExperimentRecord rec;
  rec.algorithm = algorithm;
  rec.preset = to_string(c.preset);
  rec.grid_point = g.label;
  rec.replication = replication;
  rec.instance_label = inst.label;
  rec.seed = replication_stream(replication);
  rec.n_groups = inst.tensor.n_groups();
  rec.n_arms = inst.tensor.n_arms();
  rec.n_dims = inst.tensor.n_dims();
  rec.delta = c.delta;
  rec.beta_scale = c.beta_scale;
  rec.epsilon = c.epsilon;

  RngStream rng(c.master_seed, rec.seed);
  const auto start = std::chrono::steady_clock::now();
  try {
    if (is_gpsi_algorithm(algorithm)) {
      TeConfig te;
      te.delta = c.delta;
      te.epsilon = c.epsilon;
      te.beta_scale = c.beta_scale;
      te.max_rounds = c.max_rounds;
      GpsiResult r;
      if (algorithm == "te") r = run_te(inst, te, rng);
      else if (algorithm == "age") r = run_age(inst, te, rng);
      else if (algorithm == "ge") r = run_ge(inst, te, rng);
      else r = run_unis(inst, c.delta, c.epsilon, rng);
      rec.stopping_time = r.total_pulls;
      rec.rounds = r.rounds;
      rec.correct = gpsi_correct(r.recommended, inst.tensor, c.epsilon);
    } else {
      const std::size_t truth = weighted_best_group(efficiency(inst.tensor), g.weights);
      LbgiResult r;
      if (algorithm == "eecb") {
        EecbConfig ec;
        ec.weights = g.weights;
        ec.delta = c.delta;
        ec.beta_scale = c.beta_scale;
        ec.max_rounds = c.max_rounds;
        rec.epsilon = 0.0;
        r = run_eecb(inst, ec, rng);
      } else {
        TelConfig tc;
        tc.weights = g.weights;
        tc.delta = c.delta;
        tc.beta_scale = c.beta_scale;
        tc.max_rounds = c.max_rounds;
        rec.epsilon = tc.epsilon;
        r = run_tel(inst, tc, rng).lbgi;
      }
      rec.stopping_time = r.total_pulls;
      rec.rounds = r.rounds;
      rec.correct = r.recommended == truth;
    }
  } catch (const BudgetExhaustedError& e) {
    rec.status = "budget_exhausted";
    rec.stopping_time = e.state().total_pulls;
    rec.rounds = e.state().rounds;
    rec.correct = false;
  }
  if (c.record_timing) {
    rec.wall_clock_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  }
  return rec;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ExperimentRecord>& records) {
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> samples;
  for (const auto& r : records) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SummaryRow& s) {
      return s.grid_point == r.grid_point && s.algorithm == r.algorithm;
    });
    if (it == out.end()) {
      out.push_back({r.grid_point, r.algorithm, 0.0, 0.0, 0});
      samples.emplace_back();
      it = out.end() - 1;
    }
    if (r.status == "ok") samples[static_cast<std::size_t>(it - out.begin())].push_back(static_cast<double>(r.stopping_time));
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    std::tie(out[k].mean, out[k].std) = mean_and_std(samples[k]);
    out[k].n = samples[k].size();
  }
  return out;
}

json summary_to_json(const std::vector<SummaryRow>& summary) {
  json out = json::array();
  for (const auto& s : summary) {
    out.push_back({{"grid_point", s.grid_point}, {"algorithm", s.algorithm}, {"mean", s.mean}, {"std", s.std}, {"n", s.n}});
  }
  return out;
}

std::string records_to_csv(const std::vector<ExperimentRecord>& records) {
  std::ostringstream os;
  os << "algorithm,preset,grid_point,replication,instance_label,seed,N,K,D,epsilon,delta,beta_scale,"
        "stopping_time,rounds,correct,status,wall_clock_ms\n";
  for (const auto& r : records) {
    os << r.algorithm << ',' << r.preset << ',' << r.grid_point << ',' << r.replication << ',' << r.instance_label
       << ',' << r.seed << ',' << r.n_groups << ',' << r.n_arms << ',' << r.n_dims << ',' << format_real(r.epsilon)
       << ',' << format_real(r.delta) << ',' << format_real(r.beta_scale) << ',' << r.stopping_time << ','
       << r.rounds << ',' << (r.correct ? "true" : "false") << ',' << r.status << ','
       << format_real(r.wall_clock_ms) << '\n';
  }
  return os.str();
}

SweepResult run_sweep(const ExperimentConfig& config) {
  validate(config);
  const std::vector<GridPoint> grid = grid_points(config);
  SweepResult result;

  // Instances: the weight sweep shares one instance across all grid points.
  const bool shared_instance = config.preset == Preset::weight_sweep || config.preset == Preset::custom;
  std::vector<std::vector<Instance>> instances(grid.size());
  std::vector<bool> grid_ok(grid.size(), true);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    const std::size_t count = config.regenerate_instances ? config.replications : 1;
    try {
      for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t stream = config.regenerate_instances ? r + 1 : 0;
        if (shared_instance && g > 0) {
          instances[g].push_back(instances[0][r]);
        } else {
          instances[g].push_back(make_instance(config, grid[g], stream));
        }
      }
    } catch (const std::exception& e) {
      if (shared_instance && g > 0) throw;
      grid_ok[g] = false;
      result.failures.push_back({grid[g].label, e.what()});
    }
  }

  std::vector<Task> tasks;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (!grid_ok[g]) continue;
    for (std::size_t a = 0; a < config.algorithms.size(); ++a) {
      for (std::size_t r = 0; r < config.replications; ++r) tasks.push_back({g, a, r});
    }
  }

  std::vector<ExperimentRecord> records(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      try {
        const auto& pool = instances[task.grid_index];
        const Instance& inst = pool[config.regenerate_instances ? task.replication : 0];
        records[t] = run_task(config, grid[task.grid_index], inst, config.algorithms[task.algorithm_index],
                              task.replication);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  std::size_t workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<std::size_t>(tasks.size(), 1));
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
  }
  if (error) std::rethrow_exception(error);

  // Tasks are generated in (grid point, algorithm, replication) order, so the
  // record vector is already sorted.
  result.records = std::move(records);
  result.summary = summarize(result.records);

  if (!config.output_dir.empty()) {
    write_text_file(config.output_dir / "records.csv", records_to_csv(result.records));
    write_text_file(config.output_dir / "summary.json", summary_to_json(result.summary).dump(2) + "\n");
    json failures = json::array();
    for (const auto& f : result.failures) failures.push_back({{"grid_point", f.grid_point}, {"message", f.message}});
    json meta{{"config", config_to_json(config)},
              {"rng_algorithm", kRngAlgorithm},
              {"arm_mean_generation", "uniform [0,1) per entry, rejection sampled"},
              {"grid_failures", failures}};
    write_text_file(config.output_dir / "metadata.json", meta.dump(2) + "\n");
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (shared_instance && g > 0) break;
      for (const Instance& inst : instances[g]) {
        save_instance(inst, config.output_dir / "instances" / (inst.label + ".json"));
      }
    }
  }
  return result;
}

}  // namespace bgi
