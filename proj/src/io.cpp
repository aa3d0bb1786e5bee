#include "bgi/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "bgi/errors.hpp"

namespace bgi {

using nlohmann::json;

json real_to_json(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (std::isnan(x)) return "nan";
  return x;
}

namespace {

json matrix_to_json(const std::vector<std::vector<double>>& m) {
  json out = json::array();
  for (const auto& row : m) {
    json r = json::array();
    for (double x : row) r.push_back(real_to_json(x));
    out.push_back(std::move(r));
  }
  return out;
}

json vector_to_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(real_to_json(x));
  return out;
}

json groups_to_json(const GroupSet& groups) {
  json out = json::array();
  for (std::size_t i : groups) out.push_back(i + 1);
  return out;
}

json group_map_to_json(const std::map<std::size_t, double>& m) {
  json out = json::object();
  for (const auto& [group, value] : m) out[std::to_string(group + 1)] = real_to_json(value);
  return out;
}

}  // namespace

json instance_to_json(const Instance& instance) {
  const ArmMeansTensor& t = instance.tensor;
  json means = json::array();
  for (std::size_t i = 0; i < t.n_groups(); ++i) {
    json group = json::array();
    for (std::size_t j = 0; j < t.n_arms(); ++j) {
      const auto arm = t.arm(i, j);
      group.push_back(std::vector<double>(arm.begin(), arm.end()));
    }
    means.push_back(std::move(group));
  }
  return json{{"n_groups", t.n_groups()},
              {"n_arms_per_group", t.n_arms()},
              {"n_dims", t.n_dims()},
              {"means", std::move(means)},
              {"noise", {{"kind", to_string(instance.noise.kind)}, {"scale", instance.noise.scale}}},
              {"label", instance.label}};
}

Instance instance_from_json(const json& j) {
  try {
    const auto n = j.at("n_groups").get<std::size_t>();
    const auto k = j.at("n_arms_per_group").get<std::size_t>();
    const auto d = j.at("n_dims").get<std::size_t>();
    const json& means = j.at("means");
    if (!means.is_array() || means.size() != n) throw DimensionError("means must have n_groups rows");
    std::vector<double> flat;
    flat.reserve(n * k * d);
    for (const json& group : means) {
      if (!group.is_array() || group.size() != k) throw DimensionError("each group must list n_arms_per_group arms");
      for (const json& arm : group) {
        if (!arm.is_array() || arm.size() != d) throw DimensionError("each arm must list n_dims means");
        for (const json& x : arm) flat.push_back(x.get<double>());
      }
    }
    Instance out;
    out.tensor = ArmMeansTensor(n, k, d, std::move(flat));
    const json& noise = j.at("noise");
    out.noise.kind = noise_kind_from_string(noise.at("kind").get<std::string>());
    out.noise.scale = noise.at("scale").get<double>();
    if (!(out.noise.scale >= 0.0)) throw ArgumentError("noise scale must be non-negative");
    out.label = j.value("label", std::string{});
    return out;
  } catch (const json::exception& e) {
    throw ArgumentError(std::string("malformed instance JSON: ") + e.what());
  }
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

Instance load_instance(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ArgumentError("cannot parse " + path.string() + ": " + e.what());
  }
  return instance_from_json(j);
}

void save_instance(const Instance& instance, const std::filesystem::path& path) {
  write_text_file(path, instance_to_json(instance).dump(2) + "\n");
}

json gpsi_gaps_to_json(const GpsiGapReport& r) {
  return json{{"problem", "gpsi"},
              {"epsilon", r.epsilon},
              {"pareto_set", groups_to_json(r.pareto_set)},
              {"group_gaps", vector_to_json(r.group_gaps)},
              {"plus_gaps", group_map_to_json(r.plus_gaps)},
              {"minus_gaps", group_map_to_json(r.minus_gaps)},
              {"arm_gaps", matrix_to_json(r.arm_gaps)},
              {"effective_gaps", matrix_to_json(r.effective_gaps)}};
}

json lbgi_gaps_to_json(const LbgiGapReport& r) {
  return json{{"problem", "lbgi"},
              {"weights", r.weights},
              {"best_group", r.best_group + 1},
              {"weighted_rewards", vector_to_json(r.weighted_rewards)},
              {"group_gaps", vector_to_json(r.group_gaps)},
              {"arm_alphas", matrix_to_json(r.arm_alphas)},
              {"arm_gaps", matrix_to_json(r.arm_gaps)},
              {"refined_arm_gaps", matrix_to_json(r.refined_arm_gaps)}};
}

json bound_report_to_json(const BoundReport& r) {
  json out{{"kind", r.kind},
           {"per_arm_terms", matrix_to_json(r.per_arm_terms)},
           {"group_terms", group_map_to_json(r.group_terms)},
           {"total", real_to_json(r.total)},
           {"constant_used", r.constant_used},
           {"log_confidence", real_to_json(r.log_confidence)}};
  if (!r.note.empty()) out["note"] = r.note;
  return out;
}

json gpsi_result_to_json(const GpsiResult& r) {
  return json{{"problem", "gpsi"},
              {"recommended", groups_to_json(r.recommended)},
              {"total_pulls", r.total_pulls},
              {"rounds", r.rounds},
              {"per_arm_pulls", r.per_arm_pulls},
              {"final_estimates", matrix_to_json(r.final_estimates)}};
}

json lbgi_result_to_json(const LbgiResult& r) {
  return json{{"problem", "lbgi"},
              {"recommended", r.recommended + 1},
              {"total_pulls", r.total_pulls},
              {"rounds", r.rounds},
              {"per_arm_pulls", r.per_arm_pulls}};
}

void write_trace_jsonl(const Trace& trace, std::ostream& out) {
  for (const TraceEvent& ev : trace) {
    out << json{{"round", ev.round}, {"event", ev.event}, {"payload", ev.payload}}.dump() << '\n';
  }
}

}  // namespace bgi
