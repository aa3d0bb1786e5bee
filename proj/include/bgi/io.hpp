#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "bgi/baselines.hpp"
#include "bgi/bounds.hpp"
#include "bgi/core.hpp"
#include "bgi/eecb.hpp"
#include "bgi/environment.hpp"
#include "bgi/triple_elimination.hpp"

namespace bgi {

// Instance files: {n_groups, n_arms_per_group, n_dims, means[N][K][D],
// noise: {kind, scale}, label}. Doubles are written with enough digits to
// round-trip exactly.
nlohmann::json instance_to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);
Instance load_instance(const std::filesystem::path& path);
void save_instance(const Instance& instance, const std::filesystem::path& path);

// Report and result encoders. Group and arm indices are 1-based and
// infinite values are written as the string "inf".
nlohmann::json gpsi_gaps_to_json(const GpsiGapReport& report);
nlohmann::json lbgi_gaps_to_json(const LbgiGapReport& report);
nlohmann::json bound_report_to_json(const BoundReport& report);
nlohmann::json gpsi_result_to_json(const GpsiResult& result);
nlohmann::json lbgi_result_to_json(const LbgiResult& result);

nlohmann::json real_to_json(double x);

// Reads a whole file; throws IoError with the path on failure.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace bgi
