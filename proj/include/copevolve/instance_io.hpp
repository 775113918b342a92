#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "copevolve/problem.hpp"

namespace copevolve {

/// A problem plus free-form metadata (seed, generator, target_solver, hardness, ...).
/// Unknown metadata keys survive a read/write cycle untouched.
struct Instance {
    Problem problem;
    nlohmann::json meta = nlohmann::json::object();
};

nlohmann::json to_json(const Problem& problem);
Problem problem_from_json(const nlohmann::json& j);

nlohmann::json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);

/// Parses instance text; malformed input raises DataError.
Instance parse_instance(const std::string& text);
std::string format_instance(const Instance& instance);

Instance read_instance(const std::filesystem::path& path);
void write_instance(const std::filesystem::path& path, const Instance& instance);

/// Writes via a temporary sibling file and rename, so readers never see partial output.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

} // namespace copevolve
