#pragma once

// JSON run configuration. Every command has a fixed key set; unknown keys
// are rejected before any computation. Keys marked sweepable accept either a
// scalar or an array; arrays form a Cartesian product of jobs.

#include <json.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace dosc::cli {

using Json = nlohmann::json;

// Raised for schema violations; the CLI exits with status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr std::size_t default_max_jobs = 256;

struct RunConfig {
    std::string command;
    Json document;          // the validated config with defaults filled in
    std::vector<Json> jobs;  // one scalar-valued parameter set per sweep point
};

const std::vector<std::string>& known_commands();

RunConfig parse_config(const Json& document, std::size_t max_jobs = default_max_jobs);
RunConfig load_config(const std::string& path, std::size_t max_jobs = default_max_jobs);

}  // namespace dosc::cli
