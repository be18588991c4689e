#pragma once

#include "dosc/cli/config.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace dosc::cli {

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    unsigned workers = 1;
    std::int64_t seed = 0;  // reserved; every computation is deterministic
    std::string config_path;
};

struct RunSummary {
    std::vector<std::string> outputs;  // file names relative to out_dir
    Json diagnostics = Json::object();
};

std::string version();

// Runs every job of `config`, writing CSVs and sidecars into out_dir.
RunSummary run(const RunConfig& config, const CommandOptions& options);

// 0 on success; 2 config/argument, 3 physics gate, 4 numerical failure.
int exit_code_for(const std::exception_ptr& error);

// Parses flags, runs, writes out_dir/run.json, returns the exit status.
int main_entry(int argc, char** argv);

}  // namespace dosc::cli
