#pragma once

#include <filesystem>
#include <string>

#include "frk/config.hpp"

namespace frk {

enum class Command { Simulate, Fit, Predict, Validate, Bench };

Command parse_command(const std::string& name);

// Executes one pipeline stage against a parsed configuration. Paths under
// out.* are resolved relative to out_dir; input paths are used as given.
// Returns the process exit status: 0 on success, 2 on configuration errors,
// 3 on numeric failures. Failures print a single machine-parsable line
// ("error: <category>: <reason>") to stderr.
int run_pipeline(Command cmd, Config config, const std::filesystem::path& out_dir = ".");

}  // namespace frk
