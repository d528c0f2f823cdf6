#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "opdyn/serialization.hpp"

namespace opdyn {

struct RunOptions {
  std::string out_dir;
  int jobs = 1;
  std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& command_names();
const std::vector<std::string>& scenario_names();
const std::vector<std::string>& adaptive_case_names();

// Strictly parses a config for `command` (variant = scenario or case name, may be empty when the config
// names it) and returns the resolved document with every default materialized.
json resolve_config(const std::string& command, const std::string& variant, const json& config,
                    std::optional<std::uint64_t> seed = std::nullopt);

// Resolves, runs, and writes config.json, data CSVs and summary.json into opt.out_dir. Returns the summary.
json run_command(const std::string& command, const std::string& variant, const json& config, const RunOptions& opt);

// For `validate`: the config itself names its command (and scenario or case).
json validate_config(const json& config, const std::string& variant = "",
                     std::optional<std::uint64_t> seed = std::nullopt);

json parse_json_text(const std::string& text, const std::string& where);

}  // namespace opdyn
