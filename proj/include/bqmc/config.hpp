#pragma once

#include "bqmc/estimator.hpp"

#include <filesystem>
#include <string_view>
#include <vector>

namespace bqmc {

/// Parses the experiment file format (see README): `[section]` headers,
/// `key = value` lines, `#` comments. Keys in `[defaults]` apply to every
/// other section; each other section is one experiment named after it.
/// Throws ConfigError naming the line and field.
std::vector<ExperimentConfig> parse_config(std::string_view text);
std::vector<ExperimentConfig> load_config(const std::filesystem::path& file);

}  // namespace bqmc
