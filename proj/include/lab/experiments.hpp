#pragma once

#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "lab/report.hpp"

namespace lab {

using Json = nlohmann::ordered_json;

/// Everything one experiment emits. Files are written relative to the bundle directory.
struct ExperimentOutput {
    std::string name, kind;
    std::vector<std::pair<std::string, Table>> tables;       ///< file name, table
    std::vector<std::pair<std::string, std::string>> plots;  ///< file name, svg text
    Json summary = Json::object();
};

/// Names accepted by the `kind` key of an experiment section.
std::vector<std::string> experiment_kinds();

/// Runs one `[experiment.<name>]` section. The kind defaults to the section name. Unknown
/// keys raise ConfigError with the offending line. `seed` overrides the global seed.
ExperimentOutput run_experiment(const ConfigSection& section, std::uint64_t global_seed);

struct BundleResult {
    std::vector<ExperimentOutput> experiments;
    Json manifest;
    std::vector<std::string> files;  ///< written paths, manifest last
};

/// Parses, validates every section up front, runs the experiments in file order and writes
/// CSV, SVG and manifest.json into out_dir. `progress` (if set) receives each experiment name
/// before it runs.
BundleResult run_config(const Config& cfg, const std::string& out_dir,
                        const std::function<void(const std::string&)>& progress = {});

/// Text of the canonical configuration covering the acceptance suite.
std::string canonical_config();

std::string library_version();

}  // namespace lab
