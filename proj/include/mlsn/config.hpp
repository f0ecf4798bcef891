#pragma once

#include <map>
#include <string>
#include <vector>

#include "mlsn/trainer.hpp"

namespace mlsn {

inline constexpr const char* kToolVersion = "mlsn 1.0.0";

// Resolved run settings: training hyperparameters plus data/split handling.
struct RunSettings {
    TrainConfig train;
    std::string dataset_path;
    std::string weak_pairs_path;  // empty = none
    std::size_t n_labeled = 0;    // 0 = use every training row as labeled
    double test_fraction = 0.25;
    bool stratified = true;
    bool standardize = true;
    bool fresh_split_per_seed = true;
};

// Flat key=value file; '#' starts a comment. Unknown keys are rejected.
std::map<std::string, std::string> read_config_file(const std::string& path);

// Applies key=value entries onto defaults. Collects one message per invalid
// or unknown field and throws ConfigError listing all of them.
RunSettings resolve_settings(const std::map<std::string, std::string>& kv);

// Every setting materialized back to key=value form (for the manifest).
std::map<std::string, std::string> settings_to_map(const RunSettings& s);

// FNV-1a digest of a file's bytes, hex-encoded.
std::string file_digest(const std::string& path);

// Reproducibility record written before a run starts.
void write_manifest(const std::string& path, const RunSettings& settings,
                    const std::vector<std::string>& input_files,
                    const std::vector<std::string>& artifact_paths);

}  // namespace mlsn
