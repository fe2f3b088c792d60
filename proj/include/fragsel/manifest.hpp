#pragma once

#include <map>
#include <string>

#include "fragsel/core.hpp"
#include "fragsel/json_io.hpp"

namespace fragsel {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Reproducibility header embedded in every output file. The timestamp is the
// only field that varies between identical runs; set FRAGSEL_TIMESTAMP to pin
// it.
struct RunManifest {
    int v = 1;
    std::string artifact_version = kArtifactVersion;
    Json config;  // config snapshot (may be null for commands without one)
    std::map<std::string, std::string> backends;
    long seed = 0;
    std::string timestamp;
};

RunManifest make_manifest(const Json& config_snapshot,
                          std::map<std::string, std::string> backends, long seed);

Json to_json(const RunManifest& manifest);

}  // namespace fragsel
