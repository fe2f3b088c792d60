#include "fragsel/manifest.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>

namespace fragsel {

namespace {

std::string utc_now_iso8601() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunManifest make_manifest(const Json& config_snapshot,
                          std::map<std::string, std::string> backends, long seed) {
    RunManifest m;
    m.config = config_snapshot;
    m.backends = std::move(backends);
    m.seed = seed;
    if (const char* pinned = std::getenv("FRAGSEL_TIMESTAMP")) {
        m.timestamp = pinned;
    } else {
        m.timestamp = utc_now_iso8601();
    }
    return m;
}

Json to_json(const RunManifest& manifest) {
    return Json{{"v", manifest.v},
                {"artifact_version", manifest.artifact_version},
                {"config", manifest.config},
                {"backends", manifest.backends},
                {"seed", manifest.seed},
                {"timestamp", manifest.timestamp}};
}

}  // namespace fragsel
