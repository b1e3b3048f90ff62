#pragma once
// Run manifests: what was run, on what, producing what.

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavekernel/error.hpp"
#include "wavekernel/hash.hpp"
#include "wavekernel/scenario.hpp"

#ifndef WAVEKERNEL_VERSION
#define WAVEKERNEL_VERSION "0.0.0"
#endif

namespace wkcli {

using nlohmann::json;

struct RunManifest {
    std::string command;
    std::vector<std::string> argv;
    std::optional<std::string> config;  // scenario snapshot in config syntax
    std::optional<std::uint64_t> fingerprint;
    std::vector<std::string> bank_keys;
    std::vector<std::string> inputs, outputs;
    json results = json::object();
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    std::time_t started = std::time(nullptr);

    json to_json() const {
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&started));
        json j;
        j["tool"] = "wavekernel";
        j["version"] = WAVEKERNEL_VERSION;
        j["command"] = command;
        j["argv"] = argv;
        j["config"] = config ? json(*config) : json(nullptr);
        j["medium_fingerprint"] = fingerprint ? json(wk::hex64(*fingerprint)) : json(nullptr);
        j["bank_keys"] = bank_keys;
        j["inputs"] = inputs;
        j["outputs"] = outputs;
        j["results"] = results;
        j["started_utc"] = stamp;
        j["wall_clock_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return j;
    }

    void write(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        std::ofstream out(path);
        if (!out) throw wk::ConfigError("cannot write manifest " + path.string());
        out << to_json().dump(2) << "\n";
    }
};

inline json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw wk::ConfigError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw wk::ConfigError(path.string() + ": " + e.what());
    }
}

/// Scenario stored in a manifest.
inline wk::Scenario scenario_of(const json& manifest, const std::string& name) {
    if (!manifest.contains("config") || !manifest["config"].is_string())
        throw wk::ConfigError(name + ": manifest carries no config snapshot");
    return wk::scenario_from(wk::config::parse(manifest["config"].get<std::string>(), name + "#config"));
}

}  // namespace wkcli
