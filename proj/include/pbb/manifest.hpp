#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace pbb {

inline constexpr const char* kToolVersion = "1.0.0";

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::string& path);

struct ManifestFile {
    std::string name;  ///< relative to the manifest's directory
    std::string sha256;
};

struct RunManifest {
    std::string tool_version = kToolVersion;
    std::string command;
    std::string config_hash;  ///< SHA-256 of the canonical config serialization
    double g_over_kappa = 0.0;
    std::uint64_t seed_base = 0;
    std::vector<std::uint64_t> seeds;
    int workers = 1;
    double wall_time_s = 0.0;
    std::vector<std::string> truncation_warnings;
    std::vector<std::string> warnings;
    std::vector<ManifestFile> files;
    bool interrupted = false;
    std::size_t tasks_completed = 0;
    std::size_t tasks_total = 0;
};

/// Hashes `name` inside `dir` and appends it to the file list.
void add_file(RunManifest& manifest, const std::string& dir, const std::string& name);

/// Writes dir/manifest.json.
void write_manifest(const std::string& dir, const RunManifest& manifest);
RunManifest read_manifest(const std::string& path);

/// Names of listed files whose current hash differs (or that are missing).
std::vector<std::string> verify_manifest(const std::string& dir);

}  // namespace pbb
