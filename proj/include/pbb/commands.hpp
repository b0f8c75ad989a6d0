#pragma once

#include <atomic>
#include <string>
#include <vector>

#include "pbb/config.hpp"
#include "pbb/manifest.hpp"

namespace pbb {

struct CommandContext {
    RunConfig config;
    int workers = 1;
    std::string out_dir;  ///< empty: config.output_dir
    const std::atomic<bool>* cancel = nullptr;

    std::string output_dir() const { return out_dir.empty() ? config.output_dir : out_dir; }
};

/// Every command writes its files and a manifest.json into the output
/// directory and returns the manifest.
RunManifest cmd_simulate(const CommandContext& ctx);
RunManifest cmd_steady(const CommandContext& ctx);
RunManifest cmd_mb_curve(const CommandContext& ctx);
RunManifest cmd_phase_diagram(const CommandContext& ctx);
RunManifest cmd_analyze(const CommandContext& ctx, const std::vector<std::string>& series_files);
RunManifest cmd_scaling(const CommandContext& ctx, const std::string& table_file);
/// `s21_file` overrides calibration.s21_file when non-empty.
RunManifest cmd_calibrate(const CommandContext& ctx, const std::string& s21_file);

}  // namespace pbb
