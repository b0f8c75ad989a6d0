// pbb: command-line front end for the photon-blockade-breakdown toolkit.

#include <atomic>
#include <csignal>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pbb/commands.hpp"
#include "pbb/config.hpp"
#include "pbb/error.hpp"
#include "pbb/parallel.hpp"

namespace {

std::atomic<bool> g_interrupted{false};

extern "C" void on_sigint(int) { g_interrupted.store(true); }

enum ExitCode { kOk = 0, kFailure = 1, kConfigError = 2, kNumericalError = 3, kInterrupted = 130 };

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Photon-blockade-breakdown simulator and telegraph analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    int workers = 0;
    std::string out_dir;
    app.add_option("--config", config_path, "JSON run configuration (defaults apply when omitted)");
    app.add_option("--seed", seed, "Override trajectory.seed (ensemble seed base)");
    app.add_option("--workers", workers, "Worker threads (default: PBB_WORKERS or hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--out", out_dir, "Output directory (overrides output_dir)");

    auto* simulate = app.add_subcommand("simulate", "Quantum-jump Monte Carlo ensemble");
    auto* steady = app.add_subcommand("steady", "Liouvillian steady state (total dimension <= 256)");
    auto* mb_curve = app.add_subcommand("mb-curve", "Maxwell-Bloch branches over the eta sweep");
    auto* phase = app.add_subcommand("phase-diagram", "Maxwell-Bloch phase map on the delta-eta grid");
    auto* analyze = app.add_subcommand("analyze", "Dwell-time statistics and half filling of series CSVs");
    std::vector<std::string> series_files;
    analyze->add_option("files", series_files, "Series or trajectory CSV files")->required();
    auto* scaling = app.add_subcommand("scaling", "Power-law fits of g/kappa scaling tables");
    std::string scaling_file;
    scaling->add_option("table", scaling_file, "CSV with g_over_kappa and t_star/n_star/eta_star_over_g")
        ->required();
    auto* calibrate = app.add_subcommand("calibrate", "S21 fit and drive calibration");
    std::string s21_file;
    calibrate->add_option("--s21", s21_file, "CSV with freq_hz, magnitude (overrides calibration.s21_file)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    std::signal(SIGINT, on_sigint);
    try {
        pbb::CommandContext ctx;
        ctx.config = config_path.empty() ? pbb::RunConfig{} : pbb::load_config(config_path);
        if (seed) ctx.config.trajectory.seed = *seed;
        if (!out_dir.empty()) ctx.config.output_dir = out_dir;
        ctx.config.validate();
        ctx.workers = workers > 0 ? workers : pbb::default_worker_count();
        ctx.cancel = &g_interrupted;

        pbb::RunManifest m;
        if (simulate->parsed()) {
            m = pbb::cmd_simulate(ctx);
        } else if (steady->parsed()) {
            m = pbb::cmd_steady(ctx);
        } else if (mb_curve->parsed()) {
            m = pbb::cmd_mb_curve(ctx);
        } else if (phase->parsed()) {
            m = pbb::cmd_phase_diagram(ctx);
        } else if (analyze->parsed()) {
            m = pbb::cmd_analyze(ctx, series_files);
        } else if (scaling->parsed()) {
            m = pbb::cmd_scaling(ctx, scaling_file);
        } else if (calibrate->parsed()) {
            m = pbb::cmd_calibrate(ctx, s21_file);
        }
        for (const auto& w : m.truncation_warnings) std::cerr << "warning: truncation: " << w << '\n';
        std::cerr << m.command << ": wrote " << m.files.size() << " file(s) to " << ctx.output_dir() << '\n';
        if (m.interrupted) {
            std::cerr << m.command << ": interrupted after " << m.tasks_completed << " of " << m.tasks_total
                      << " tasks\n";
            return kInterrupted;
        }
        return kOk;
    } catch (const pbb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const pbb::ParseError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kConfigError;
    } catch (const pbb::InvalidArgument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfigError;
    } catch (const pbb::DimensionError& e) {
        std::cerr << "invalid dimensions: " << e.what() << '\n';
        return kConfigError;
    } catch (const pbb::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kFailure;
    }
}
