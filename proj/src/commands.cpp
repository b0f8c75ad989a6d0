#include "pbb/commands.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <numbers>
#include <optional>

#include "pbb/calibration.hpp"
#include "pbb/csv_io.hpp"
#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"
#include "pbb/fitting.hpp"
#include "pbb/histogram.hpp"
#include "pbb/parallel.hpp"
#include "pbb/rng.hpp"
#include "pbb/steady_state.hpp"
#include "pbb/telegraph.hpp"

namespace pbb {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Collects warnings into the manifest while forwarding them to the
/// previous handler; restores it on destruction.
class WarningCapture {
public:
    explicit WarningCapture(RunManifest& m) : manifest_(m) {
        previous_ = set_warning_handler([this](const std::string& msg) {
            {
                const std::lock_guard lock(mutex_);
                manifest_.warnings.push_back(msg);
            }
            if (previous_) previous_(msg);
        });
    }
    ~WarningCapture() { set_warning_handler(previous_); }
    WarningCapture(const WarningCapture&) = delete;
    WarningCapture& operator=(const WarningCapture&) = delete;

private:
    RunManifest& manifest_;
    WarningHandler previous_;
    std::mutex mutex_;
};

class Run {
public:
    Run(const CommandContext& ctx, const std::string& command)
        : dir_(ctx.output_dir()), start_(std::chrono::steady_clock::now()), capture_(manifest_) {
        std::filesystem::create_directories(dir_);
        manifest_.command = command;
        manifest_.config_hash = sha256_hex(config_to_json(ctx.config));
        manifest_.g_over_kappa = ctx.config.g_over_kappa();
        manifest_.seed_base = ctx.config.trajectory.seed;
        manifest_.workers = ctx.workers;
    }

    RunManifest& manifest() { return manifest_; }
    std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }
    void add(const std::string& name) { add_file(manifest_, dir_, name); }

    RunManifest finish() {
        manifest_.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_manifest(dir_, manifest_);
        return manifest_;
    }

private:
    std::string dir_;
    std::chrono::steady_clock::time_point start_;
    RunManifest manifest_;
    WarningCapture capture_;
};

CsvMetadata base_metadata(const RunConfig& c) {
    return {{"g_over_kappa", format_double(c.g_over_kappa())},
            {"nu_delta_hz", format_double(c.physics.nu_delta)},
            {"nu_eta_hz", format_double(c.physics.nu_eta)},
            {"tool_version", kToolVersion}};
}

std::string optional_field(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

bool cancelled(const CommandContext& ctx) { return ctx.cancel && ctx.cancel->load(); }

std::string indexed(const char* stem, std::size_t k) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%05zu.csv", stem, k);
    return buf;
}

}  // namespace

RunManifest cmd_simulate(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    c.validate();
    Run run(ctx, "simulate");
    const SystemParams params = c.system_params();
    const Dims dims = c.dims();
    const TrajectoryConfig tc = c.trajectory_config();
    const std::size_t n = c.trajectory.n_trajectories;
    auto& m = run.manifest();
    m.tasks_total = n;
    for (std::size_t k = 0; k < n; ++k) m.seeds.push_back(derive_seed(c.trajectory.seed, k));

    EnsembleOptions opt;
    opt.workers = ctx.workers;
    opt.cancel = ctx.cancel;
    const auto records = run_ensemble(params, dims, tc, n, c.trajectory.seed, opt);
    m.tasks_completed = records.size();
    m.interrupted = records.size() < n;
    m.seeds.resize(records.size());

    CsvMetadata meta = base_metadata(c);
    meta["n_fock"] = std::to_string(dims.n_fock);
    meta["n_levels"] = std::to_string(dims.n_levels);
    meta["sample_interval_s"] = format_double(tc.sample_interval);
    for (std::size_t k = 0; k < records.size(); ++k) {
        const auto& rec = records[k];
        CsvMetadata tm = meta;
        tm["seed"] = std::to_string(rec.seed);
        tm["trajectory"] = std::to_string(k);
        const std::string tname = indexed("traj", k);
        const std::string jname = indexed("jumps", k);
        write_trajectory_csv(run.path(tname), rec, tm);
        write_jumps_csv(run.path(jname), rec);
        run.add(tname);
        run.add(jname);
        if (rec.truncation_flag) {
            m.truncation_warnings.push_back("trajectory " + std::to_string(k) +
                                            ": top Fock population reached " +
                                            format_double(rec.max_top_fock_population));
        }
    }
    if (!records.empty()) {
        const double discard = c.discard_initial();
        CsvMetadata sm = meta;
        sm["discard_initial_s"] = format_double(discard);
        sm["n_trajectories"] = std::to_string(records.size());
        const TimeSeries series = concatenate(records, discard);
        write_series_csv(run.path("series.csv"), series, sm);
        run.add("series.csv");
    }
    return run.finish();
}

RunManifest cmd_steady(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    c.validate();
    Run run(ctx, "steady");
    const Dims dims = c.dims();
    const DensityMatrix rho = steady_state_dense(c.system_params(), dims);
    const DensityObservables obs = observables(rho, dims);
    std::vector<std::string> header{"n_photon", "re_alpha", "im_alpha"};
    std::vector<std::string> row{format_double(obs.n_photon), format_double(obs.alpha.real()),
                                 format_double(obs.alpha.imag())};
    for (std::size_t u = 0; u < obs.populations.size(); ++u) {
        header.push_back("pop_" + std::to_string(u));
        row.push_back(format_double(obs.populations[u]));
    }
    header.emplace_back("top_fock_population");
    row.push_back(format_double(obs.top_fock_population));
    CsvMetadata meta = base_metadata(c);
    meta["n_fock"] = std::to_string(dims.n_fock);
    write_csv(run.path("steady.csv"), meta, header, {row});
    run.add("steady.csv");
    if (obs.top_fock_population > 1e-6) {
        run.manifest().truncation_warnings.push_back("steady state top Fock population " +
                                                     format_double(obs.top_fock_population));
    }
    run.manifest().tasks_total = run.manifest().tasks_completed = 1;
    return run.finish();
}

RunManifest cmd_mb_curve(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    c.validate();
    Run run(ctx, "mb-curve");
    const MBParams base = c.mb_params();
    const PhaseOptions po = c.phase_options();
    const auto etas = c.maxwell_bloch.eta_hz.values();
    std::vector<std::optional<std::vector<Branch>>> results(etas.size());
    const std::size_t done = parallel_for(
        etas.size(), ctx.workers,
        [&](std::size_t k) {
            MBParams p = base;
            p.eta = kTwoPi * etas[k];
            if (p.eta == 0.0) {
                results[k] = std::vector<Branch>{};
                return;
            }
            results[k] = solve_branches(p, default_intensity_cap(p), po.n_scan, po.scan);
        },
        ctx.cancel);

    std::vector<std::vector<std::string>> rows;
    std::size_t completed = 0;
    for (std::size_t k = 0; k < etas.size() && results[k]; ++k, ++completed) {
        for (const auto& b : *results[k]) {
            rows.push_back({format_double(etas[k]), format_double(b.intensity), to_string(b.stability),
                            format_double(b.residual), format_double(b.state.alpha.real()),
                            format_double(b.state.alpha.imag()), b.negative_slope ? "1" : "0",
                            std::to_string(b.shift_branch), format_double(b.spectral_abscissa)});
        }
    }
    CsvMetadata meta = base_metadata(c);
    meta.erase("nu_eta_hz");
    meta["level_count"] = std::to_string(base.level_count);
    write_csv(run.path("mb_curve.csv"), meta,
              {"nu_eta_hz", "intensity", "stability", "residual", "re_alpha", "im_alpha", "negative_slope",
               "shift_branch", "spectral_abscissa"},
              rows);
    run.add("mb_curve.csv");
    auto& m = run.manifest();
    m.tasks_total = etas.size();
    m.tasks_completed = completed;
    m.interrupted = done < etas.size() || cancelled(ctx);
    return run.finish();
}

RunManifest cmd_phase_diagram(const CommandContext& ctx) {
    const RunConfig& c = ctx.config;
    c.validate();
    Run run(ctx, "phase-diagram");
    const MBParams base = c.mb_params();
    const PhaseOptions po = c.phase_options();
    const auto d_hz = c.maxwell_bloch.delta_grid_hz.values();
    const auto e_hz = c.maxwell_bloch.eta_grid_hz.values();
    std::vector<double> d_rad, e_rad;
    for (const double v : d_hz) d_rad.push_back(kTwoPi * v);
    for (const double v : e_hz) e_rad.push_back(kTwoPi * v);

    PhaseDiagram out;
    out.delta = d_hz;
    out.eta = e_hz;
    out.cells.assign(d_hz.size() * e_hz.size(), Phase::dim);
    std::vector<char> filled(out.cells.size(), 0);
    const std::size_t done = parallel_for(
        out.cells.size(), ctx.workers,
        [&](std::size_t k) {
            out.cells[k] = phase_point(d_rad[k / e_hz.size()], e_rad[k % e_hz.size()], base, po);
            filled[k] = 1;
        },
        ctx.cancel);

    auto& m = run.manifest();
    m.tasks_total = out.cells.size();
    m.tasks_completed = done;
    m.interrupted = done < out.cells.size();
    // Keep only fully computed detuning rows when interrupted.
    std::size_t rows = 0;
    while (rows < d_hz.size()) {
        bool full = true;
        for (std::size_t j = 0; j < e_hz.size(); ++j) full = full && filled[rows * e_hz.size() + j];
        if (!full) break;
        ++rows;
    }
    out.delta.resize(rows);
    out.cells.resize(rows * e_hz.size());

    CsvMetadata meta = base_metadata(c);
    meta.erase("nu_eta_hz");
    meta.erase("nu_delta_hz");
    meta["level_count"] = std::to_string(base.level_count);
    meta["i_dim"] = format_double(po.i_dim);
    meta["i_bright"] = format_double(po.i_bright);
    write_phase_diagram_csv(run.path("phase_diagram.csv"), out, meta);
    run.add("phase_diagram.csv");
    return run.finish();
}

RunManifest cmd_analyze(const CommandContext& ctx, const std::vector<std::string>& files) {
    const RunConfig& c = ctx.config;
    c.validate();
    if (files.empty()) throw InvalidArgument("analyze: no series files given");
    Run run(ctx, "analyze");
    const ThresholdSpec spec = c.threshold_spec();
    std::vector<std::vector<std::string>> rows;
    std::vector<SweepPoint> sweep;
    for (const auto& f : files) {
        const SeriesFile sf = read_series_csv(f);
        const auto intervals = detect_switches(sf.series, spec);
        const DwellStatistics st = dwell_statistics(intervals, c.analysis.n_sections);
        const Histogram1D h = histogram_1d(sf.series.values, static_cast<std::size_t>(c.analysis.histogram_bins));
        const Bimodality bm = detect_bimodality(h, {c.analysis.prominence, c.analysis.valley});
        std::optional<double> eta;
        if (const auto it = sf.metadata.find("nu_eta_hz"); it != sf.metadata.end()) {
            try {
                eta = parse_double(it->second);
            } catch (const InvalidArgument& e) {
                throw ParseError(f, 1, std::string("bad nu_eta_hz metadata: ") + e.what());
            }
        }
        rows.push_back({std::filesystem::path(f).filename().string(), optional_field(eta), optional_field(st.t_dim),
                        optional_field(st.t_bright), optional_field(st.stderr_dim),
                        optional_field(st.stderr_bright), std::to_string(st.n_switches),
                        format_double(st.filling), bm.bimodal ? "1" : "0"});
        if (eta && *eta > 0.0) sweep.push_back({*eta, st});
    }
    write_csv(run.path("dwell.csv"), {{"tool_version", kToolVersion}},
              {"file", "nu_eta_hz", "t_dim_s", "t_bright_s", "stderr_dim_s", "stderr_bright_s", "n_switches",
               "filling", "bimodal"},
              rows);
    run.add("dwell.csv");
    run.manifest().tasks_total = run.manifest().tasks_completed = files.size();
    if (sweep.size() >= 2) {
        try {
            const HalfFilling hf = half_filling(sweep);
            write_csv(run.path("half_filling.csv"), {{"tool_version", kToolVersion}},
                      {"nu_eta_star_hz", "t_star_s"}, {{format_double(hf.eta_star), format_double(hf.t_star)}});
            run.add("half_filling.csv");
        } catch (const NoCrossingError& e) {
            run.manifest().warnings.push_back(std::string(e.what()) + " (t_dim/t_bright from " +
                                              format_double(e.first_ratio()) + " to " +
                                              format_double(e.last_ratio()) + ")");
            run.finish();
            throw;
        }
    }
    return run.finish();
}

RunManifest cmd_scaling(const CommandContext& ctx, const std::string& table_file) {
    const CsvTable t = read_csv(table_file);
    Run run(ctx, "scaling");
    const std::size_t xc = t.column("g_over_kappa", table_file);
    if (t.rows.size() < 3) throw InvalidArgument("scaling: need at least 3 rows");
    std::vector<double> x;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            x.push_back(parse_double(t.rows[r][xc]));
        } catch (const InvalidArgument& e) {
            throw ParseError(table_file, t.row_lines[r], e.what());
        }
    }
    std::vector<std::vector<std::string>> rows;
    for (const char* name : {"t_star", "n_star", "eta_star_over_g"}) {
        std::optional<std::size_t> col;
        std::optional<std::size_t> err_col;
        for (std::size_t i = 0; i < t.header.size(); ++i) {
            if (t.header[i] == name) col = i;
            if (t.header[i] == std::string(name) + "_err") err_col = i;
        }
        if (!col) continue;
        std::vector<double> y, e;
        for (std::size_t r = 0; r < t.rows.size(); ++r) {
            try {
                y.push_back(parse_double(t.rows[r][*col]));
                if (err_col) e.push_back(parse_double(t.rows[r][*err_col]));
            } catch (const InvalidArgument& ex) {
                throw ParseError(table_file, t.row_lines[r], ex.what());
            }
        }
        const ScalingFit fit = err_col ? fit_power_law(x, y, std::span<const double>(e)) : fit_power_law(x, y);
        rows.push_back({name, format_double(fit.exponent), optional_field(fit.exponent_stderr),
                        format_double(fit.prefactor), std::to_string(fit.n_points)});
    }
    if (rows.empty()) throw InvalidArgument("scaling: no t_star, n_star or eta_star_over_g column");
    write_csv(run.path("scaling.csv"), {{"tool_version", kToolVersion}},
              {"quantity", "exponent", "exponent_stderr", "prefactor", "n_points"}, rows);
    run.add("scaling.csv");
    run.manifest().tasks_total = run.manifest().tasks_completed = rows.size();
    return run.finish();
}

RunManifest cmd_calibrate(const CommandContext& ctx, const std::string& s21_file) {
    const RunConfig& c = ctx.config;
    c.validate();
    const std::string file = s21_file.empty() ? c.calibration.s21_file : s21_file;
    if (file.empty()) throw ConfigError("calibration.s21_file", "no S21 data file given");
    if (!(c.calibration.nu_kappa_fixed > 0.0)) throw ConfigError("calibration.nu_kappa_fixed", "must be > 0");
    const CsvTable t = read_csv(file);
    Run run(ctx, "calibrate");
    const std::size_t fc = t.column("freq_hz", file);
    const std::size_t mc = t.column("magnitude", file);
    std::vector<double> omega, mag;
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        try {
            omega.push_back(kTwoPi * parse_double(t.rows[r][fc]));
            mag.push_back(parse_double(t.rows[r][mc]));
        } catch (const InvalidArgument& e) {
            throw ParseError(file, t.row_lines[r], e.what());
        }
    }
    const S21Fit fit = fit_s21(omega, mag, kTwoPi * c.calibration.nu_kappa_fixed, kTwoPi * c.calibration.nu_kappa_int);
    std::vector<std::string> header{"nu_r_hz", "nu_kappa_vary_hz", "nu_kappa_total_hz", "residual_rms"};
    std::vector<std::string> row{format_double(fit.omega_r / kTwoPi), format_double(fit.kappa_vary / kTwoPi),
                                 format_double(fit.kappa_total / kTwoPi), format_double(fit.residual_norm)};
    if (c.calibration.p_in_w) {
        const DriveCalibration d = drive_calibration(*c.calibration.p_in_w, fit.omega_r,
                                                     kTwoPi * c.calibration.nu_kappa_fixed, fit.kappa_total);
        header.insert(header.end(), {"n_cav", "nu_eta_hz"});
        row.insert(row.end(), {format_double(d.n_cav), format_double(d.eta / kTwoPi)});
    }
    write_csv(run.path("calibration.csv"), {{"tool_version", kToolVersion}}, header, {row});
    run.add("calibration.csv");
    run.manifest().tasks_total = run.manifest().tasks_completed = 1;
    return run.finish();
}

}  // namespace pbb
