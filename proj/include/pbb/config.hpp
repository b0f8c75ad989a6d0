#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pbb/maxwell_bloch.hpp"
#include "pbb/model.hpp"
#include "pbb/qjmc.hpp"
#include "pbb/telegraph.hpp"

namespace pbb {

/// Linear grid of `count` points from start to stop (Hz).
struct GridSpec {
    double start = 0.0;
    double stop = 0.0;
    int count = 1;

    std::vector<double> values() const;
    bool operator==(const GridSpec&) const = default;
};

/// Physical parameters; every frequency is nu = omega / 2 pi in Hz.
struct PhysicsConfig {
    double nu_g = 344e6;
    double nu_kappa_fwhm = 18.1e6;
    double nu_gamma1 = 0.0;
    double nu_gamma_phi1 = 50e3;
    std::optional<double> nu_gamma_phi2;  ///< semiclassical only; default 2 nu_gamma_phi1
    double nu_eta = 0.0;
    double nu_delta = 0.0;
    double nu_delta_an = -418e6;
    std::optional<double> nu_delta_f;  ///< semiclassical only; default nu_delta_an
    double n_th = 0.0;
    int n_levels = 3;
    std::optional<int> n_fock;  ///< unset: automatic from the expected photon number
    double n_fock_multiplier = 3.0;
    DephasingModel dephasing = DephasingModel::flux_linear;
    double flux_divisor = 8.0;
    double ej_hz = 0.0;
    double ec_hz = 0.0;
    bool charge_include_ground = true;
    double nu_qubit_detuning = 0.0;  ///< reserved; must be 0

    bool operator==(const PhysicsConfig&) const = default;
};

/// Durations in seconds; unset values default to multiples of 1/kappa_field.
struct TrajectorySettings {
    std::optional<double> t_final;          ///< default 50 / kappa_field
    std::optional<double> sample_interval;  ///< default 1 / kappa_field
    std::optional<double> discard_initial;  ///< default 10 / kappa_field
    std::optional<double> dt_max;
    double step_tolerance = 1e-6;
    std::size_t n_trajectories = 8;
    std::uint64_t seed = 1;

    bool operator==(const TrajectorySettings&) const = default;
};

struct AnalysisSettings {
    ThresholdMode mode = ThresholdMode::half_amplitude;
    std::optional<double> reference_high;
    double reference_low = 0.0;
    double k_sigma = 5.0;
    int debounce = 1;
    int n_sections = 5;
    int histogram_bins = 100;
    double noise_photons = 0.0;
    double prominence = 0.05;
    double valley = 0.5;

    bool operator==(const AnalysisSettings&) const = default;
};

struct MaxwellBlochSettings {
    int level_count = 3;
    double i_min = 1e-18;
    int n_scan = 3000;
    double i_dim = 1.0;
    double i_bright = 10.0;
    StabilityMethod stability = StabilityMethod::linearized;
    GridSpec eta_hz{1e6, 100e6, 100};     ///< mb-curve sweep
    GridSpec delta_grid_hz{-40e6, 40e6, 33};  ///< phase-diagram rows
    GridSpec eta_grid_hz{2e6, 120e6, 60};     ///< phase-diagram columns

    bool operator==(const MaxwellBlochSettings&) const = default;
};

struct CalibrationSettings {
    std::string s21_file;  ///< CSV with columns freq_hz, magnitude
    double nu_kappa_fixed = 0.0;
    double nu_kappa_int = 0.0;
    std::optional<double> p_in_w;

    bool operator==(const CalibrationSettings&) const = default;
};

struct RunConfig {
    PhysicsConfig physics;
    TrajectorySettings trajectory;
    AnalysisSettings analysis;
    MaxwellBlochSettings maxwell_bloch;
    CalibrationSettings calibration;
    std::string output_dir = "out";

    /// Throws ConfigError naming the offending field.
    void validate() const;

    double kappa_field() const;  ///< pi * nu_kappa_fwhm
    double g_over_kappa() const;  ///< nu_g / nu_kappa_fwhm
    SystemParams system_params() const;
    /// Configured n_fock, or max(ceil(multiplier * eta^2 / (kappa^2 + delta^2)), 8).
    int n_fock() const;
    Dims dims() const;
    TrajectoryConfig trajectory_config() const;
    double discard_initial() const;
    ThresholdSpec threshold_spec() const;
    MBParams mb_params() const;
    PhaseOptions phase_options() const;

    bool operator==(const RunConfig&) const = default;
};

/// JSON text with sections physics, trajectory, analysis, maxwell_bloch,
/// calibration and the key output_dir. Missing keys keep their defaults;
/// unknown keys are rejected.
RunConfig config_from_json(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::string& path);
/// Canonical serialization: every field written, unset optionals as null.
std::string config_to_json(const RunConfig& config);

}  // namespace pbb
