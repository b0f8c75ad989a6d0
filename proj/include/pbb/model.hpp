#pragma once

#include <string>
#include <vector>

#include "pbb/hilbert.hpp"

namespace pbb {

enum class DephasingModel { none, flux_linear, charge_dispersion };

std::string to_string(DephasingModel model);
DephasingModel dephasing_model_from_string(const std::string& name);

struct DephasingSpec {
    DephasingModel model = DephasingModel::none;
    /// Flux-noise model: gamma_phi_v = v * gamma_phi1 / flux_divisor.
    double flux_divisor = 8.0;
    /// Charge-dispersion model energies (E/h in Hz).
    double ej_hz = 0.0;
    double ec_hz = 0.0;
    /// Whether the charge-dispersion model also dephases level 0.
    bool charge_include_ground = true;
};

/// Physical rates in angular units (rad/s). kappa_field is the field
/// (amplitude) decay rate, i.e. half the angular FWHM linewidth.
struct SystemParams {
    double g1 = 0.0;
    double kappa_field = 1.0;
    double gamma1 = 0.0;
    double gamma_phi1 = 0.0;
    double eta = 0.0;
    double delta = 0.0;     ///< drive detuning omega - omega_R
    double delta_an = 0.0;  ///< anharmonicity h2 - 2 h1 (negative for a transmon)
    double n_th = 0.0;
    int n_levels = 2;
    DephasingSpec dephasing{};

    /// Throws InvalidArgument when a rate is out of range.
    void validate() const;
};

/// Rotating-frame diagonal energy of transmon level u:
/// -u*delta + delta_an * u(u-1)/2.
double transmon_diagonal(const SystemParams& params, int u);

/// Per-level dephasing rates gamma_phi_v for v = 0..n_levels-1.
std::vector<double> dephasing_rates(const SystemParams& params);

SparseOperator build_hamiltonian(const SystemParams& params, const Dims& dims);

struct JumpOperator {
    SparseOperator op;
    std::string label;
};

/// Mode decay (and thermal absorption when n_th > 0), adjacent-level
/// relaxation, and per-level dephasing. Zero-rate channels are omitted.
std::vector<JumpOperator> build_jump_operators(const SystemParams& params, const Dims& dims);

/// H - (i/2) sum_i L_i^dagger L_i
SparseOperator effective_hamiltonian(const SparseOperator& hamiltonian,
                                     const std::vector<JumpOperator>& jumps);

/// |eps_v / eps_1| for v = 0..n_levels-1 from the asymptotic transmon
/// charge-dispersion formula. Warns when EJ/EC <= 20.
std::vector<double> charge_dispersion_weights(double ej, double ec, int n_levels);

/// Operators on the full space, transmon-major.
SparseOperator mode_annihilation(const Dims& dims);
SparseOperator number_operator(const Dims& dims);
SparseOperator level_projector(const Dims& dims, int u);

}  // namespace pbb
