#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "pbb/hilbert.hpp"
#include "pbb/model.hpp"
#include "pbb/ode.hpp"

namespace pbb {

/// Semiclassical parameters (rad/s). level_count selects the two-level
/// reduction (f-state terms dropped) or the three-level ladder.
struct MBParams {
    double g1 = 0.0;
    double g2 = 0.0;
    double kappa = 1.0;  ///< field decay rate
    double gamma1 = 0.0;
    double gamma_phi1 = 0.0;
    double gamma_phi2 = 0.0;
    double eta = 0.0;
    double delta = 0.0;
    double delta_f = 0.0;  ///< e-f detuning offset; defaults to the anharmonicity
    int level_count = 3;

    /// g2 = sqrt(2) g1, gamma_phi2 = 2 gamma_phi1, delta_f = delta_an.
    static MBParams from_system(const SystemParams& sys, int level_count);

    /// Two levels without relaxation (dephasing does not enter the
    /// two-level equations): the Bloch vector length is conserved and
    /// closes the steady-state equations.
    bool neoclassical() const noexcept { return level_count == 2 && gamma1 == 0.0; }
    /// max(kappa, g1): the rate used to make residuals dimensionless.
    double rate_scale() const noexcept;
    void validate() const;
};

struct MBState {
    cplx alpha{0.0, 0.0};
    cplx s_ge{0.0, 0.0};
    cplx s_ef{0.0, 0.0};
    cplx s_gf{0.0, 0.0};
    double s_gg = 1.0;
    double s_ee = 0.0;
    double s_ff = 0.0;

    double intensity() const noexcept { return std::norm(alpha); }
};

/// Time derivative of every field of `state`. For three levels s_ff obeys
/// its own Heisenberg equation, so the population derivatives sum to zero
/// identically; for two levels the f fields are ignored and stay zero.
MBState mb_rhs(const MBState& state, const MBParams& params);

/// Real coordinates used for integration and linearization:
/// (Re a, Im a, Re s_ge, Im s_ge, s_gg) for two levels, and additionally
/// (Re s_ef, Im s_ef, Re s_gf, Im s_gf, s_ee) for three; s_ee (two-level)
/// and s_ff (three-level) follow from completeness.
Eigen::VectorXd to_vector(const MBState& state, int level_count);
MBState from_vector(const Eigen::VectorXd& v, int level_count);
Eigen::VectorXd mb_rhs_vector(const Eigen::VectorXd& v, const MBParams& params);

/// ||mb_rhs||_inf / (max(kappa, g1) * max(1, |alpha|)).
double steady_residual(const MBState& state, const MBParams& params);

/// Steady-state transmon variables for a prescribed field amplitude
/// (Eq. 9a is not imposed). `shift_branch` (+1/-1) selects the Bloch-vector
/// orientation in the neoclassical limit and is ignored otherwise.
MBState atom_steady_state(cplx alpha, const MBParams& params, int shift_branch = +1);

/// Complex dispersive shift Sigma(I) = -(g1 s_ge + g2 s_ef) / alpha.
/// Throws SingularityError where the elimination is singular.
cplx dispersive_shift(double intensity, const MBParams& params, int shift_branch = +1);

/// I |Sigma(I) + i delta - kappa|^2 - eta^2.
double intensity_residual(double intensity, const MBParams& params, int shift_branch = +1);

/// Full fixed point for an intensity root: alpha from Eq. 9a, then the
/// transmon variables at that alpha, polished by Newton steps on the full
/// system.
MBState reconstruct_fixed_point(double intensity, const MBParams& params, int shift_branch = +1);

enum class Stability { stable, unstable, unphysical };
const char* to_string(Stability s);

enum class StabilityMethod { linearized, integrate };

struct StabilityOptions {
    StabilityMethod method = StabilityMethod::linearized;
    double horizon_kappa = 50.0;  ///< integration horizon in units of 1/kappa
    double perturbation = 1e-3;
    double tolerance = 1e-4;
    std::uint64_t seed = 1;
};

struct Branch {
    double intensity = 0.0;
    Stability stability = Stability::stable;
    double residual = 0.0;
    MBState state{};
    int shift_branch = +1;
    bool negative_slope = false;
    bool dynamically_stable = true;
    bool limit_cycle = false;
    double spectral_abscissa = 0.0;  ///< leading Re(lambda) / rate_scale
};

struct BranchScanOptions {
    double i_min = 1e-18;
    StabilityOptions stability{};
};

/// Log-spaced scan of intensity_residual over [i_min, i_max], bisection of
/// every sign change, de-duplication, and stability classification.
std::vector<Branch> solve_branches(const MBParams& params, double i_max, int n_scan,
                                   const BranchScanOptions& options = {});

/// Slope test (dI/d eta < 0 is unphysical) and dynamical test; the
/// dynamical result wins when they disagree. Updates the branch flags.
Stability classify_stability(Branch& branch, const MBParams& params,
                             const StabilityOptions& options = {});

/// Jacobian of mb_rhs_vector at `state` (exact for this quadratic system
/// up to rounding: central differences).
Eigen::MatrixXd mb_jacobian(const MBState& state, const MBParams& params);

/// Integrates the semiclassical equations for time t_end (s).
MBState integrate_mb(const MBState& start, const MBParams& params, double t_end,
                     const ode::AdaptiveOptions& options = {});

enum class Phase { dim, bright, bistable };
char phase_symbol(Phase p);
Phase phase_from_symbol(char c);

struct PhaseOptions {
    double i_dim = 1.0;
    double i_bright = 10.0;
    int n_scan = 3000;
    BranchScanOptions scan{};
};

/// Upper scan bound used by phase_point: 4 eta^2 / kappa^2 + 100.
double default_intensity_cap(const MBParams& params);

Phase phase_point(double delta, double eta, const MBParams& params, const PhaseOptions& options = {});

struct PhaseDiagram {
    std::vector<double> delta;
    std::vector<double> eta;
    std::vector<Phase> cells;  ///< row-major: cells[i_delta * eta.size() + i_eta]

    Phase at(std::size_t i_delta, std::size_t i_eta) const { return cells[i_delta * eta.size() + i_eta]; }
};

PhaseDiagram phase_diagram(const std::vector<double>& delta_grid, const std::vector<double>& eta_grid,
                           const MBParams& params, const PhaseOptions& options = {}, int workers = 1);

}  // namespace pbb
