#include "pbb/maxwell_bloch.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include <Eigen/Eigenvalues>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"
#include "pbb/parallel.hpp"
#include "pbb/rng.hpp"

namespace pbb {

namespace {

constexpr double kResidualLimit = 1e-8;
constexpr double kMarginal = 1e-10;

int state_size(int level_count) { return level_count == 2 ? 5 : 10; }

void check_level_count(int level_count) {
    if (level_count != 2 && level_count != 3) {
        throw InvalidArgument("MBParams: level_count must be 2 or 3, got " + std::to_string(level_count));
    }
}

/// Neoclassical closed form: Sigma = b i g^2 / sqrt(delta^2 + 4 g^2 I).
MBState neoclassical_atom(cplx alpha, const MBParams& p, int branch) {
    MBState s;
    s.alpha = alpha;
    s.s_ef = s.s_gf = cplx{0.0, 0.0};
    s.s_ff = 0.0;
    if (p.g1 == 0.0) {
        s.s_ge = 0.0;
        s.s_gg = 1.0;
        s.s_ee = 0.0;
        return s;
    }
    const double intensity = std::norm(alpha);
    const double d = std::sqrt(p.delta * p.delta + 4.0 * p.g1 * p.g1 * intensity);
    if (d == 0.0) {
        throw SingularityError("neoclassical elimination is singular at zero detuning and zero field",
                               intensity);
    }
    const cplx sigma{0.0, branch * p.g1 * p.g1 / d};
    const double w = branch * p.delta / d;  // s_ee - s_gg
    s.s_ge = -sigma * alpha / p.g1;
    s.s_gg = 0.5 * (1.0 - w);
    s.s_ee = 0.5 * (1.0 + w);
    return s;
}

/// Affine steady-state equations of the transmon at fixed alpha, rows
/// scaled by 1/rate_scale. Unknown order: (Re s_ge, Im s_ge, s_gg) for two
/// levels; (Re s_ge, Im s_ge, Re s_ef, Im s_ef, Re s_gf, Im s_gf, s_gg, s_ee)
/// for three.
MBState dissipative_atom(cplx alpha, const MBParams& p) {
    const double sc = 1.0 / p.rate_scale();
    const double ar = alpha.real();
    const double ai = alpha.imag();
    const double g1 = p.g1 * sc;
    const double g2 = p.g2 * sc;
    const double gm = p.gamma1 * sc;
    const double dl = p.delta * sc;
    MBState s;
    s.alpha = alpha;

    if (p.level_count == 2) {
        Eigen::Matrix3d a;
        Eigen::Vector3d c;
        a << -gm, -dl, 2.0 * g1 * ar,
             dl, -gm, 2.0 * g1 * ai,
             -2.0 * g1 * ar, -2.0 * g1 * ai, -gm;
        c << -g1 * ar, -g1 * ai, gm;
        Eigen::FullPivLU<Eigen::Matrix3d> lu(a);
        if (!lu.isInvertible()) {
            throw SingularityError("two-level steady-state elimination is singular", std::norm(alpha));
        }
        const Eigen::Vector3d x = lu.solve(-c);
        s.s_ge = {x[0], x[1]};
        s.s_gg = x[2];
        s.s_ee = 1.0 - x[2];
        s.s_ef = s.s_gf = cplx{0.0, 0.0};
        s.s_ff = 0.0;
        return s;
    }

    const double gef = (p.gamma1 + 4.0 * (p.gamma_phi1 + p.gamma_phi2)) * sc;
    const double def = (p.delta - p.delta_f) * sc;
    const double ggf = (p.gamma1 + 4.0 * p.gamma_phi2) * sc;
    const double dgf = (2.0 * p.delta - p.delta_f) * sc;
    Eigen::Matrix<double, 8, 8> a = Eigen::Matrix<double, 8, 8>::Zero();
    Eigen::Matrix<double, 8, 1> c = Eigen::Matrix<double, 8, 1>::Zero();
    enum { XGE, YGE, XEF, YEF, XGF, YGF, SGG, SEE };
    // s_ge
    a(0, XGE) = -gm; a(0, YGE) = -dl; a(0, XGF) = -g2 * ar; a(0, YGF) = -g2 * ai;
    a(0, SGG) = g1 * ar; a(0, SEE) = -g1 * ar;
    a(1, XGE) = dl; a(1, YGE) = -gm; a(1, XGF) = g2 * ai; a(1, YGF) = -g2 * ar;
    a(1, SGG) = g1 * ai; a(1, SEE) = -g1 * ai;
    // s_ef, with s_ff = 1 - s_gg - s_ee
    a(2, XEF) = -gef; a(2, YEF) = -def; a(2, XGF) = g1 * ar; a(2, YGF) = g1 * ai;
    a(2, SGG) = g2 * ar; a(2, SEE) = 2.0 * g2 * ar; c[2] = -g2 * ar;
    a(3, XEF) = def; a(3, YEF) = -gef; a(3, XGF) = -g1 * ai; a(3, YGF) = g1 * ar;
    a(3, SGG) = g2 * ai; a(3, SEE) = 2.0 * g2 * ai; c[3] = -g2 * ai;
    // s_gf
    a(4, XGF) = -ggf; a(4, YGF) = -dgf; a(4, XEF) = -g1 * ar; a(4, YEF) = g1 * ai;
    a(4, XGE) = g2 * ar; a(4, YGE) = -g2 * ai;
    a(5, XGF) = dgf; a(5, YGF) = -ggf; a(5, XEF) = -g1 * ai; a(5, YEF) = -g1 * ar;
    a(5, XGE) = g2 * ai; a(5, YGE) = g2 * ar;
    // s_gg
    a(6, SEE) = gm; a(6, XGE) = -2.0 * g1 * ar; a(6, YGE) = -2.0 * g1 * ai;
    // s_ee
    a(7, XGE) = 2.0 * g1 * ar; a(7, YGE) = 2.0 * g1 * ai; a(7, XEF) = -2.0 * g2 * ar;
    a(7, YEF) = -2.0 * g2 * ai; a(7, SEE) = -2.0 * gm; a(7, SGG) = -gm; c[7] = gm;

    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(a);
    if (!lu.isInvertible()) {
        throw SingularityError("three-level steady-state elimination is singular", std::norm(alpha));
    }
    const Eigen::Matrix<double, 8, 1> x = lu.solve(-c);
    s.s_ge = {x[XGE], x[YGE]};
    s.s_ef = {x[XEF], x[YEF]};
    s.s_gf = {x[XGF], x[YGF]};
    s.s_gg = x[SGG];
    s.s_ee = x[SEE];
    s.s_ff = 1.0 - x[SGG] - x[SEE];
    return s;
}

double max_abs(const MBState& d, int level_count) {
    double m = std::max({std::abs(d.alpha), std::abs(d.s_ge), std::abs(d.s_gg), std::abs(d.s_ee)});
    if (level_count == 3) m = std::max({m, std::abs(d.s_ef), std::abs(d.s_gf), std::abs(d.s_ff)});
    return m;
}

/// Newton refinement on the full real system; keeps the best iterate.
MBState polish(const MBState& start, const MBParams& p) {
    MBState best = start;
    double best_res = steady_residual(start, p);
    if (p.neoclassical() || best_res < 1e-13) return best;
    Eigen::VectorXd v = to_vector(start, p.level_count);
    for (int it = 0; it < 4; ++it) {
        const Eigen::MatrixXd j = mb_jacobian(from_vector(v, p.level_count), p);
        const Eigen::VectorXd f = mb_rhs_vector(v, p);
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(j);
        if (!lu.isInvertible()) break;
        v -= lu.solve(f);
        const MBState cand = from_vector(v, p.level_count);
        const double r = steady_residual(cand, p);
        if (!(r < best_res)) break;
        best = cand;
        best_res = r;
        if (r < 1e-14) break;
    }
    return best;
}

double slope_derivative(const Branch& b, const MBParams& p) {
    if (b.intensity <= 0.0) return 1.0;
    const double h = 1e-5 * b.intensity;
    try {
        return (intensity_residual(b.intensity + h, p, b.shift_branch) -
                intensity_residual(b.intensity - h, p, b.shift_branch)) /
               (2.0 * h);
    } catch (const SingularityError&) {
        return 1.0;
    }
}

}  // namespace

MBParams MBParams::from_system(const SystemParams& sys, int level_count) {
    check_level_count(level_count);
    MBParams p;
    p.g1 = sys.g1;
    p.g2 = std::sqrt(2.0) * sys.g1;
    p.kappa = sys.kappa_field;
    p.gamma1 = sys.gamma1;
    p.gamma_phi1 = sys.gamma_phi1;
    p.gamma_phi2 = 2.0 * sys.gamma_phi1;
    p.eta = sys.eta;
    p.delta = sys.delta;
    p.delta_f = sys.delta_an;
    p.level_count = level_count;
    return p;
}

double MBParams::rate_scale() const noexcept { return std::max(kappa, std::abs(g1)); }

void MBParams::validate() const {
    check_level_count(level_count);
    const auto finite = [](double x) { return std::isfinite(x); };
    if (!(kappa > 0.0 && finite(kappa))) throw InvalidArgument("MBParams: kappa must be positive");
    if (!(gamma1 >= 0.0 && gamma_phi1 >= 0.0 && gamma_phi2 >= 0.0)) {
        throw InvalidArgument("MBParams: decay and dephasing rates must be non-negative");
    }
    if (!(finite(g1) && finite(g2) && finite(eta) && finite(delta) && finite(delta_f) &&
          finite(gamma1) && finite(gamma_phi1) && finite(gamma_phi2))) {
        throw InvalidArgument("MBParams: non-finite parameter");
    }
}

MBState mb_rhs(const MBState& s, const MBParams& p) {
    const cplx i{0.0, 1.0};
    const cplx a = s.alpha;
    const cplx ac = std::conj(a);
    MBState d;
    if (p.level_count == 2) {
        const double s_ee = 1.0 - s.s_gg;
        d.alpha = (i * p.delta - p.kappa) * a + p.eta - p.g1 * s.s_ge;
        d.s_ge = (i * p.delta - p.gamma1) * s.s_ge - p.g1 * (s_ee - s.s_gg) * a;
        d.s_gg = p.gamma1 * s_ee - 2.0 * p.g1 * std::real(ac * s.s_ge);
        d.s_ee = -d.s_gg;
        d.s_ef = d.s_gf = cplx{0.0, 0.0};
        d.s_ff = 0.0;
        return d;
    }
    d.alpha = (i * p.delta - p.kappa) * a + p.eta - p.g1 * s.s_ge - p.g2 * s.s_ef;
    d.s_ge = (i * p.delta - p.gamma1) * s.s_ge - p.g1 * (s.s_ee - s.s_gg) * a - p.g2 * s.s_gf * ac;
    d.s_gg = p.gamma1 * s.s_ee - 2.0 * p.g1 * std::real(ac * s.s_ge);
    d.s_ef = (i * (p.delta - p.delta_f) - (p.gamma1 + 4.0 * (p.gamma_phi1 + p.gamma_phi2))) * s.s_ef +
             p.g2 * (s.s_ee - s.s_ff) * a + p.g1 * ac * s.s_gf;
    d.s_ee = 2.0 * p.g1 * std::real(ac * s.s_ge) - 2.0 * p.g2 * std::real(ac * s.s_ef) -
             p.gamma1 * s.s_ee + p.gamma1 * s.s_ff;
    d.s_gf = (i * (2.0 * p.delta - p.delta_f) - (p.gamma1 + 4.0 * p.gamma_phi2)) * s.s_gf -
             p.g1 * a * s.s_ef + p.g2 * a * s.s_ge;
    d.s_ff = 2.0 * p.g2 * std::real(ac * s.s_ef) - p.gamma1 * s.s_ff;
    return d;
}

Eigen::VectorXd to_vector(const MBState& s, int level_count) {
    check_level_count(level_count);
    Eigen::VectorXd v(state_size(level_count));
    v[0] = s.alpha.real();
    v[1] = s.alpha.imag();
    v[2] = s.s_ge.real();
    v[3] = s.s_ge.imag();
    v[4] = s.s_gg;
    if (level_count == 3) {
        v[5] = s.s_ef.real();
        v[6] = s.s_ef.imag();
        v[7] = s.s_gf.real();
        v[8] = s.s_gf.imag();
        v[9] = s.s_ee;
    }
    return v;
}

MBState from_vector(const Eigen::VectorXd& v, int level_count) {
    check_level_count(level_count);
    if (v.size() != state_size(level_count)) throw DimensionError("from_vector: wrong vector length");
    MBState s;
    s.alpha = {v[0], v[1]};
    s.s_ge = {v[2], v[3]};
    s.s_gg = v[4];
    if (level_count == 2) {
        s.s_ee = 1.0 - v[4];
        s.s_ff = 0.0;
        return s;
    }
    s.s_ef = {v[5], v[6]};
    s.s_gf = {v[7], v[8]};
    s.s_ee = v[9];
    s.s_ff = 1.0 - v[4] - v[9];
    return s;
}

Eigen::VectorXd mb_rhs_vector(const Eigen::VectorXd& v, const MBParams& p) {
    return to_vector(mb_rhs(from_vector(v, p.level_count), p), p.level_count);
}

double steady_residual(const MBState& state, const MBParams& p) {
    const MBState d = mb_rhs(state, p);
    return max_abs(d, p.level_count) / (p.rate_scale() * std::max(1.0, std::abs(state.alpha)));
}

MBState atom_steady_state(cplx alpha, const MBParams& p, int shift_branch) {
    p.validate();
    if (p.neoclassical()) return neoclassical_atom(alpha, p, shift_branch >= 0 ? 1 : -1);
    return dissipative_atom(alpha, p);
}

cplx dispersive_shift(double intensity, const MBParams& p, int shift_branch) {
    if (!(intensity >= 0.0)) throw InvalidArgument("dispersive_shift: intensity must be >= 0");
    if (p.g1 == 0.0 && (p.g2 == 0.0 || p.level_count == 2)) return {0.0, 0.0};
    // Coherences are proportional to alpha, so a tiny real alpha stands in
    // for the I -> 0 limit.
    const double amp = intensity > 0.0 ? std::sqrt(intensity) : 1e-150;
    if (p.neoclassical() && intensity == 0.0 && p.delta == 0.0) {
        throw SingularityError("neoclassical dispersive shift diverges at zero field and detuning", 0.0);
    }
    const MBState s = atom_steady_state(cplx{amp, 0.0}, p, shift_branch);
    const cplx num = p.level_count == 2 ? p.g1 * s.s_ge : p.g1 * s.s_ge + p.g2 * s.s_ef;
    return -num / amp;
}

double intensity_residual(double intensity, const MBParams& p, int shift_branch) {
    const cplx sigma = dispersive_shift(intensity, p, shift_branch);
    return intensity * std::norm(sigma + cplx{-p.kappa, p.delta}) - p.eta * p.eta;
}

MBState reconstruct_fixed_point(double intensity, const MBParams& p, int shift_branch) {
    const cplx sigma = dispersive_shift(intensity, p, shift_branch);
    const cplx alpha = p.eta / (cplx{p.kappa, -p.delta} - sigma);
    return polish(atom_steady_state(alpha, p, shift_branch), p);
}

const char* to_string(Stability s) {
    switch (s) {
        case Stability::stable: return "stable";
        case Stability::unstable: return "unstable";
        case Stability::unphysical: return "unphysical";
    }
    return "unknown";
}

Eigen::MatrixXd mb_jacobian(const MBState& state, const MBParams& p) {
    const Eigen::VectorXd v = to_vector(state, p.level_count);
    const auto n = v.size();
    Eigen::MatrixXd j(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double h = 1e-3 * std::max(1.0, std::abs(v[k]));
        Eigen::VectorXd vp = v;
        Eigen::VectorXd vm = v;
        vp[k] += h;
        vm[k] -= h;
        j.col(k) = (mb_rhs_vector(vp, p) - mb_rhs_vector(vm, p)) / (2.0 * h);
    }
    return j;
}

MBState integrate_mb(const MBState& start, const MBParams& p, double t_end,
                     const ode::AdaptiveOptions& options) {
    Eigen::VectorXd y = to_vector(start, p.level_count);
    const auto f = [&p](const Eigen::VectorXd& x, Eigen::VectorXd& out) { out = mb_rhs_vector(x, p); };
    ode::AdaptiveOptions opt = options;
    if (opt.h0 <= 0.0) opt.h0 = 1e-3 / (p.rate_scale() * std::max(1.0, std::abs(start.alpha)));
    ode::integrate_adaptive(f, y, t_end, opt, [](double, const Eigen::VectorXd&) { return true; });
    return from_vector(y, p.level_count);
}

Stability classify_stability(Branch& b, const MBParams& p, const StabilityOptions& options) {
    b.negative_slope = slope_derivative(b, p) < 0.0;
    b.limit_cycle = false;

    const Eigen::MatrixXd j = mb_jacobian(b.state, p) / p.rate_scale();
    const Eigen::EigenSolver<Eigen::MatrixXd> es(j, false);
    const auto& ev = es.eigenvalues();
    Eigen::Index lead = 0;
    for (Eigen::Index k = 1; k < ev.size(); ++k) {
        if (ev[k].real() > ev[lead].real()) lead = k;
    }
    b.spectral_abscissa = ev[lead].real();

    if (options.method == StabilityMethod::linearized) {
        b.dynamically_stable = b.spectral_abscissa <= kMarginal;
        b.limit_cycle = !b.dynamically_stable && std::abs(ev[lead].imag()) > kMarginal;
    } else {
        Rng rng(options.seed);
        Eigen::VectorXd v = to_vector(b.state, p.level_count);
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] *= 1.0 + options.perturbation * rng.normal();
        const MBState end =
            integrate_mb(from_vector(v, p.level_count), p, options.horizon_kappa / p.kappa);
        const double di = std::abs(end.intensity() - b.intensity);
        b.dynamically_stable = di <= options.tolerance * std::max(b.intensity, 1e-12);
        if (!b.dynamically_stable) {
            // Still moving at the horizon rather than sitting on another fixed point.
            b.limit_cycle = steady_residual(end, p) > 1e-6;
        }
    }

    if (b.dynamically_stable) {
        b.stability = Stability::stable;
    } else {
        b.stability = b.negative_slope ? Stability::unphysical : Stability::unstable;
    }
    return b.stability;
}

std::vector<Branch> solve_branches(const MBParams& p, double i_max, int n_scan,
                                   const BranchScanOptions& options) {
    p.validate();
    if (n_scan < 1000) throw InvalidArgument("solve_branches: n_scan must be >= 1000");
    if (!(options.i_min > 0.0)) throw InvalidArgument("solve_branches: i_min must be positive");
    if (!(i_max > options.i_min)) throw InvalidArgument("solve_branches: i_max must exceed i_min");

    std::vector<Branch> out;
    const std::vector<int> signs = p.neoclassical() ? std::vector<int>{+1, -1} : std::vector<int>{+1};
    const double log_lo = std::log(options.i_min);
    const double log_span = std::log(i_max) - log_lo;

    for (const int sign : signs) {
        const auto residual = [&](double x) -> std::optional<double> {
            try {
                return intensity_residual(x, p, sign);
            } catch (const SingularityError&) {
                return std::nullopt;
            }
        };
        std::vector<double> roots;
        double prev_x = 0.0;
        std::optional<double> prev_r;
        for (int k = 0; k < n_scan; ++k) {
            const double x = k == n_scan - 1 ? i_max
                                             : std::exp(log_lo + log_span * k / static_cast<double>(n_scan - 1));
            const auto r = residual(x);
            if (r && *r == 0.0) {
                roots.push_back(x);
            } else if (r && prev_r && *prev_r != 0.0 && std::signbit(*r) != std::signbit(*prev_r)) {
                double lo = prev_x;
                double hi = x;
                double r_lo = *prev_r;
                bool ok = true;
                for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
                    const double mid = std::sqrt(lo * hi);
                    const auto rm = residual(mid);
                    if (!rm) {
                        ok = false;
                        break;
                    }
                    if (*rm == 0.0) {
                        lo = hi = mid;
                        break;
                    }
                    if (std::signbit(*rm) == std::signbit(r_lo)) {
                        lo = mid;
                        r_lo = *rm;
                    } else {
                        hi = mid;
                    }
                }
                if (ok) {
                    roots.push_back(0.5 * (lo + hi));
                } else {
                    warn("solve_branches: singular point inside a bracket near I = " + std::to_string(x));
                }
            }
            prev_x = x;
            prev_r = r;
        }

        std::sort(roots.begin(), roots.end());
        std::vector<double> unique;
        for (const double r : roots) {
            if (unique.empty() || std::abs(r - unique.back()) > 1e-6 * std::max(r, unique.back())) {
                unique.push_back(r);
            }
        }

        for (const double r : unique) {
            Branch b;
            b.intensity = r;
            b.shift_branch = sign;
            try {
                b.state = reconstruct_fixed_point(r, p, sign);
            } catch (const SingularityError&) {
                warn("solve_branches: singular reconstruction at I = " + std::to_string(r));
                continue;
            }
            b.residual = steady_residual(b.state, p);
            if (!(b.residual < kResidualLimit)) {
                warn("solve_branches: dropping root at I = " + std::to_string(r) +
                     " with residual " + std::to_string(b.residual));
                continue;
            }
            classify_stability(b, p, options.stability);
            out.push_back(std::move(b));
        }
    }

    // Neoclassical zero-field solution at resonance, below the critical drive.
    if (p.neoclassical() && p.delta == 0.0 && p.g1 != 0.0 && std::abs(p.eta) <= 0.5 * std::abs(p.g1)) {
        Branch b;
        const double x = p.eta / p.g1;
        const double w = -std::sqrt(std::max(0.0, 1.0 - 4.0 * x * x));
        b.state.alpha = 0.0;
        b.state.s_ge = x;
        b.state.s_gg = 0.5 * (1.0 - w);
        b.state.s_ee = 0.5 * (1.0 + w);
        b.state.s_ff = 0.0;
        b.intensity = 0.0;
        b.residual = steady_residual(b.state, p);
        classify_stability(b, p, options.stability);
        out.push_back(std::move(b));
    }

    std::stable_sort(out.begin(), out.end(),
                     [](const Branch& a, const Branch& b) { return a.intensity < b.intensity; });
    return out;
}

char phase_symbol(Phase ph) {
    switch (ph) {
        case Phase::dim: return 'D';
        case Phase::bright: return 'B';
        case Phase::bistable: return 'X';
    }
    return '?';
}

Phase phase_from_symbol(char c) {
    switch (c) {
        case 'D': return Phase::dim;
        case 'B': return Phase::bright;
        case 'X': return Phase::bistable;
        default: throw InvalidArgument(std::string("unknown phase symbol '") + c + "'");
    }
}

double default_intensity_cap(const MBParams& p) { return 4.0 * p.eta * p.eta / (p.kappa * p.kappa) + 100.0; }

Phase phase_point(double delta, double eta, const MBParams& base, const PhaseOptions& options) {
    MBParams p = base;
    p.delta = delta;
    p.eta = eta;
    p.validate();
    if (eta == 0.0) return Phase::dim;

    const auto branches = solve_branches(p, default_intensity_cap(p), options.n_scan, options.scan);
    bool any = false;
    bool has_dim = false;
    bool has_bright = false;
    double largest = 0.0;
    for (const auto& b : branches) {
        if (b.stability != Stability::stable) continue;
        any = true;
        largest = std::max(largest, b.intensity);
        if (b.intensity < options.i_dim) has_dim = true;
        if (b.intensity > options.i_bright) has_bright = true;
    }
    if (!any) {
        // No stable branch at all: fall back to the largest root.
        for (const auto& b : branches) largest = std::max(largest, b.intensity);
        return largest < std::sqrt(options.i_dim * options.i_bright) ? Phase::dim : Phase::bright;
    }
    if (has_dim && has_bright) return Phase::bistable;
    if (has_dim) return Phase::dim;
    if (has_bright) return Phase::bright;
    return largest < std::sqrt(options.i_dim * options.i_bright) ? Phase::dim : Phase::bright;
}

PhaseDiagram phase_diagram(const std::vector<double>& delta_grid, const std::vector<double>& eta_grid,
                           const MBParams& params, const PhaseOptions& options, int workers) {
    const auto monotone = [](const std::vector<double>& g) {
        for (std::size_t k = 1; k < g.size(); ++k) {
            if (!(g[k] > g[k - 1])) return false;
        }
        return !g.empty();
    };
    if (!monotone(delta_grid) || !monotone(eta_grid)) {
        throw InvalidArgument("phase_diagram: grids must be non-empty and strictly increasing");
    }
    PhaseDiagram d;
    d.delta = delta_grid;
    d.eta = eta_grid;
    d.cells.assign(delta_grid.size() * eta_grid.size(), Phase::dim);
    parallel_for(d.cells.size(), std::max(1, workers), [&](std::size_t k) {
        const std::size_t i = k / eta_grid.size();
        const std::size_t j = k % eta_grid.size();
        d.cells[k] = phase_point(delta_grid[i], eta_grid[j], params, options);
    });
    return d;
}

}  // namespace pbb
