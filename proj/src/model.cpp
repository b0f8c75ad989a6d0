#include "pbb/model.hpp"

#include <cmath>
#include <numbers>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"

namespace pbb {

std::string to_string(DephasingModel model) {
    switch (model) {
        case DephasingModel::none: return "none";
        case DephasingModel::flux_linear: return "flux-linear";
        case DephasingModel::charge_dispersion: return "charge-dispersion";
    }
    return "none";
}

DephasingModel dephasing_model_from_string(const std::string& name) {
    if (name == "none") return DephasingModel::none;
    if (name == "flux-linear") return DephasingModel::flux_linear;
    if (name == "charge-dispersion") return DephasingModel::charge_dispersion;
    throw InvalidArgument("unknown dephasing model '" + name + "'");
}

void SystemParams::validate() const {
    if (!(kappa_field > 0.0)) throw InvalidArgument("kappa_field must be > 0");
    if (!(gamma1 >= 0.0)) throw InvalidArgument("gamma1 must be >= 0");
    if (!(gamma_phi1 >= 0.0)) throw InvalidArgument("gamma_phi1 must be >= 0");
    if (!(n_th >= 0.0)) throw InvalidArgument("n_th must be >= 0");
    if (!(g1 >= 0.0)) throw InvalidArgument("g1 must be >= 0");
    if (n_levels < 2) throw InvalidArgument("n_levels must be >= 2");
    if (!std::isfinite(eta) || !std::isfinite(delta) || !std::isfinite(delta_an)) {
        throw InvalidArgument("eta, delta and delta_an must be finite");
    }
    if (dephasing.model == DephasingModel::flux_linear && !(dephasing.flux_divisor > 0.0)) {
        throw InvalidArgument("flux_divisor must be > 0");
    }
}

double transmon_diagonal(const SystemParams& params, int u) {
    if (u < 0 || u >= params.n_levels) {
        throw DimensionError("transmon level " + std::to_string(u) + " out of range");
    }
    const double du = u;
    // Two-level systems have no anharmonic term.
    const double anharm = params.n_levels > 2 ? params.delta_an * du * (du - 1.0) / 2.0 : 0.0;
    return -du * params.delta + anharm;
}

std::vector<double> charge_dispersion_weights(double ej, double ec, int n_levels) {
    if (!(ej > 0.0) || !(ec > 0.0)) throw InvalidArgument("EJ and EC must be positive");
    if (n_levels < 1) throw InvalidArgument("n_levels must be >= 1");
    if (ej / ec <= 20.0) {
        warn("charge dispersion: EJ/EC = " + std::to_string(ej / ec) +
             " is outside the asymptotic regime (EJ/EC > 20)");
    }
    // eps_m ∝ 2^(4m+5)/m! * (EJ/2EC)^(m/2+3/4); the common factors cancel in
    // the ratio to m = 1, leaving 2^(4(m-1)) / m! * (EJ/2EC)^((m-1)/2).
    const double x = ej / (2.0 * ec);
    std::vector<double> w(static_cast<std::size_t>(n_levels));
    for (int m = 0; m < n_levels; ++m) {
        const double log_w = 4.0 * (m - 1) * std::numbers::ln2 - std::lgamma(m + 1.0) +
                             0.5 * (m - 1) * std::log(x);
        w[static_cast<std::size_t>(m)] = std::exp(log_w);
    }
    if (n_levels > 1) w[1] = 1.0;
    return w;
}

std::vector<double> dephasing_rates(const SystemParams& params) {
    std::vector<double> rates(static_cast<std::size_t>(params.n_levels), 0.0);
    switch (params.dephasing.model) {
        case DephasingModel::none:
            break;
        case DephasingModel::flux_linear:
            for (int v = 1; v < params.n_levels; ++v) {
                rates[static_cast<std::size_t>(v)] =
                    v * params.gamma_phi1 / params.dephasing.flux_divisor;
            }
            break;
        case DephasingModel::charge_dispersion: {
            const auto w = charge_dispersion_weights(params.dephasing.ej_hz, params.dephasing.ec_hz,
                                                     params.n_levels);
            for (int v = 0; v < params.n_levels; ++v) {
                if (v == 0 && !params.dephasing.charge_include_ground) continue;
                rates[static_cast<std::size_t>(v)] = params.gamma_phi1 * w[static_cast<std::size_t>(v)];
            }
            break;
        }
    }
    return rates;
}

SparseOperator mode_annihilation(const Dims& dims) {
    return tensor(SparseOperator::identity(static_cast<std::size_t>(dims.n_levels)),
                  fock_annihilation(dims.n_fock));
}

SparseOperator number_operator(const Dims& dims) {
    std::vector<Triplet> t;
    for (int u = 0; u < dims.n_levels; ++u) {
        for (int n = 1; n < dims.n_fock; ++n) {
            t.push_back({dims.index(u, n), dims.index(u, n), static_cast<double>(n)});
        }
    }
    return {dims.total(), dims.total(), std::move(t)};
}

SparseOperator level_projector(const Dims& dims, int u) {
    if (u < 0 || u >= dims.n_levels) throw DimensionError("level out of range");
    return tensor(ket_bra(static_cast<std::size_t>(dims.n_levels), static_cast<std::size_t>(u),
                          static_cast<std::size_t>(u)),
                  SparseOperator::identity(static_cast<std::size_t>(dims.n_fock)));
}

namespace {
void check_dims(const SystemParams& params, const Dims& dims) {
    if (dims.n_levels != params.n_levels) {
        throw DimensionError("Dims.n_levels (" + std::to_string(dims.n_levels) +
                             ") does not match params.n_levels (" +
                             std::to_string(params.n_levels) + ")");
    }
}
}  // namespace

SparseOperator build_hamiltonian(const SystemParams& params, const Dims& dims) {
    check_dims(params, dims);
    const std::size_t dim = dims.total();
    const cplx i{0.0, 1.0};
    std::vector<Triplet> t;

    for (int u = 0; u < dims.n_levels; ++u) {
        const double hu = transmon_diagonal(params, u);
        for (int n = 0; n < dims.n_fock; ++n) {
            t.push_back({dims.index(u, n), dims.index(u, n), hu - params.delta * n});
        }
    }

    // i g_{u+1} a |u+1><u|  - h.c.
    for (int u = 0; u + 1 < dims.n_levels; ++u) {
        const double g = std::sqrt(u + 1.0) * params.g1;
        if (g == 0.0) continue;
        for (int n = 1; n < dims.n_fock; ++n) {
            const double sn = std::sqrt(static_cast<double>(n));
            const auto up = dims.index(u + 1, n - 1);
            const auto lo = dims.index(u, n);
            t.push_back({up, lo, i * g * sn});
            t.push_back({lo, up, -i * g * sn});
        }
    }

    // i (eta a^dagger - eta a)
    if (params.eta != 0.0) {
        for (int u = 0; u < dims.n_levels; ++u) {
            for (int n = 1; n < dims.n_fock; ++n) {
                const double sn = std::sqrt(static_cast<double>(n));
                t.push_back({dims.index(u, n), dims.index(u, n - 1), i * params.eta * sn});
                t.push_back({dims.index(u, n - 1), dims.index(u, n), -i * params.eta * sn});
            }
        }
    }
    return {dim, dim, std::move(t)};
}

std::vector<JumpOperator> build_jump_operators(const SystemParams& params, const Dims& dims) {
    check_dims(params, dims);
    params.validate();
    std::vector<JumpOperator> jumps;
    const auto a = mode_annihilation(dims);

    jumps.push_back({std::sqrt(2.0 * (params.n_th + 1.0) * params.kappa_field) * a, "mode_decay"});
    if (params.n_th > 0.0) {
        jumps.push_back({std::sqrt(2.0 * params.n_th * params.kappa_field) * a.adjoint(),
                         "thermal_absorption"});
    }

    if (params.gamma1 > 0.0) {
        const auto levels = static_cast<std::size_t>(dims.n_levels);
        const auto fock_id = SparseOperator::identity(static_cast<std::size_t>(dims.n_fock));
        for (std::size_t u = 0; u + 1 < levels; ++u) {
            jumps.push_back({std::sqrt(params.gamma1) * tensor(ket_bra(levels, u, u + 1), fock_id),
                             "relax_" + std::to_string(u + 1) + "->" + std::to_string(u)});
        }
    }

    const auto rates = dephasing_rates(params);
    const auto id = SparseOperator::identity(dims.total());
    for (int v = 0; v < dims.n_levels; ++v) {
        const double rate = rates[static_cast<std::size_t>(v)];
        if (rate <= 0.0) continue;
        const auto flip = id - cplx{2.0, 0.0} * level_projector(dims, v);
        jumps.push_back({std::sqrt(rate) * flip, "dephase_" + std::to_string(v)});
    }
    return jumps;
}

SparseOperator effective_hamiltonian(const SparseOperator& hamiltonian,
                                     const std::vector<JumpOperator>& jumps) {
    if (hamiltonian.rows() != hamiltonian.cols()) throw DimensionError("H must be square");
    SparseOperator out = hamiltonian;
    for (const auto& j : jumps) {
        if (j.op.rows() != hamiltonian.rows() || j.op.cols() != hamiltonian.cols()) {
            throw DimensionError("jump operator " + j.label + " does not match H");
        }
        out = out - cplx{0.0, 0.5} * multiply(j.op.adjoint(), j.op);
    }
    return out;
}

}  // namespace pbb
