#include "pbb/qjmc.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "pbb/error.hpp"
#include "pbb/ode.hpp"
#include "pbb/parallel.hpp"
#include "pbb/rng.hpp"

namespace pbb {

namespace {

constexpr double kTruncationLimit = 1e-6;
constexpr double kNormFloor = 1e-150;

using Vec = Eigen::VectorXcd;

/// y = -i H_eff x over the raw CSR arrays.
struct SchrodingerRhs {
    const SparseOperator* heff;

    void operator()(const Vec& x, Vec& y) const {
        const auto rows = heff->rows();
        const auto ptr = heff->row_offsets();
        const auto col = heff->column_indices();
        const auto val = heff->values();
        y.resize(static_cast<Eigen::Index>(rows));
        const cplx* xd = x.data();
        for (std::size_t r = 0; r < rows; ++r) {
            cplx acc{0.0, 0.0};
            for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) acc += val[k] * xd[col[k]];
            y[static_cast<Eigen::Index>(r)] = cplx{acc.imag(), -acc.real()};
        }
    }
};

void record_sample(TrajectoryRecord& rec, const Dims& dims, double t, const Vec& psi) {
    const double n2 = psi.squaredNorm();
    const double inv = 1.0 / n2;
    double n_photon = 0.0;
    double top = 0.0;
    cplx alpha{0.0, 0.0};
    for (int u = 0; u < dims.n_levels; ++u) {
        double pop = 0.0;
        for (int n = 0; n < dims.n_fock; ++n) {
            const auto idx = static_cast<Eigen::Index>(dims.index(u, n));
            const double p = std::norm(psi[idx]);
            pop += p;
            n_photon += n * p;
            if (n > 0) alpha += std::conj(psi[idx - 1]) * std::sqrt(static_cast<double>(n)) * psi[idx];
            if (n == dims.n_fock - 1) top += p;
        }
        rec.populations[static_cast<std::size_t>(u)].push_back(pop * inv);
    }
    rec.times.push_back(t);
    rec.n_photon.push_back(n_photon * inv);
    rec.alpha.push_back(alpha * inv);
    rec.norm_squared.push_back(n2);
    top *= inv;
    rec.max_top_fock_population = std::max(rec.max_top_fock_population, top);
    if (top > kTruncationLimit) rec.truncation_flag = true;
}

}  // namespace

TrajectorySimulator::TrajectorySimulator(const SystemParams& params, const Dims& dims)
    : dims_(dims), kappa_field_(params.kappa_field) {
    params.validate();
    const auto h = build_hamiltonian(params, dims);
    jumps_ = build_jump_operators(params, dims);
    heff_ = pbb::effective_hamiltonian(h, jumps_);
    for (const auto& j : jumps_) labels_.push_back(j.label);

    rate_bound_ = 0.0;
    const auto ptr = heff_.row_offsets();
    const auto val = heff_.values();
    for (std::size_t r = 0; r < heff_.rows(); ++r) {
        double s = 0.0;
        for (std::size_t k = ptr[r]; k < ptr[r + 1]; ++k) s += std::abs(val[k]);
        rate_bound_ = std::max(rate_bound_, s);
    }
}

TrajectoryRecord TrajectorySimulator::run(const TrajectoryConfig& config) const {
    const double sample_dt = config.sample_interval > 0.0 ? config.sample_interval : 1.0 / kappa_field_;
    if (!(config.t_final >= sample_dt)) {
        throw InvalidArgument("TrajectoryConfig: sample_interval must not exceed t_final");
    }
    if (!(config.step_tolerance > 0.0 && config.step_tolerance < 1e-2)) {
        throw InvalidArgument("TrajectoryConfig: step_tolerance must lie in (0, 1e-2)");
    }
    if (config.initial_state >= dims_.total()) {
        throw DimensionError("TrajectoryConfig: initial_state outside the Hilbert space");
    }
    const double dt_max = config.dt_max > 0.0 ? config.dt_max : sample_dt;
    const double tol = config.step_tolerance;
    const auto n_samples =
        static_cast<std::size_t>(std::floor(config.t_final / sample_dt * (1.0 + 1e-12))) + 1;

    TrajectoryRecord rec;
    rec.sample_interval = sample_dt;
    rec.seed = config.seed;
    rec.channel_labels = labels_;
    rec.n_fock = dims_.n_fock;
    rec.populations.assign(static_cast<std::size_t>(dims_.n_levels), {});
    for (auto& p : rec.populations) p.reserve(n_samples);
    rec.times.reserve(n_samples);
    rec.n_photon.reserve(n_samples);
    rec.alpha.reserve(n_samples);
    rec.norm_squared.reserve(n_samples);

    Rng rng(config.seed);
    const SchrodingerRhs rhs{&heff_};
    const auto dim = static_cast<Eigen::Index>(dims_.total());

    Vec psi = Vec::Zero(dim);
    psi[static_cast<Eigen::Index>(config.initial_state)] = 1.0;
    Vec k1, k7, y_new, err, y_probe, k7_probe, err_probe;
    ode::Workspace<Vec> ws;
    rhs(psi, k1);

    double r = rng.uniform_open();
    double t = 0.0;
    double h = std::min(dt_max, rate_bound_ > 0.0 ? 0.1 / rate_bound_ : dt_max);
    record_sample(rec, dims_, 0.0, psi);

    std::vector<Vec> jumped(jumps_.size());
    std::vector<double> weights(jumps_.size());
    Vec tmp(dim);

    for (std::size_t next = 1; next < n_samples;) {
        const double t_target = sample_dt * static_cast<double>(next);
        const double h_try = std::min({h, t_target - t, dt_max});
        ode::dp5_step(rhs, psi, k1, h_try, y_new, k7, err, ws);
        const double scale = std::sqrt(psi.squaredNorm());
        const double ratio = std::sqrt(err.squaredNorm()) / (tol * scale);
        if (!(ratio <= 1.0)) {
            h = std::isfinite(ratio) ? ode::next_step(h_try, ratio) : 0.2 * h_try;
            continue;
        }
        const double proposal = ode::next_step(h_try, ratio);
        h = h_try < h ? std::max(h, proposal) : proposal;
        h = std::min(h, dt_max);

        const double n2 = y_new.squaredNorm();
        if (n2 < kNormFloor) {
            throw NumericalError("state norm underflow without a resolved jump at t = " +
                                 std::to_string(t));
        }
        if (n2 > r) {
            const bool at_sample = h_try == t_target - t;
            t = at_sample ? t_target : t + h_try;
            psi.swap(y_new);
            k1.swap(k7);
            if (at_sample) {
                record_sample(rec, dims_, t, psi);
                ++next;
            }
            continue;
        }

        // The squared norm crossed r inside [t, t + h_try]: bisect on the
        // step length, re-stepping from the accepted step's start.
        double lo = 0.0;
        double hi = h_try;
        y_probe = y_new;
        Vec y_hi = y_new;
        while (hi - lo > tol * h_try) {
            const double mid = 0.5 * (lo + hi);
            ode::dp5_step(rhs, psi, k1, mid, y_probe, k7_probe, err_probe, ws);
            if (y_probe.squaredNorm() > r) {
                lo = mid;
            } else {
                hi = mid;
                y_hi = y_probe;
            }
        }
        const double t_jump = (hi == t_target - t) ? t_target : t + hi;
        psi.swap(y_hi);

        double total = 0.0;
        for (std::size_t c = 0; c < jumps_.size(); ++c) {
            jumped[c].resize(dim);
            jumps_[c].op.apply(std::span<const cplx>(psi.data(), static_cast<std::size_t>(dim)),
                               std::span<cplx>(jumped[c].data(), static_cast<std::size_t>(dim)));
            weights[c] = jumped[c].squaredNorm();
            total += weights[c];
        }
        if (!(total > 0.0)) {
            throw NumericalError("norm decayed with zero total jump rate at t = " +
                                 std::to_string(t_jump));
        }
        const double pick = rng.uniform_open() * total;
        std::size_t channel = 0;
        double cumulative = weights[0];
        while (cumulative < pick && channel + 1 < jumps_.size()) cumulative += weights[++channel];

        psi = jumped[channel] / std::sqrt(weights[channel]);
        rec.jumps.push_back({t_jump, static_cast<int>(channel)});
        r = rng.uniform_open();
        t = t_jump;
        rhs(psi, k1);
        if (t == t_target) {
            record_sample(rec, dims_, t, psi);
            ++next;
        }
    }
    return rec;
}

TrajectoryRecord run_trajectory(const SystemParams& params, const Dims& dims,
                                const TrajectoryConfig& config) {
    return TrajectorySimulator(params, dims).run(config);
}

std::vector<TrajectoryRecord> run_ensemble(const SystemParams& params, const Dims& dims,
                                           const TrajectoryConfig& config,
                                           std::size_t n_trajectories, std::uint64_t seed_base,
                                           const EnsembleOptions& options) {
    if (n_trajectories < 1) throw InvalidArgument("run_ensemble needs n_trajectories >= 1");
    const TrajectorySimulator sim(params, dims);
    std::vector<std::optional<TrajectoryRecord>> slots(n_trajectories);
    parallel_for(
        n_trajectories, options.workers,
        [&](std::size_t k) {
            TrajectoryConfig c = config;
            c.seed = derive_seed(seed_base, k);
            slots[k] = sim.run(c);
        },
        options.cancel);
    std::vector<TrajectoryRecord> out;
    out.reserve(n_trajectories);
    for (auto& s : slots) {
        if (!s) break;
        out.push_back(std::move(*s));
    }
    return out;
}

TimeSeries concatenate(const std::vector<TrajectoryRecord>& records, double discard_initial) {
    if (records.empty()) throw InvalidArgument("concatenate: no records");
    const double dt = records.front().sample_interval;
    TimeSeries out;
    out.t0 = 0.0;
    out.dt = dt;
    out.unit = "photons";
    for (const auto& rec : records) {
        if (std::abs(rec.sample_interval - dt) > 1e-12 * dt) {
            throw InvalidArgument("concatenate: records have different sample intervals");
        }
        for (std::size_t i = 0; i < rec.size(); ++i) {
            if (rec.times[i] < discard_initial * (1.0 - 1e-12)) continue;
            out.values.push_back(rec.n_photon[i]);
        }
    }
    if (out.values.empty()) {
        throw InvalidArgument("concatenate: discard_initial removes every sample");
    }
    return out;
}

}  // namespace pbb
