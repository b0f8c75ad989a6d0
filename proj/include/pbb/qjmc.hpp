#pragma once

#include <atomic>
#include <cstdint>
#include <string>
#include <vector>

#include "pbb/hilbert.hpp"
#include "pbb/model.hpp"
#include "pbb/timeseries.hpp"

namespace pbb {

struct TrajectoryConfig {
    double t_final = 0.0;          ///< s
    double sample_interval = 0.0;  ///< s; 0 selects 1 / kappa_field
    double step_tolerance = 1e-6;  ///< relative error of the unnormalized state per step
    double dt_max = 0.0;           ///< s; 0 caps steps at the sample interval
    std::uint64_t seed = 0;
    std::size_t initial_state = 0;  ///< basis index, default ground ⊗ vacuum
};

struct JumpEvent {
    double time;
    int channel;
};

/// Observables of one Monte Carlo wave-function run, sampled on a uniform
/// grid starting at t = 0.
struct TrajectoryRecord {
    double sample_interval = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<double> n_photon;
    std::vector<std::vector<double>> populations;  ///< [level][sample]
    std::vector<cplx> alpha;
    /// Squared norm of the unnormalized state at each sample (diagnostic;
    /// resets to 1 after every jump).
    std::vector<double> norm_squared;
    std::vector<JumpEvent> jumps;
    std::vector<std::string> channel_labels;
    int n_fock = 0;
    bool truncation_flag = false;
    double max_top_fock_population = 0.0;

    std::size_t size() const noexcept { return times.size(); }
};

/// Holds H_eff and the jump channels so an ensemble shares one operator set.
class TrajectorySimulator {
public:
    TrajectorySimulator(const SystemParams& params, const Dims& dims);

    TrajectoryRecord run(const TrajectoryConfig& config) const;

    const Dims& dims() const noexcept { return dims_; }
    const std::vector<JumpOperator>& jumps() const noexcept { return jumps_; }
    const SparseOperator& effective_hamiltonian() const noexcept { return heff_; }

private:
    Dims dims_;
    double kappa_field_;
    SparseOperator heff_;
    std::vector<JumpOperator> jumps_;
    std::vector<std::string> labels_;
    double rate_bound_;  ///< max absolute row sum of H_eff
};

TrajectoryRecord run_trajectory(const SystemParams& params, const Dims& dims,
                                const TrajectoryConfig& config);

struct EnsembleOptions {
    int workers = 1;
    const std::atomic<bool>* cancel = nullptr;
};

/// Trajectory k runs with seed derive_seed(seed_base, k); config.seed is
/// ignored. Output is in index order for any worker count.
std::vector<TrajectoryRecord> run_ensemble(const SystemParams& params, const Dims& dims,
                                           const TrajectoryConfig& config,
                                           std::size_t n_trajectories, std::uint64_t seed_base,
                                           const EnsembleOptions& options = {});

/// Joins the photon-number series end to end after dropping samples with
/// t < discard_initial from each record. The time axis is continuous.
TimeSeries concatenate(const std::vector<TrajectoryRecord>& records, double discard_initial);

}  // namespace pbb
