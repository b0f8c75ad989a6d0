#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "pbb/hilbert.hpp"
#include "pbb/model.hpp"

namespace pbb {

using DensityMatrix = Eigen::MatrixXcd;
using SparseMatrixC = Eigen::SparseMatrix<cplx>;

inline constexpr std::size_t kSteadyStateMaxDim = 256;

SparseMatrixC to_eigen_sparse(const SparseOperator& op);

/// Liouvillian superoperator acting on column-stacked vec(rho):
/// -i[H, rho] + sum_i (L rho L^dagger - {L^dagger L, rho}/2).
SparseMatrixC liouvillian(const SparseOperator& hamiltonian, const std::vector<JumpOperator>& jumps);

/// Unique trace-one null vector of the Liouvillian, for dims.total() <= 256.
/// Throws MultiplicityError when the null space is not one-dimensional.
DensityMatrix steady_state_dense(const SystemParams& params, const Dims& dims);

/// Master-equation propagation of rho0 to time t with fixed-step RK4
/// (step <= max_step, and small against the fastest rate).
DensityMatrix evolve_density_matrix(const SystemParams& params, const Dims& dims,
                                    const DensityMatrix& rho0, double t, double max_step = 0.0);

struct DensityObservables {
    double n_photon = 0.0;
    cplx alpha{0.0, 0.0};
    std::vector<double> populations;
    double top_fock_population = 0.0;
};

DensityObservables observables(const DensityMatrix& rho, const Dims& dims);

}  // namespace pbb
