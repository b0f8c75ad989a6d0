#include "pbb/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/SparseLU>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"

namespace pbb {

namespace {

using TripletE = Eigen::Triplet<cplx>;

/// Appends scale * (A ⊗ B) to `out`; Kronecker ordering (i_a * n_b + i_b).
void kron_into(const SparseOperator& a, const SparseOperator& b, cplx scale,
               std::vector<TripletE>& out) {
    const auto ta = a.triplets();
    const auto tb = b.triplets();
    const auto nb = static_cast<Eigen::Index>(b.rows());
    for (const auto& ea : ta) {
        for (const auto& eb : tb) {
            out.emplace_back(static_cast<Eigen::Index>(ea.row) * nb + static_cast<Eigen::Index>(eb.row),
                             static_cast<Eigen::Index>(ea.col) * nb + static_cast<Eigen::Index>(eb.col),
                             scale * ea.value * eb.value);
        }
    }
}

SparseOperator conj_elements(const SparseOperator& op) {
    auto t = op.triplets();
    for (auto& e : t) e.value = std::conj(e.value);
    return {op.rows(), op.cols(), std::move(t)};
}

Eigen::VectorXcd solve_with_trace_row(const SparseMatrixC& lv, Eigen::Index dim, Eigen::Index row) {
    const Eigen::Index n = lv.rows();
    std::vector<TripletE> t;
    t.reserve(static_cast<std::size_t>(lv.nonZeros() + dim));
    for (Eigen::Index k = 0; k < lv.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(lv, k); it; ++it) {
            if (it.row() != row) t.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < dim; ++i) t.emplace_back(row, i * dim + i, cplx{1.0, 0.0});
    SparseMatrixC a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    a.makeCompressed();

    Eigen::SparseLU<SparseMatrixC, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        throw MultiplicityError("Liouvillian steady state is not unique (singular constrained system)");
    }
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(n);
    b[row] = 1.0;
    Eigen::VectorXcd x = lu.solve(b);
    if (lu.info() != Eigen::Success || !x.allFinite()) {
        throw MultiplicityError("Liouvillian steady state is not unique (solve failed)");
    }
    return x;
}

}  // namespace

SparseMatrixC to_eigen_sparse(const SparseOperator& op) {
    std::vector<TripletE> t;
    for (const auto& e : op.triplets()) {
        t.emplace_back(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col), e.value);
    }
    SparseMatrixC m(static_cast<Eigen::Index>(op.rows()), static_cast<Eigen::Index>(op.cols()));
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

SparseMatrixC liouvillian(const SparseOperator& hamiltonian, const std::vector<JumpOperator>& jumps) {
    const std::size_t d = hamiltonian.rows();
    const auto id = SparseOperator::identity(d);
    const auto heff = effective_hamiltonian(hamiltonian, jumps);
    const cplx i{0.0, 1.0};

    // vec(A rho B) = (B^T ⊗ A) vec(rho), column stacking.
    std::vector<TripletE> t;
    kron_into(id, heff, -i, t);
    kron_into(conj_elements(heff), id, i, t);  // (H_eff^dagger)^T = conj(H_eff)
    for (const auto& j : jumps) kron_into(conj_elements(j.op), j.op, 1.0, t);

    const auto n = static_cast<Eigen::Index>(d * d);
    SparseMatrixC lv(n, n);
    lv.setFromTriplets(t.begin(), t.end());
    lv.makeCompressed();
    return lv;
}

DensityMatrix steady_state_dense(const SystemParams& params, const Dims& dims) {
    if (dims.total() > kSteadyStateMaxDim) {
        throw DimensionError("steady_state_dense is limited to total dimension " +
                             std::to_string(kSteadyStateMaxDim) + ", got " +
                             std::to_string(dims.total()));
    }
    const auto h = build_hamiltonian(params, dims);
    const auto jumps = build_jump_operators(params, dims);
    const SparseMatrixC lv = liouvillian(h, jumps);
    const auto d = static_cast<Eigen::Index>(dims.total());

    // Two independent trace-constrained solves; a one-dimensional null space
    // makes them agree.
    const Eigen::VectorXcd x1 = solve_with_trace_row(lv, d, 0);
    const Eigen::VectorXcd x2 = solve_with_trace_row(lv, d, d * d - 1);
    const double diff = (x1 - x2).cwiseAbs().maxCoeff();
    const double resid = (lv * x1).cwiseAbs().maxCoeff();
    double lnorm = 0.0;
    for (Eigen::Index k = 0; k < lv.outerSize(); ++k) {
        for (SparseMatrixC::InnerIterator it(lv, k); it; ++it) lnorm = std::max(lnorm, std::abs(it.value()));
    }
    if (diff > 1e-8 || resid > 1e-9 * lnorm * std::max(1.0, x1.cwiseAbs().maxCoeff())) {
        throw MultiplicityError("Liouvillian null space is degenerate (constrained solves differ by " +
                                std::to_string(diff) + ")");
    }

    DensityMatrix rho = Eigen::Map<const DensityMatrix>(x1.data(), d, d);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    rho /= rho.trace().real();

    const Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-9) {
        warn("steady state has eigenvalue " + std::to_string(es.eigenvalues().minCoeff()) +
             " below -1e-9");
    }
    return rho;
}

DensityMatrix evolve_density_matrix(const SystemParams& params, const Dims& dims,
                                    const DensityMatrix& rho0, double t, double max_step) {
    const auto d = static_cast<Eigen::Index>(dims.total());
    if (rho0.rows() != d || rho0.cols() != d) throw DimensionError("rho0 does not match dims");
    const auto h = build_hamiltonian(params, dims);
    const auto jumps = build_jump_operators(params, dims);
    const SparseMatrixC heff = to_eigen_sparse(effective_hamiltonian(h, jumps));
    const SparseMatrixC heff_dag = SparseMatrixC(heff.adjoint());
    std::vector<SparseMatrixC> ls;
    std::vector<SparseMatrixC> ls_dag;
    for (const auto& j : jumps) {
        ls.push_back(to_eigen_sparse(j.op));
        ls_dag.push_back(SparseMatrixC(ls.back().adjoint()));
    }

    double rate = 0.0;
    for (Eigen::Index r = 0; r < heff.outerSize(); ++r) {
        for (SparseMatrixC::InnerIterator it(heff, r); it; ++it) rate = std::max(rate, std::abs(it.value()));
    }
    rate *= 4.0;  // crude spectral-radius bound for a few nonzeros per row
    double step = rate > 0.0 ? 0.1 / rate : t;
    if (max_step > 0.0) step = std::min(step, max_step);
    const auto n_steps = static_cast<long>(std::ceil(t / step));
    step = t / static_cast<double>(std::max(1L, n_steps));

    const cplx i{0.0, 1.0};
    auto rhs = [&](const DensityMatrix& rho) {
        DensityMatrix out = -i * (heff * rho) + i * (rho * heff_dag);
        for (std::size_t c = 0; c < ls.size(); ++c) out += ls[c] * (rho * ls_dag[c]);
        return out;
    };
    DensityMatrix rho = rho0;
    for (long s = 0; s < n_steps; ++s) {
        const DensityMatrix k1 = rhs(rho);
        const DensityMatrix k2 = rhs(rho + 0.5 * step * k1);
        const DensityMatrix k3 = rhs(rho + 0.5 * step * k2);
        const DensityMatrix k4 = rhs(rho + step * k3);
        rho += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return rho;
}

DensityObservables observables(const DensityMatrix& rho, const Dims& dims) {
    DensityObservables obs;
    obs.populations.assign(static_cast<std::size_t>(dims.n_levels), 0.0);
    for (int u = 0; u < dims.n_levels; ++u) {
        for (int n = 0; n < dims.n_fock; ++n) {
            const auto k = static_cast<Eigen::Index>(dims.index(u, n));
            const double p = rho(k, k).real();
            obs.populations[static_cast<std::size_t>(u)] += p;
            obs.n_photon += n * p;
            if (n == dims.n_fock - 1) obs.top_fock_population += p;
            // <a> = Tr(a rho) = sum <u,n-1|a|u,n> rho(u n, u n-1)
            if (n > 0) obs.alpha += std::sqrt(static_cast<double>(n)) * rho(k, k - 1);
        }
    }
    return obs;
}

}  // namespace pbb
