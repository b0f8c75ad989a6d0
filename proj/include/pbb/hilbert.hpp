#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace pbb {

using cplx = std::complex<double>;

/// Truncated transmon ⊗ Fock space. Basis index = u * n_fock + n
/// (transmon-major), so mode operators are block-diagonal per level.
struct Dims {
    int n_levels = 2;
    int n_fock = 2;

    Dims(int levels, int fock);

    std::size_t total() const noexcept {
        return static_cast<std::size_t>(n_levels) * static_cast<std::size_t>(n_fock);
    }
    std::size_t index(int u, int n) const noexcept {
        return static_cast<std::size_t>(u) * static_cast<std::size_t>(n_fock) +
               static_cast<std::size_t>(n);
    }

    friend bool operator==(const Dims&, const Dims&) = default;
};

struct Triplet {
    std::size_t row;
    std::size_t col;
    cplx value;
};

/// Compressed-sparse-row complex matrix. Immutable once built.
class SparseOperator {
public:
    SparseOperator() = default;

    /// Duplicate coordinates are summed. Entries with |value| <= drop_tolerance
    /// are discarded only when drop_tolerance > 0; by default every assigned
    /// entry is stored.
    SparseOperator(std::size_t rows, std::size_t cols, std::vector<Triplet> entries,
                   double drop_tolerance = 0.0);

    static SparseOperator identity(std::size_t n);
    static SparseOperator zero(std::size_t rows, std::size_t cols);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    cplx coeff(std::size_t row, std::size_t col) const;

    /// y = A x
    void apply(std::span<const cplx> x, std::span<cplx> y) const;
    /// y += scale * A x
    void apply_add(cplx scale, std::span<const cplx> x, std::span<cplx> y) const;

    SparseOperator adjoint() const;
    Eigen::MatrixXcd to_dense() const;
    std::vector<Triplet> triplets() const;

    std::span<const std::size_t> row_offsets() const noexcept { return row_ptr_; }
    std::span<const std::size_t> column_indices() const noexcept { return col_idx_; }
    std::span<const cplx> values() const noexcept { return values_; }

    friend bool operator==(const SparseOperator&, const SparseOperator&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<cplx> values_;
};

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
SparseOperator operator*(cplx scale, const SparseOperator& a);
/// Matrix product a * b.
SparseOperator multiply(const SparseOperator& a, const SparseOperator& b);

/// Kronecker product; index (i_a * b.rows() + i_b), matching the
/// transmon-major ordering when a acts on the transmon and b on the mode.
SparseOperator tensor(const SparseOperator& a, const SparseOperator& b);

/// Truncated annihilation operator: <n-1|a|n> = sqrt(n).
SparseOperator fock_annihilation(int n_fock);

/// S = sum_u g_{u+1} |u><u+1| with g_{u+1} = sqrt(u+1) * g1.
SparseOperator transmon_lowering(int n_levels, double g1);

/// |row><col| in a space of size `dim`.
SparseOperator ket_bra(std::size_t dim, std::size_t row, std::size_t col);

class StateVector {
public:
    explicit StateVector(Dims dims);
    StateVector(Dims dims, std::vector<cplx> amplitudes);

    static StateVector basis(Dims dims, int u, int n);

    const Dims& dims() const noexcept { return dims_; }
    std::size_t size() const noexcept { return amplitudes_.size(); }
    std::span<cplx> amplitudes() noexcept { return amplitudes_; }
    std::span<const cplx> amplitudes() const noexcept { return amplitudes_; }
    cplx& operator[](std::size_t i) { return amplitudes_[i]; }
    const cplx& operator[](std::size_t i) const { return amplitudes_[i]; }

    double norm_squared() const noexcept;
    /// Rescales to unit norm; throws NumericalError for a zero vector.
    void normalize();

private:
    Dims dims_;
    std::vector<cplx> amplitudes_;
};

/// <psi|A|psi>. The state is assumed normalized.
cplx expectation(const StateVector& psi, const SparseOperator& a);

}  // namespace pbb
