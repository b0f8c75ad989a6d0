#include "pbb/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pbb/error.hpp"

namespace pbb {

Dims::Dims(int levels, int fock) : n_levels(levels), n_fock(fock) {
    if (levels < 2 || fock < 2) {
        throw DimensionError("Dims requires n_levels >= 2 and n_fock >= 2, got " +
                             std::to_string(levels) + " x " + std::to_string(fock));
    }
}

SparseOperator::SparseOperator(std::size_t rows, std::size_t cols, std::vector<Triplet> entries,
                               double drop_tolerance)
    : rows_(rows), cols_(cols) {
    for (const auto& t : entries) {
        if (t.row >= rows || t.col >= cols) {
            throw DimensionError("triplet (" + std::to_string(t.row) + "," +
                                 std::to_string(t.col) + ") outside " + std::to_string(rows) +
                                 "x" + std::to_string(cols));
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    row_ptr_.assign(rows + 1, 0);
    col_idx_.reserve(entries.size());
    values_.reserve(entries.size());
    std::size_t i = 0;
    for (std::size_t r = 0; r < rows; ++r) {
        while (i < entries.size() && entries[i].row == r) {
            const std::size_t c = entries[i].col;
            cplx sum = entries[i].value;
            ++i;
            while (i < entries.size() && entries[i].row == r && entries[i].col == c) {
                sum += entries[i].value;
                ++i;
            }
            if (drop_tolerance > 0.0 && std::abs(sum) <= drop_tolerance) continue;
            col_idx_.push_back(c);
            values_.push_back(sum);
        }
        row_ptr_[r + 1] = values_.size();
    }
}

SparseOperator SparseOperator::identity(std::size_t n) {
    std::vector<Triplet> t;
    t.reserve(n);
    for (std::size_t i = 0; i < n; ++i) t.push_back({i, i, 1.0});
    return {n, n, std::move(t)};
}

SparseOperator SparseOperator::zero(std::size_t rows, std::size_t cols) {
    return {rows, cols, {}};
}

cplx SparseOperator::coeff(std::size_t row, std::size_t col) const {
    if (row >= rows_ || col >= cols_) throw DimensionError("coeff index out of range");
    const auto begin = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row]);
    const auto end = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[row + 1]);
    const auto it = std::lower_bound(begin, end, col);
    if (it == end || *it != col) return {0.0, 0.0};
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
    if (x.size() != cols_ || y.size() != rows_) {
        throw DimensionError("apply: operand size mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
        y[r] = acc;
    }
}

void SparseOperator::apply_add(cplx scale, std::span<const cplx> x, std::span<cplx> y) const {
    if (x.size() != cols_ || y.size() != rows_) {
        throw DimensionError("apply_add: operand size mismatch");
    }
    for (std::size_t r = 0; r < rows_; ++r) {
        cplx acc{0.0, 0.0};
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) acc += values_[k] * x[col_idx_[k]];
        y[r] += scale * acc;
    }
}

std::vector<Triplet> SparseOperator::triplets() const {
    std::vector<Triplet> out;
    out.reserve(values_.size());
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            out.push_back({r, col_idx_[k], values_[k]});
        }
    }
    return out;
}

SparseOperator SparseOperator::adjoint() const {
    auto t = triplets();
    for (auto& e : t) {
        std::swap(e.row, e.col);
        e.value = std::conj(e.value);
    }
    return {cols_, rows_, std::move(t)};
}

Eigen::MatrixXcd SparseOperator::to_dense() const {
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows_),
                                                static_cast<Eigen::Index>(cols_));
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col_idx_[k])) += values_[k];
        }
    }
    return m;
}

namespace {
void require_same_shape(const SparseOperator& a, const SparseOperator& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw DimensionError(std::string(op) + ": shape mismatch");
    }
}
}  // namespace

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
    require_same_shape(a, b, "operator+");
    auto t = a.triplets();
    auto tb = b.triplets();
    t.insert(t.end(), tb.begin(), tb.end());
    return {a.rows(), a.cols(), std::move(t)};
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
    return a + cplx{-1.0, 0.0} * b;
}

SparseOperator operator*(cplx scale, const SparseOperator& a) {
    auto t = a.triplets();
    for (auto& e : t) e.value *= scale;
    return {a.rows(), a.cols(), std::move(t)};
}

SparseOperator multiply(const SparseOperator& a, const SparseOperator& b) {
    if (a.cols() != b.rows()) throw DimensionError("multiply: inner dimension mismatch");
    const auto ap = a.row_offsets();
    const auto ac = a.column_indices();
    const auto av = a.values();
    const auto bp = b.row_offsets();
    const auto bc = b.column_indices();
    const auto bv = b.values();

    std::vector<Triplet> out;
    std::vector<cplx> acc(b.cols());
    std::vector<char> used(b.cols(), 0);
    std::vector<std::size_t> touched;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        touched.clear();
        for (std::size_t k = ap[r]; k < ap[r + 1]; ++k) {
            const std::size_t mid = ac[k];
            for (std::size_t m = bp[mid]; m < bp[mid + 1]; ++m) {
                const std::size_t c = bc[m];
                if (!used[c]) {
                    used[c] = 1;
                    acc[c] = 0.0;
                    touched.push_back(c);
                }
                acc[c] += av[k] * bv[m];
            }
        }
        std::sort(touched.begin(), touched.end());
        for (std::size_t c : touched) {
            out.push_back({r, c, acc[c]});
            used[c] = 0;
        }
    }
    return {a.rows(), b.cols(), std::move(out)};
}

SparseOperator tensor(const SparseOperator& a, const SparseOperator& b) {
    const auto ta = a.triplets();
    const auto tb = b.triplets();
    std::vector<Triplet> out;
    out.reserve(ta.size() * tb.size());
    for (const auto& ea : ta) {
        for (const auto& eb : tb) {
            out.push_back({ea.row * b.rows() + eb.row, ea.col * b.cols() + eb.col, ea.value * eb.value});
        }
    }
    return {a.rows() * b.rows(), a.cols() * b.cols(), std::move(out)};
}

SparseOperator fock_annihilation(int n_fock) {
    if (n_fock < 2) throw DimensionError("fock_annihilation requires n_fock >= 2");
    std::vector<Triplet> t;
    for (int n = 1; n < n_fock; ++n) {
        t.push_back({static_cast<std::size_t>(n - 1), static_cast<std::size_t>(n),
                     std::sqrt(static_cast<double>(n))});
    }
    const auto size = static_cast<std::size_t>(n_fock);
    return {size, size, std::move(t)};
}

SparseOperator transmon_lowering(int n_levels, double g1) {
    if (n_levels < 2) throw DimensionError("transmon_lowering requires n_levels >= 2");
    std::vector<Triplet> t;
    for (int u = 0; u + 1 < n_levels; ++u) {
        t.push_back({static_cast<std::size_t>(u), static_cast<std::size_t>(u + 1),
                     std::sqrt(static_cast<double>(u + 1)) * g1});
    }
    const auto size = static_cast<std::size_t>(n_levels);
    return {size, size, std::move(t)};
}

SparseOperator ket_bra(std::size_t dim, std::size_t row, std::size_t col) {
    return {dim, dim, {{row, col, 1.0}}};
}

StateVector::StateVector(Dims dims) : dims_(dims), amplitudes_(dims.total()) {}

StateVector::StateVector(Dims dims, std::vector<cplx> amplitudes)
    : dims_(dims), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != dims_.total()) throw DimensionError("StateVector: size mismatch");
}

StateVector StateVector::basis(Dims dims, int u, int n) {
    if (u < 0 || u >= dims.n_levels || n < 0 || n >= dims.n_fock) {
        throw DimensionError("basis state out of range");
    }
    StateVector psi(dims);
    psi[dims.index(u, n)] = 1.0;
    return psi;
}

double StateVector::norm_squared() const noexcept {
    double s = 0.0;
    for (const auto& c : amplitudes_) s += std::norm(c);
    return s;
}

void StateVector::normalize() {
    const double n2 = norm_squared();
    if (!(n2 > 0.0)) throw NumericalError("cannot normalize a zero state");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& c : amplitudes_) c *= inv;
}

cplx expectation(const StateVector& psi, const SparseOperator& a) {
    if (a.rows() != psi.size() || a.cols() != psi.size()) {
        throw DimensionError("expectation: operator does not match state dimension");
    }
    std::vector<cplx> tmp(psi.size());
    a.apply(psi.amplitudes(), tmp);
    cplx s{0.0, 0.0};
    for (std::size_t i = 0; i < tmp.size(); ++i) s += std::conj(psi[i]) * tmp[i];
    return s;
}

}  // namespace pbb
