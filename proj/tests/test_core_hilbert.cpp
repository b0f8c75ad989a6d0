#include <doctest.h>

#include <cmath>
#include <random>

#include "pbb/error.hpp"
#include "pbb/hilbert.hpp"
#include "pbb/model.hpp"
#include "test_support.hpp"

using namespace pbb;

namespace {

SparseOperator from_dense(const Eigen::MatrixXcd& m) {
    std::vector<Triplet> t;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) {
            if (m(i, j) != cplx{}) t.push_back({std::size_t(i), std::size_t(j), m(i, j)});
        }
    }
    return SparseOperator(m.rows(), m.cols(), t);
}

Eigen::VectorXcd to_eigen(const StateVector& s) {
    Eigen::VectorXcd v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v(i) = s[i];
    return v;
}

StateVector random_state(Dims d, std::mt19937_64& gen) {
    std::normal_distribution<double> n;
    StateVector s(d);
    for (auto& a : s.amplitudes()) a = {n(gen), n(gen)};
    s.normalize();
    return s;
}

}  // namespace

TEST_CASE("dims validation and transmon-major index") {
    CHECK_THROWS_AS(Dims(1, 4), DimensionError);
    CHECK_THROWS_AS(Dims(2, 1), DimensionError);
    Dims d(3, 5);
    CHECK(d.total() == 15);
    CHECK(d.index(2, 3) == 13);
}

TEST_CASE("fock annihilation") {
    CHECK_THROWS_AS(fock_annihilation(1), DimensionError);

    Eigen::MatrixXcd two = fock_annihilation(2).to_dense();
    Eigen::MatrixXcd expected(2, 2);
    expected << 0, 1, 0, 0;
    CHECK(two == expected);

    Dims d(2, 2);
    auto a = mode_annihilation(d);
    StateVector one = StateVector::basis(d, 0, 1);
    std::vector<cplx> out(d.total());
    a.apply(one.amplitudes(), out);
    CHECK(out[d.index(0, 0)] == cplx(1.0));
    StateVector vac = StateVector::basis(d, 0, 0);
    a.apply(vac.amplitudes(), out);
    for (auto x : out) CHECK(x == cplx(0.0));

    Dims d8(2, 8);
    CHECK(expectation(StateVector::basis(d8, 0, 5), number_operator(d8)).real() == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(expectation(StateVector::basis(d8, 1, 0), number_operator(d8)) == cplx(0.0));
    CHECK(expectation(StateVector::basis(d8, 0, 1), number_operator(d8)).real() == doctest::Approx(1.0));
}

TEST_CASE("commutator is identity below the top Fock state") {
    for (int n = 2; n <= 12; ++n) {
        Eigen::MatrixXcd a = fock_annihilation(n).to_dense();
        Eigen::MatrixXcd c = a * a.adjoint() - a.adjoint() * a;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const cplx want = (i == j) ? cplx(i == n - 1 ? 1.0 - n : 1.0) : cplx(0.0);
                CHECK(std::abs(c(i, j) - want) < 1e-12);
            }
        }
    }
}

TEST_CASE("transmon lowering entries") {
    Eigen::MatrixXcd two = transmon_lowering(2, 0.7).to_dense();
    CHECK(two(0, 1) == cplx(0.7));
    CHECK(two.cwiseAbs().sum() == doctest::Approx(0.7));

    auto s3 = transmon_lowering(3, 1.0);
    CHECK(s3.nnz() == 2);
    CHECK(s3.coeff(0, 1) == cplx(1.0));
    CHECK(s3.coeff(1, 2).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

    auto s5 = transmon_lowering(5, 2.0);
    for (int u = 0; u < 4; ++u) {
        CHECK(s5.coeff(u, u + 1).real() == doctest::Approx(2.0 * std::sqrt(u + 1.0)).epsilon(1e-15));
    }
    CHECK(std::abs(s5.coeff(1, 2) / s5.coeff(0, 1) - std::sqrt(2.0)) < 1e-15);
}

TEST_CASE("tensor product layout") {
    auto i6 = tensor(SparseOperator::identity(2), SparseOperator::identity(3));
    CHECK(i6 == SparseOperator::identity(6));

    auto k = tensor(ket_bra(2, 0, 1), SparseOperator::identity(2));
    CHECK(k.rows() == 4);
    Dims d(2, 2);
    std::vector<cplx> out(4);
    k.apply(StateVector::basis(d, 1, 0).amplitudes(), out);
    CHECK(out[d.index(0, 0)] == cplx(1.0));
    CHECK(std::abs(out[1]) + std::abs(out[2]) + std::abs(out[3]) == 0.0);
}

TEST_CASE("tensor matches dense Kronecker and is associative") {
    std::mt19937_64 gen(11);
    auto a = testing::random_dense(2, 3, gen);
    auto b = testing::random_dense(3, 2, gen);
    auto c = testing::random_dense(2, 2, gen, 0.7);
    Eigen::MatrixXcd kron(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int j = 0; j < a.cols(); ++j) kron.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
    CHECK((tensor(from_dense(a), from_dense(b)).to_dense() - kron).norm() < 1e-14);

    auto sa = from_dense(a), sb = from_dense(b), sc = from_dense(c);
    CHECK((tensor(tensor(sa, sb), sc).to_dense() - tensor(sa, tensor(sb, sc)).to_dense()).norm() < 1e-14);
}

TEST_CASE("adjoint is an involution") {
    std::mt19937_64 gen(3);
    for (int k = 0; k < 10; ++k) {
        auto a = from_dense(testing::random_dense(7, 5, gen));
        CHECK(a.adjoint().adjoint() == a);
        CHECK((a.adjoint().to_dense() - a.to_dense().adjoint()).norm() == 0.0);
    }
}

TEST_CASE("explicit zeros are kept unless a drop tolerance is given") {
    std::vector<Triplet> t{{0, 0, 0.0}, {1, 1, 1e-20}, {0, 1, 2.0}};
    CHECK(SparseOperator(2, 2, t).nnz() == 3);
    CHECK(SparseOperator(2, 2, t, 1e-15).nnz() == 1);
    std::vector<Triplet> dup{{0, 0, 1.0}, {0, 0, 2.0}};
    CHECK(SparseOperator(2, 2, dup).coeff(0, 0) == cplx(3.0));
}

TEST_CASE("sparse product agrees with dense reference on random 64-dim instances") {
    std::mt19937_64 gen(2024);
    for (int trial = 0; trial < 20; ++trial) {
        auto m = testing::random_dense(64, 64, gen, 0.15);
        auto op = from_dense(m);
        Dims d(4, 16);
        auto psi = random_state(d, gen);
        std::vector<cplx> y(64);
        op.apply(psi.amplitudes(), y);
        Eigen::VectorXcd ref = m * to_eigen(psi);
        double err = 0.0;
        for (int i = 0; i < 64; ++i) err = std::max(err, std::abs(y[i] - ref(i)));
        CHECK(err <= 1e-12 * std::max(1.0, ref.cwiseAbs().maxCoeff()));

        std::vector<cplx> acc(64, cplx(1.0, -1.0));
        op.apply_add(cplx(0.5, 2.0), psi.amplitudes(), acc);
        for (int i = 0; i < 64; ++i) CHECK(std::abs(acc[i] - (cplx(1.0, -1.0) + cplx(0.5, 2.0) * ref(i))) < 1e-12);

        auto m2 = testing::random_dense(64, 64, gen, 0.15);
        CHECK((multiply(op, from_dense(m2)).to_dense() - m * m2).norm() < 1e-12 * (m * m2).norm());
    }
}

TEST_CASE("expectation values") {
    std::mt19937_64 gen(7);
    Dims d(3, 6);
    auto id = SparseOperator::identity(d.total());
    auto num = number_operator(d);
    for (int k = 0; k < 20; ++k) {
        auto psi = random_state(d, gen);
        CHECK(std::abs(psi.norm_squared() - 1.0) < 1e-12);
        CHECK(std::abs(expectation(psi, id) - 1.0) < 1e-12);
        CHECK(std::abs(expectation(psi, num).imag()) < 1e-10);

        auto a = from_dense(testing::random_dense(18, 18, gen));
        const cplx ada = expectation(psi, multiply(a.adjoint(), a));
        CHECK(ada.real() >= -1e-12);
        CHECK(std::abs(ada.imag()) < 1e-10);
    }
    CHECK_THROWS_AS(expectation(StateVector(Dims(2, 2)), num), DimensionError);
}

TEST_CASE("normalize rejects the zero vector") {
    StateVector s(Dims(2, 3));
    CHECK_THROWS_AS(s.normalize(), NumericalError);
}
