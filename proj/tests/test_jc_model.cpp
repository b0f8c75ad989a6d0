#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"
#include "pbb/model.hpp"

using namespace pbb;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

SystemParams resonant_two_level(double g, double delta = 0.0) {
    SystemParams p;
    p.g1 = g;
    p.kappa_field = 1.0;
    p.delta = delta;
    p.n_levels = 2;
    return p;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("transmon diagonal energies") {
    SystemParams p;
    p.n_levels = 5;
    p.delta = 0.3;
    p.delta_an = -2.0;
    CHECK(transmon_diagonal(p, 0) == 0.0);
    CHECK(transmon_diagonal(p, 1) == doctest::Approx(-0.3));
    CHECK(transmon_diagonal(p, 2) == doctest::Approx(-0.6 - 2.0));
    CHECK(transmon_diagonal(p, 4) == doctest::Approx(-1.2 - 12.0));
    CHECK_THROWS_AS(transmon_diagonal(p, 5), DimensionError);
    CHECK_THROWS_AS(transmon_diagonal(p, -1), DimensionError);
}

TEST_CASE("single-excitation block shows the vacuum Rabi splitting") {
    const double g = 1.7;
    auto p = resonant_two_level(g);
    Dims d(2, 4);
    Eigen::MatrixXcd h = build_hamiltonian(p, d).to_dense();
    const int i1 = static_cast<int>(d.index(1, 0)), i2 = static_cast<int>(d.index(0, 1));
    Eigen::Matrix2cd block;
    block << h(i1, i1), h(i1, i2), h(i2, i1), h(i2, i2);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(block);
    CHECK(es.eigenvalues()(0) == doctest::Approx(-g).epsilon(1e-14));
    CHECK(es.eigenvalues()(1) == doctest::Approx(g).epsilon(1e-14));
}

TEST_CASE("uncoupled undriven hamiltonian is diagonal") {
    SystemParams p;
    p.n_levels = 3;
    p.delta = 0.4;
    p.delta_an = -3.0;
    Dims d(3, 5);
    Eigen::MatrixXcd h = build_hamiltonian(p, d).to_dense();
    for (int u = 0; u < 3; ++u) {
        for (int n = 0; n < 5; ++n) {
            const auto k = static_cast<int>(d.index(u, n));
            CHECK(h(k, k).real() == doctest::Approx(-n * p.delta + transmon_diagonal(p, u)).epsilon(1e-14));
        }
    }
    Eigen::MatrixXcd off = h;
    off.diagonal().setZero();
    CHECK(max_abs(off) == 0.0);
}

TEST_CASE("second-level diagonal for a transmon at -10 MHz drive detuning") {
    SystemParams p;
    p.n_levels = 3;
    p.g1 = two_pi * 344e6;
    p.delta = two_pi * -10e6;
    p.delta_an = two_pi * -418e6;
    Dims d(3, 4);
    const auto k = d.index(2, 0);
    CHECK(build_hamiltonian(p, d).coeff(k, k).real() == doctest::Approx(two_pi * -398e6).epsilon(1e-13));
}

TEST_CASE("hamiltonian is hermitian for random parameters") {
    std::mt19937_64 gen(5);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 25; ++k) {
        SystemParams p;
        p.n_levels = 2 + k % 4;
        p.g1 = std::abs(u(gen));
        p.eta = u(gen);
        p.delta = u(gen);
        p.delta_an = -std::abs(u(gen));
        Dims d(p.n_levels, 6);
        Eigen::MatrixXcd h = build_hamiltonian(p, d).to_dense();
        CHECK(max_abs(h - h.adjoint()) < 1e-12 * max_abs(h));
    }
}

TEST_CASE("excitation manifolds have energies -n delta +- sqrt(n) g") {
    const double g = 1.3, delta = 0.37;
    auto p = resonant_two_level(g, delta);
    Dims d(2, 8);
    Eigen::MatrixXcd h = build_hamiltonian(p, d).to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
    auto present = [&](double x) {
        return std::any_of(ev.begin(), ev.end(), [&](double e) { return std::abs(e - x) < 1e-10; });
    };
    CHECK(present(0.0));
    for (int n = 1; n <= 5; ++n) {
        CHECK(present(-n * delta + std::sqrt(double(n)) * g));
        CHECK(present(-n * delta - std::sqrt(double(n)) * g));
    }
}

TEST_CASE("jump operator inventory") {
    SystemParams p = resonant_two_level(1.0);
    p.n_levels = 3;
    Dims d(3, 4);
    auto jumps = build_jump_operators(p, d);
    REQUIRE(jumps.size() == 1);
    CHECK(jumps[0].label == "mode_decay");

    p.n_th = 0.2;
    p.gamma1 = 0.1;
    p.gamma_phi1 = 0.8;
    p.dephasing.model = DephasingModel::flux_linear;
    jumps = build_jump_operators(p, d);
    std::vector<std::string> labels;
    for (const auto& j : jumps) labels.push_back(j.label);
    CHECK(labels == std::vector<std::string>{"mode_decay", "thermal_absorption", "relax_1->0", "relax_2->1",
                                             "dephase_1", "dephase_2"});
    CHECK(jumps[0].op.coeff(d.index(0, 0), d.index(0, 1)).real() ==
          doctest::Approx(std::sqrt(2.0 * 1.2 * p.kappa_field)));
    CHECK(jumps[1].op.coeff(d.index(0, 1), d.index(0, 0)).real() ==
          doctest::Approx(std::sqrt(2.0 * 0.2 * p.kappa_field)));
    CHECK(jumps[3].op.coeff(d.index(1, 2), d.index(2, 2)).real() == doctest::Approx(std::sqrt(0.1)));
}

TEST_CASE("flux-linear dephasing rates and phase flips") {
    SystemParams p = resonant_two_level(1.0);
    p.n_levels = 4;
    p.gamma_phi1 = 1.6;
    p.dephasing.model = DephasingModel::flux_linear;
    auto rates = dephasing_rates(p);
    CHECK(rates[0] == 0.0);
    CHECK(rates[1] == doctest::Approx(0.2));
    CHECK(rates[2] == doctest::Approx(p.gamma_phi1 / 4.0));
    CHECK(rates[3] == doctest::Approx(0.6));

    Dims d(4, 3);
    auto jumps = build_jump_operators(p, d);
    const auto& l2 = std::find_if(jumps.begin(), jumps.end(), [](auto& j) { return j.label == "dephase_2"; })->op;
    for (int u = 0; u < 4; ++u) {
        const auto k = d.index(u, 1);
        const double want = (u == 2 ? -1.0 : 1.0) * std::sqrt(rates[2]);
        CHECK(l2.coeff(k, k).real() == doctest::Approx(want));
    }

    p.dephasing.flux_divisor = 2.0;
    CHECK(dephasing_rates(p)[1] == doctest::Approx(0.8));
    p.dephasing.model = DephasingModel::none;
    for (double r : dephasing_rates(p)) CHECK(r == 0.0);
}

TEST_CASE("effective hamiltonian anti-hermitian parts") {
    SystemParams p;
    p.kappa_field = 0.9;
    p.n_levels = 2;
    Dims d(2, 5);
    auto h = build_hamiltonian(p, d);
    CHECK(effective_hamiltonian(h, {}) == h);

    Eigen::MatrixXcd heff = effective_hamiltonian(h, build_jump_operators(p, d)).to_dense();
    Eigen::MatrixXcd anti = (heff - heff.adjoint()) / cplx(0.0, 2.0);
    Eigen::MatrixXcd want = -p.kappa_field * number_operator(d).to_dense();
    CHECK(max_abs(anti - want) < 1e-14);

    SystemParams q = p;
    q.kappa_field = 1e-300;
    q.gamma_phi1 = 0.64;
    q.dephasing.model = DephasingModel::flux_linear;
    auto jumps = build_jump_operators(q, d);
    jumps.erase(jumps.begin());
    REQUIRE(jumps.size() == 1);
    Eigen::MatrixXcd deph = effective_hamiltonian(h, jumps).to_dense() - h.to_dense();
    Eigen::MatrixXcd want_deph = cplx(0.0, -0.5 * 0.08) * Eigen::MatrixXcd::Identity(10, 10);
    CHECK(max_abs(deph - want_deph) < 1e-15);
}

TEST_CASE("sum of jump products is hermitian positive semidefinite") {
    std::mt19937_64 gen(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 10; ++k) {
        SystemParams p;
        p.n_levels = 2 + k % 3;
        p.kappa_field = u(gen) + 0.1;
        p.gamma1 = u(gen);
        p.gamma_phi1 = u(gen);
        p.n_th = k % 2 ? u(gen) : 0.0;
        p.dephasing.model = DephasingModel::flux_linear;
        Dims d(p.n_levels, 5);
        Eigen::MatrixXcd sum = Eigen::MatrixXcd::Zero(d.total(), d.total());
        for (const auto& j : build_jump_operators(p, d)) {
            Eigen::MatrixXcd l = j.op.to_dense();
            sum += l.adjoint() * l;
        }
        CHECK(max_abs(sum - sum.adjoint()) < 1e-14);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sum);
        CHECK(es.eigenvalues().minCoeff() > -1e-12);
    }
}

TEST_CASE("no jump out of the ground state changes it at zero temperature") {
    SystemParams p = resonant_two_level(1.0);
    p.n_levels = 3;
    p.gamma1 = 0.3;
    p.gamma_phi1 = 0.5;
    p.dephasing.model = DephasingModel::flux_linear;
    Dims d(3, 4);
    auto ground = StateVector::basis(d, 0, 0);
    for (const auto& j : build_jump_operators(p, d)) {
        std::vector<cplx> out(d.total());
        j.op.apply(ground.amplitudes(), out);
        for (std::size_t i = 1; i < out.size(); ++i) CHECK(out[i] == cplx(0.0));
        if (j.label.rfind("dephase", 0) != 0) CHECK(out[0] == cplx(0.0));
    }
}

TEST_CASE("charge dispersion weights") {
    auto w = charge_dispersion_weights(30e9, 300e6, 5);
    CHECK(w[1] == 1.0);
    for (int v = 1; v < 5; ++v) CHECK(w[v] > w[v - 1]);

    // Full asymptotic expression evaluated in extended precision.
    auto eps = [](long double ej, long double ec, int m) {
        const long double x = ej / (2 * ec);
        return std::pow(2.0L, 4 * m + 5) / std::tgamma(m + 1.0L) * std::sqrt(2 / std::numbers::pi_v<long double>) *
               std::pow(x, m / 2.0L + 0.75L) * std::exp(-std::sqrt(8 * ej / ec));
    };
    const long double ej = 48e9L, ec = 382e6L;
    auto dev = charge_dispersion_weights(48e9, 382e6, 4);
    for (int m = 0; m < 4; ++m) {
        CHECK(dev[m] == doctest::Approx(double(eps(ej, ec, m) / eps(ej, ec, 1))).epsilon(1e-13));
    }
    CHECK(dev[2] == doctest::Approx(8.0 * std::sqrt(48e9 / (2 * 382e6))).epsilon(1e-13));

    CHECK_THROWS_AS(charge_dispersion_weights(0.0, 1.0, 3), InvalidArgument);
    CHECK_THROWS_AS(charge_dispersion_weights(1.0, -1.0, 3), InvalidArgument);

    std::vector<std::string> seen;
    auto prev = set_warning_handler([&](const std::string& m) { seen.push_back(m); });
    charge_dispersion_weights(10.0, 1.0, 3);
    set_warning_handler(prev);
    CHECK(seen.size() == 1);
}

TEST_CASE("charge-dispersion model optionally dephases the ground level") {
    SystemParams p = resonant_two_level(1.0);
    p.n_levels = 3;
    p.gamma_phi1 = 1.0;
    p.dephasing.model = DephasingModel::charge_dispersion;
    p.dephasing.ej_hz = 48e9;
    p.dephasing.ec_hz = 382e6;
    auto rates = dephasing_rates(p);
    CHECK(rates[0] > 0.0);
    CHECK(rates[1] == doctest::Approx(1.0));
    p.dephasing.charge_include_ground = false;
    CHECK(dephasing_rates(p)[0] == 0.0);
}

TEST_CASE("parameter validation") {
    SystemParams p;
    p.kappa_field = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.kappa_field = 1.0;
    p.gamma1 = -1.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.gamma1 = 0.0;
    p.n_th = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.n_th = 0.0;
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS(build_hamiltonian(p, Dims(3, 4)), DimensionError);
    CHECK(dephasing_model_from_string("flux-linear") == DephasingModel::flux_linear);
    CHECK_THROWS_AS(dephasing_model_from_string("flux"), InvalidArgument);
}
