#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"
#include "pbb/maxwell_bloch.hpp"

using namespace pbb;

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

MBState random_state(std::mt19937_64& gen, int level_count, double alpha_scale = 2.0) {
    std::normal_distribution<double> n;
    MBState s;
    s.alpha = alpha_scale * cplx(n(gen), n(gen));
    cplx c[3] = {{n(gen), n(gen)}, {n(gen), n(gen)}, {level_count == 3 ? n(gen) : 0.0, level_count == 3 ? n(gen) : 0.0}};
    const double norm = std::norm(c[0]) + std::norm(c[1]) + std::norm(c[2]);
    for (auto& x : c) x /= std::sqrt(norm);
    s.s_gg = std::norm(c[0]);
    s.s_ee = std::norm(c[1]);
    s.s_ff = std::norm(c[2]);
    s.s_ge = std::conj(c[0]) * c[1];
    s.s_ef = std::conj(c[1]) * c[2];
    s.s_gf = std::conj(c[0]) * c[2];
    return s;
}

MBParams random_params(std::mt19937_64& gen, int level_count) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MBParams p;
    p.level_count = level_count;
    p.kappa = 1.0;
    p.g1 = 1.0 + 9.0 * u(gen);
    p.g2 = std::sqrt(2.0) * p.g1;
    p.gamma1 = 0.05 + 0.5 * u(gen);
    p.gamma_phi1 = 0.3 * u(gen);
    p.gamma_phi2 = 2.0 * p.gamma_phi1;
    p.delta = p.g1 * (2.0 * u(gen) - 1.0);
    p.delta_f = -(2.0 + 8.0 * u(gen)) * p.g1;
    p.eta = p.g1 * 2.0 * u(gen);
    return p;
}

/// Textbook two-level optical Bloch equations with a single-mode field, in
/// (alpha, sigma, w = s_ee - s_gg) variables.
struct Bloch2 {
    cplx alpha_dot, sigma_dot;
    double w_dot;
};

Bloch2 bloch_two_level(cplx alpha, cplx sigma, double w, const MBParams& p) {
    const cplx i{0.0, 1.0};
    return {(i * p.delta - p.kappa) * alpha + p.eta - p.g1 * sigma, (i * p.delta - p.gamma1) * sigma - p.g1 * w * alpha,
            -p.gamma1 * (1.0 + w) + 4.0 * p.g1 * std::real(std::conj(alpha) * sigma)};
}

MBParams fig5_params(double nu_eta) {
    SystemParams sys;
    sys.n_levels = 3;
    sys.g1 = two_pi * 344e6;
    sys.kappa_field = std::numbers::pi * 344e6 / 132.0;
    sys.gamma1 = two_pi * 1e3;
    sys.gamma_phi1 = two_pi * 50e3;
    sys.delta = two_pi * -10e6;
    sys.delta_an = two_pi * -418e6;
    sys.eta = two_pi * nu_eta;
    return MBParams::from_system(sys, 3);
}

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("vacuum is a fixed point without drive") {
    for (int lc : {2, 3}) {
        std::mt19937_64 gen(lc);
        auto p = random_params(gen, lc);
        p.eta = 0.0;
        MBState s;
        auto d = mb_rhs(s, p);
        CHECK(std::abs(d.alpha) == 0.0);
        CHECK(std::abs(d.s_ge) + std::abs(d.s_ef) + std::abs(d.s_gf) == 0.0);
        CHECK(d.s_gg == 0.0);
        CHECK(d.s_ee == 0.0);
        CHECK(d.s_ff == 0.0);
    }
}

TEST_CASE("uncoupled field obeys the driven damped cavity equation") {
    std::mt19937_64 gen(4);
    for (int k = 0; k < 10; ++k) {
        auto p = random_params(gen, 3);
        p.g1 = p.g2 = 0.0;
        auto s = random_state(gen, 3);
        CHECK(std::abs(mb_rhs(s, p).alpha - ((cplx(0, p.delta) - p.kappa) * s.alpha + p.eta)) < 1e-14);
    }
}

TEST_CASE("populations are conserved for random states") {
    std::mt19937_64 gen(8);
    for (int k = 0; k < 200; ++k) {
        auto p = random_params(gen, 3);
        auto s = random_state(gen, 3);
        auto d = mb_rhs(s, p);
        CHECK(std::abs(d.s_gg + d.s_ee + d.s_ff) < 1e-12 * (p.g1 + p.gamma1) * (1.0 + std::abs(s.alpha)));
    }
}

TEST_CASE("two-level reduction matches the textbook Bloch equations") {
    std::mt19937_64 gen(12);
    for (int k = 0; k < 200; ++k) {
        auto p = random_params(gen, 2);
        auto s = random_state(gen, 2);
        auto d = mb_rhs(s, p);
        auto b = bloch_two_level(s.alpha, s.s_ge, s.s_ee - s.s_gg, p);
        const double scale = p.rate_scale() * (1.0 + std::abs(s.alpha));
        CHECK(std::abs(d.alpha - b.alpha_dot) < 1e-10 * scale);
        CHECK(std::abs(d.s_ge - b.sigma_dot) < 1e-10 * scale);
        CHECK(std::abs((d.s_ee - d.s_gg) - b.w_dot) < 1e-10 * scale);

        // The three-level system with the f level decoupled reduces to it too.
        auto p3 = p;
        p3.level_count = 3;
        p3.g2 = 0.0;
        auto s3 = s;
        s3.s_ee = 1.0 - s.s_gg;
        auto d3 = mb_rhs(s3, p3);
        CHECK(std::abs(d3.alpha - d.alpha) < 1e-12 * scale);
        CHECK(std::abs(d3.s_ge - d.s_ge) < 1e-12 * scale);
        CHECK(std::abs(d3.s_gg - d.s_gg) < 1e-12 * scale);
        CHECK(std::abs(d3.s_ef) + std::abs(d3.s_gf) + std::abs(d3.s_ff) == 0.0);
    }
}

TEST_CASE("vector layout round-trips") {
    std::mt19937_64 gen(1);
    for (int lc : {2, 3}) {
        auto s = random_state(gen, lc);
        auto v = to_vector(s, lc);
        CHECK(v.size() == (lc == 2 ? 5 : 10));
        auto back = from_vector(v, lc);
        CHECK(back.alpha == s.alpha);
        CHECK(back.s_ge == s.s_ge);
        CHECK(std::abs(back.s_gg + back.s_ee + back.s_ff - 1.0) < 1e-14);
    }
    CHECK_THROWS_AS(from_vector(Eigen::VectorXd::Zero(4), 2), DimensionError);
}

TEST_CASE("dispersive shift") {
    std::mt19937_64 gen(21);
    auto p = random_params(gen, 3);
    auto p0 = p;
    p0.g1 = p0.g2 = 0.0;
    CHECK(dispersive_shift(3.0, p0) == cplx(0.0));

    CHECK(std::abs(dispersive_shift(1e10, p)) < std::abs(dispersive_shift(1e8, p)));
    CHECK(std::abs(dispersive_shift(1e10, p)) < 1e-3 * p.g1);
    CHECK_THROWS_AS(dispersive_shift(-1.0, p), InvalidArgument);

    for (int lc : {2, 3}) {
        for (int k = 0; k < 50; ++k) {
            auto q = random_params(gen, lc);
            const double intensity = std::pow(10.0, -3.0 + 6.0 * std::uniform_real_distribution<double>(0, 1)(gen));
            const cplx sigma = dispersive_shift(intensity, q);
            // Phase independence of the elimination.
            const double phi = std::uniform_real_distribution<double>(0, two_pi)(gen);
            const cplx alpha = std::sqrt(intensity) * std::polar(1.0, phi);
            const auto atom = atom_steady_state(alpha, q);
            const cplx sigma_phi = -(q.g1 * atom.s_ge + (lc == 3 ? q.g2 * atom.s_ef : 0.0)) / alpha;
            CHECK(std::abs(sigma_phi - sigma) <= 1e-10 * std::abs(sigma) + 1e-15 * q.g1);

            // Back-substitution: the atom equations hold at the prescribed field.
            auto d = mb_rhs(atom, q);
            const double scale = q.rate_scale() * std::max(1.0, std::abs(alpha));
            CHECK(std::abs(d.s_ge) < 1e-8 * scale);
            CHECK(std::abs(d.s_gg) < 1e-8 * scale);
            if (lc == 3) {
                CHECK(std::abs(d.s_ef) < 1e-8 * scale);
                CHECK(std::abs(d.s_gf) < 1e-8 * scale);
                CHECK(std::abs(d.s_ee) < 1e-8 * scale);
            }
            CHECK(std::abs(atom.s_gg + atom.s_ee + atom.s_ff - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("intensity residual") {
    MBParams p;
    p.level_count = 3;
    p.kappa = 0.8;
    p.eta = 1.2;
    CHECK(intensity_residual(std::pow(p.eta / p.kappa, 2), p) == doctest::Approx(0.0).scale(1.0));
    CHECK(intensity_residual(1.0, p) < 0.0);
    CHECK(intensity_residual(4.0, p) > 0.0);

    std::mt19937_64 gen(2);
    auto q = random_params(gen, 3);
    CHECK(intensity_residual(0.0, q) == doctest::Approx(-q.eta * q.eta));
}

TEST_CASE("empty cavity has one stable branch at the coherent intensity") {
    for (int lc : {2, 3}) {
        MBParams p;
        p.level_count = lc;
        p.kappa = 1.0;
        p.gamma1 = 0.1;
        p.eta = 3.0;
        p.delta = 0.7;
        auto br = solve_branches(p, 1e3, 2000);
        REQUIRE(br.size() == 1);
        CHECK(br[0].intensity == doctest::Approx(9.0 / (1.0 + 0.49)).epsilon(1e-10));
        CHECK(br[0].stability == Stability::stable);
        CHECK(phase_point(p.delta, p.eta, p) == Phase::bright);
        CHECK(phase_point(p.delta, 0.5, p) == Phase::dim);
    }
    MBParams p;
    CHECK_THROWS_AS(solve_branches(p, 10.0, 999), InvalidArgument);
    CHECK_THROWS_AS(solve_branches(p, 1e-20, 1000), InvalidArgument);
}

TEST_CASE("branches are genuine fixed points bracketed by a dense scan") {
    std::mt19937_64 gen(31);
    int multi = 0;
    for (int k = 0; k < 30; ++k) {
        auto p = random_params(gen, 2 + k % 2);
        const double i_max = 4.0 * p.eta * p.eta / (p.kappa * p.kappa) + 100.0;
        auto br = solve_branches(p, i_max, 2000);
        REQUIRE_FALSE(br.empty());
        for (const auto& b : br) {
            CHECK(b.residual < 1e-8);
            CHECK(steady_residual(b.state, p) < 1e-8);
            CHECK(rel(b.state.intensity(), b.intensity) < 1e-6);
        }
        // Independent sign-change count on a much finer grid.
        int changes = 0;
        const int n = 40000;
        double prev = intensity_residual(1e-18, p);
        for (int i = 1; i <= n; ++i) {
            const double x = 1e-18 * std::pow(i_max / 1e-18, double(i) / n);
            const double r = intensity_residual(x, p);
            if ((r > 0) != (prev > 0)) ++changes;
            prev = r;
        }
        CHECK(int(br.size()) == changes);
        multi += br.size() > 1;
    }
    MESSAGE("multi-branch draws: " << multi);
}

TEST_CASE("threefold solution has an unphysical middle branch") {
    auto p = fig5_params(40e6);
    auto br = solve_branches(p, default_intensity_cap(p), 3000);
    REQUIRE(br.size() == 3);
    CHECK(br[0].stability == Stability::stable);
    CHECK(br[1].stability != Stability::stable);
    CHECK(br[1].negative_slope);
    CHECK(br[2].stability == Stability::stable);
    // The bright branch saturates the transmon and approaches the bare detuned cavity.
    const double bare = p.eta * p.eta / (p.kappa * p.kappa + p.delta * p.delta);
    CHECK(rel(br[2].intensity, bare) < 0.05);
    CHECK(br[0].intensity < 1e-3 * bare);
}

TEST_CASE("linearized and integrated stability tests agree at moderate rates") {
    std::mt19937_64 gen(44);
    StabilityOptions integ;
    integ.method = StabilityMethod::integrate;
    integ.horizon_kappa = 400.0;
    int compared = 0;
    for (int k = 0; k < 20; ++k) {
        auto p = random_params(gen, 3);
        p.gamma1 = 0.3 + p.gamma1;
        auto br = solve_branches(p, 4.0 * p.eta * p.eta + 100.0, 2000);
        for (auto b : br) {
            // Leave out branches too close to marginal for a finite horizon.
            if (std::abs(b.spectral_abscissa) < 1e-3) continue;
            const bool lin = b.dynamically_stable;
            classify_stability(b, p, integ);
            CHECK(b.dynamically_stable == lin);
            ++compared;
        }
    }
    CHECK(compared > 20);
}

TEST_CASE("perturbed stable branch relaxes back") {
    std::mt19937_64 gen(45);
    auto p = random_params(gen, 3);
    auto br = solve_branches(p, 4.0 * p.eta * p.eta + 100.0, 2000);
    const auto it = std::find_if(br.begin(), br.end(), [](auto& b) { return b.stability == Stability::stable; });
    REQUIRE(it != br.end());
    Eigen::VectorXd fp = to_vector(it->state, 3);
    Eigen::VectorXd v = fp;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] *= 1.0 + 1e-3 * ((i % 3) - 1.0);
    MBState s = from_vector(v, 3);
    std::vector<double> dist;
    for (int step = 0; step < 40; ++step) {
        s = integrate_mb(s, p, 10.0 / p.kappa);
        dist.push_back((to_vector(s, 3) - fp).norm());
    }
    CHECK(dist.back() < 1e-6 * fp.norm());
    // Monotone decay after the transient, down to the integrator's noise floor.
    for (std::size_t i = 20; i < dist.size(); ++i) {
        if (dist[i - 1] > 1e-8 * fp.norm()) CHECK(dist[i] <= dist[i - 1] * (1.0 + 1e-6));
    }
}

TEST_CASE("stable branches are the attractors of the dynamics") {
    std::mt19937_64 gen(46);
    for (int k = 0; k < 10; ++k) {
        auto p = random_params(gen, 2 + k % 2);
        const double i_max = 4.0 * p.eta * p.eta + 100.0;
        auto br = solve_branches(p, i_max, 2000);
        std::vector<double> stable;
        for (const auto& b : br) {
            if (b.stability == Stability::stable) stable.push_back(b.intensity);
        }
        std::vector<double> found;
        for (int start = 0; start < 20; ++start) {
            MBState s = random_state(gen, p.level_count, std::sqrt(i_max) / 2.0);
            double t = 0.0;
            while (steady_residual(s, p) > 1e-10 && t < 5000.0) {
                s = integrate_mb(s, p, 50.0);
                t += 50.0;
            }
            REQUIRE(steady_residual(s, p) < 1e-8);
            const double intensity = s.intensity();
            if (std::none_of(found.begin(), found.end(), [&](double f) { return rel(f, intensity) < 1e-5; })) {
                found.push_back(intensity);
            }
        }
        std::sort(found.begin(), found.end());
        INFO("draw " << k);
        CHECK(found.size() == stable.size());
        for (double f : found) {
            CHECK(std::any_of(stable.begin(), stable.end(), [&](double s) { return rel(f, s) < 1e-6; }));
        }
    }
}

TEST_CASE("neoclassical critical point at half the coupling") {
    MBParams p;
    p.level_count = 2;
    p.kappa = 1.0;
    p.g1 = 100.0;
    p.gamma1 = 0.0;
    REQUIRE(p.neoclassical());
    auto bright_count = [&](double x) {
        p.eta = x * p.g1;
        int n = 0;
        for (const auto& b : solve_branches(p, 4.0 * p.eta * p.eta + 100.0, 3000)) n += b.intensity > 1e-6;
        return n;
    };
    CHECK(bright_count(0.45) == 0);
    CHECK(bright_count(0.49) == 0);
    CHECK(bright_count(0.51) > 0);
    CHECK(bright_count(0.6) > 0);
    p.eta = 0.3 * p.g1;
    auto dim = solve_branches(p, 1e6, 2000);
    REQUIRE_FALSE(dim.empty());
    CHECK(dim[0].intensity == 0.0);
    CHECK(dim[0].residual < 1e-12);
}

TEST_CASE("phase points and diagrams") {
    auto p = fig5_params(40e6);
    CHECK(phase_point(p.delta, 0.0, p) == Phase::dim);
    CHECK(phase_point(p.delta, two_pi * 1e3, p) == Phase::dim);
    CHECK(phase_point(p.delta, two_pi * 40e6, p) == Phase::bistable);

    MBParams empty;
    empty.kappa = 1.0;
    empty.gamma1 = 0.1;
    for (double eta : {0.01, 0.5, 2.0, 5.0, 40.0}) CHECK(phase_point(0.0, eta, empty) != Phase::bistable);

    std::vector<double> deltas{two_pi * -20e6, two_pi * -10e6, 0.0};
    std::vector<double> etas{two_pi * 10e6, two_pi * 40e6, two_pi * 70e6, two_pi * 100e6};
    auto coarse = phase_diagram({deltas[0], deltas[2]}, {etas[0], etas[2]}, p, {}, 2);
    auto fine = phase_diagram(deltas, etas, p, {}, 3);
    CHECK(coarse.at(0, 0) == fine.at(0, 0));
    CHECK(coarse.at(0, 1) == fine.at(0, 2));
    CHECK(coarse.at(1, 0) == fine.at(2, 0));
    CHECK(coarse.at(1, 1) == fine.at(2, 2));
    auto one = phase_diagram({deltas[1]}, {etas[1]}, p);
    CHECK(one.cells.size() == 1);
    CHECK(one.at(0, 0) == phase_point(deltas[1], etas[1], p));
    CHECK_THROWS_AS(phase_diagram({1.0, 0.0}, {1.0}, p), InvalidArgument);
    CHECK_THROWS_AS(phase_diagram({}, {1.0}, p), InvalidArgument);

    for (char c : {'D', 'B', 'X'}) CHECK(phase_symbol(phase_from_symbol(c)) == c);
    CHECK_THROWS_AS(phase_from_symbol('Q'), InvalidArgument);
}

TEST_CASE("parameter validation") {
    MBParams p;
    p.level_count = 4;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p.level_count = 3;
    p.kappa = 0.0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);

    SystemParams sys;
    sys.g1 = 2.0;
    sys.gamma_phi1 = 0.3;
    sys.delta_an = -7.0;
    auto m = MBParams::from_system(sys, 3);
    CHECK(m.g2 == doctest::Approx(2.0 * std::sqrt(2.0)));
    CHECK(m.gamma_phi2 == doctest::Approx(0.6));
    CHECK(m.delta_f == -7.0);
}
