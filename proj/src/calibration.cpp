#include "pbb/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "pbb/error.hpp"

namespace pbb {

cplx s21_model(double omega, double omega_r, double kappa_fixed, double kappa_vary, double kappa_int) {
    if (!(kappa_fixed >= 0.0 && kappa_vary >= 0.0 && kappa_int >= 0.0)) {
        throw InvalidArgument("s21_model: linewidth contributions must be >= 0");
    }
    const double kappa = kappa_fixed + kappa_vary + kappa_int;
    if (!(kappa > 0.0)) throw InvalidArgument("s21_model: total linewidth must be positive");
    return std::sqrt(kappa_fixed * kappa_vary) / cplx{0.5 * kappa, -(omega - omega_r)};
}

S21Fit fit_s21(std::span<const double> omega, std::span<const double> magnitude, double kappa_fixed,
               double kappa_int) {
    const std::size_t n = omega.size();
    if (magnitude.size() != n) throw DimensionError("fit_s21: omega and magnitude lengths differ");
    if (n < 5) throw InvalidArgument("fit_s21: need at least 5 points");
    if (!(kappa_fixed > 0.0) || !(kappa_int >= 0.0)) {
        throw InvalidArgument("fit_s21: kappa_fixed must be positive and kappa_int non-negative");
    }

    std::vector<double> sorted(magnitude.begin(), magnitude.end());
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
    const double median = sorted[n / 2];
    const auto pk = static_cast<std::size_t>(
        std::distance(magnitude.begin(), std::max_element(magnitude.begin(), magnitude.end())));
    const double peak = magnitude[pk];
    if (!(peak > 0.0) || !(peak >= 2.0 * median)) {
        throw FitError("fit_s21: no discernible resonance peak (maximum below twice the median)");
    }

    // Half-power width around the peak as the initial linewidth.
    const double half_power = peak / std::sqrt(2.0);
    double w_lo = omega[pk];
    double w_hi = omega[pk];
    for (std::size_t i = 0; i < n; ++i) {
        if (magnitude[i] >= half_power) {
            w_lo = std::min(w_lo, omega[i]);
            w_hi = std::max(w_hi, omega[i]);
        }
    }
    const auto [o_min, o_max] = std::minmax_element(omega.begin(), omega.end());
    double kappa0 = w_hi - w_lo;
    if (!(kappa0 > 0.0)) kappa0 = (*o_max - *o_min) / static_cast<double>(n);

    // Dimensionless parameters: x = (omega_r - omega0) / s, v = kappa_vary / s.
    const double omega0 = omega[pk];
    const double s = kappa0;
    const double f = kappa_fixed / s;
    const double fi = kappa_int / s;
    Eigen::Vector2d p(0.0, std::max(kappa0 - kappa_fixed - kappa_int, 1e-3 * kappa0) / s);

    const auto model = [&](const Eigen::Vector2d& q, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
        r.resize(static_cast<Eigen::Index>(n));
        if (jac) jac->resize(static_cast<Eigen::Index>(n), 2);
        const double a = std::sqrt(f * q[1]);
        const double k = f + fi + q[1];
        for (std::size_t i = 0; i < n; ++i) {
            const double d = (omega[i] - omega0) / s - q[0];
            const double den = 0.25 * k * k + d * d;
            const double m = a / std::sqrt(den);
            const auto row = static_cast<Eigen::Index>(i);
            r[row] = m - magnitude[i];
            if (jac) {
                const double den32 = den * std::sqrt(den);
                (*jac)(row, 0) = a * d / den32;
                (*jac)(row, 1) = std::sqrt(f) / (2.0 * std::sqrt(q[1]) * std::sqrt(den)) - a * 0.25 * k / den32;
            }
        }
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    model(p, r, &j);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    int it = 0;
    for (; it < 1000; ++it) {
        const Eigen::Matrix2d h = j.transpose() * j;
        const Eigen::Vector2d g = j.transpose() * r;
        Eigen::Matrix2d a = h;
        a.diagonal() += lambda * h.diagonal().cwiseMax(1e-300);
        const Eigen::Vector2d step = a.ldlt().solve(-g);
        const Eigen::Vector2d trial = p + step;
        bool accepted = false;
        if (trial[1] > 0.0 && step.allFinite()) {
            Eigen::VectorXd r_trial;
            model(trial, r_trial, nullptr);
            const double c_trial = r_trial.squaredNorm();
            if (c_trial <= cost) {
                const double gain = cost - c_trial;
                p = trial;
                cost = c_trial;
                model(p, r, &j);
                lambda = std::max(lambda * 0.1, 1e-15);
                accepted = true;
                if (step.cwiseAbs().maxCoeff() < 1e-15 * (1.0 + p.cwiseAbs().maxCoeff()) ||
                    gain <= 1e-30 * (1.0 + cost)) {
                    break;
                }
            }
        }
        if (!accepted) {
            lambda *= 10.0;
            if (lambda > 1e20) break;
        }
    }

    S21Fit fit;
    fit.omega_r = omega0 + s * p[0];
    fit.kappa_vary = s * p[1];
    fit.kappa_total = kappa_fixed + kappa_int + fit.kappa_vary;
    fit.residual_norm = std::sqrt(cost / static_cast<double>(n));
    fit.iterations = it;
    if (!std::isfinite(fit.omega_r) || !std::isfinite(fit.kappa_vary)) throw FitError("fit_s21: fit diverged");
    return fit;
}

DriveCalibration drive_calibration(double p_in, double omega_r, double kappa_fixed, double kappa_total_fwhm) {
    if (!(p_in > 0.0 && omega_r > 0.0 && kappa_fixed > 0.0 && kappa_total_fwhm > 0.0)) {
        throw InvalidArgument("drive_calibration: all inputs must be positive");
    }
    DriveCalibration c;
    c.n_cav = p_in / (kHbar * omega_r) * (4.0 * kappa_fixed / (kappa_total_fwhm * kappa_total_fwhm));
    c.eta = std::sqrt(c.n_cav) * kappa_total_fwhm / 2.0;
    return c;
}

}  // namespace pbb
