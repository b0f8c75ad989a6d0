#pragma once

#include <span>

#include "pbb/hilbert.hpp"

namespace pbb {

inline constexpr double kHbar = 1.054571817e-34;  ///< J s

/// Transmission sqrt(kf kv) / (kappa/2 - i (omega - omega_r)) with
/// kappa = kappa_fixed + kappa_vary + kappa_int (all angular linewidths).
cplx s21_model(double omega, double omega_r, double kappa_fixed, double kappa_vary, double kappa_int);

struct S21Fit {
    double omega_r = 0.0;
    double kappa_vary = 0.0;
    double kappa_total = 0.0;
    double residual_norm = 0.0;  ///< RMS of |S21| residuals
    int iterations = 0;
};

/// Levenberg-Marquardt fit of |s21_model| to magnitudes sampled at angular
/// frequencies `omega`, with kappa_fixed and kappa_int known. Throws
/// FitError when the data show no peak (maximum < 2x median).
S21Fit fit_s21(std::span<const double> omega, std::span<const double> magnitude, double kappa_fixed,
               double kappa_int);

struct DriveCalibration {
    double n_cav = 0.0;
    double eta = 0.0;  ///< rad/s
};

/// n_cav = P_in / (hbar omega_r) * 4 kappa_fixed / kappa^2 and
/// eta = sqrt(n_cav) kappa / 2, with kappa the angular FWHM linewidth.
DriveCalibration drive_calibration(double p_in, double omega_r, double kappa_fixed, double kappa_total_fwhm);

}  // namespace pbb
