#pragma once

#include <optional>
#include <span>

namespace pbb {

/// y = prefactor * x^exponent.
struct ScalingFit {
    double exponent = 0.0;
    double prefactor = 0.0;
    std::optional<double> exponent_stderr;  ///< unset for a two-point fit
    std::optional<double> log_prefactor_stderr;
    double chi2 = 0.0;  ///< weighted (or plain) sum of squared log residuals
    std::size_t n_points = 0;
};

/// Straight-line fit of log y against log x. With y_err the weights are
/// (y / y_err)^2 and the covariance is unscaled; without, the covariance is
/// scaled by the residual variance.
ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y,
                         std::optional<std::span<const double>> y_err = std::nullopt);

}  // namespace pbb
