#include "pbb/fitting.hpp"

#include <cmath>
#include <vector>

#include "pbb/error.hpp"

namespace pbb {

ScalingFit fit_power_law(std::span<const double> x, std::span<const double> y,
                         std::optional<std::span<const double>> y_err) {
    const std::size_t n = x.size();
    if (y.size() != n || (y_err && y_err->size() != n)) {
        throw DimensionError("fit_power_law: x, y and y_err must have equal length");
    }
    if (n < 2) throw InvalidArgument("fit_power_law: need at least two points");
    std::vector<double> lx(n), ly(n), w(n, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0) || !std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw InvalidArgument("fit_power_law: x and y must be positive and finite");
        }
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        if (y_err) {
            const double e = (*y_err)[i];
            if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("fit_power_law: y_err must be positive");
            const double rel = e / y[i];
            w[i] = 1.0 / (rel * rel);
        }
    }

    double sw = 0.0, mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sw += w[i];
        mx += w[i] * lx[i];
        my += w[i] * ly[i];
    }
    mx /= sw;
    my /= sw;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += w[i] * (lx[i] - mx) * (lx[i] - mx);
        sxy += w[i] * (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw FitError("fit_power_law: all x values coincide");

    ScalingFit fit;
    fit.n_points = n;
    fit.exponent = sxy / sxx;
    const double intercept = my - fit.exponent * mx;
    fit.prefactor = std::exp(intercept);
    for (std::size_t i = 0; i < n; ++i) {
        const double res = ly[i] - (intercept + fit.exponent * lx[i]);
        fit.chi2 += w[i] * res * res;
    }

    if (n == 2) return fit;
    double var_b = 1.0 / sxx;
    double var_a = 1.0 / sw + mx * mx / sxx;
    if (!y_err) {
        const double s2 = fit.chi2 / static_cast<double>(n - 2);
        var_b *= s2;
        var_a *= s2;
    }
    fit.exponent_stderr = std::sqrt(var_b);
    fit.log_prefactor_stderr = std::sqrt(var_a);
    return fit;
}

}  // namespace pbb
