#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pbb::ode {

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b (5th order) minus b* (4th order).
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

template <class Vec>
struct Workspace {
    Vec k2, k3, k4, k5, k6, tmp;
};

/// One step of size h from y, given k1 = f(y). Writes the 5th-order result
/// to y_out, f(y_out) to k7 (first-same-as-last), and the embedded error
/// vector to err. `f(in, out)` evaluates the right-hand side.
template <class Vec, class Rhs>
void dp5_step(const Rhs& f, const Vec& y, const Vec& k1, double h, Vec& y_out, Vec& k7, Vec& err,
              Workspace<Vec>& ws) {
    ws.tmp = y + h * (a21 * k1);
    f(ws.tmp, ws.k2);
    ws.tmp = y + h * (a31 * k1 + a32 * ws.k2);
    f(ws.tmp, ws.k3);
    ws.tmp = y + h * (a41 * k1 + a42 * ws.k2 + a43 * ws.k3);
    f(ws.tmp, ws.k4);
    ws.tmp = y + h * (a51 * k1 + a52 * ws.k2 + a53 * ws.k3 + a54 * ws.k4);
    f(ws.tmp, ws.k5);
    ws.tmp = y + h * (a61 * k1 + a62 * ws.k2 + a63 * ws.k3 + a64 * ws.k4 + a65 * ws.k5);
    f(ws.tmp, ws.k6);
    y_out = y + h * (b1 * k1 + b3 * ws.k3 + b4 * ws.k4 + b5 * ws.k5 + b6 * ws.k6);
    f(y_out, k7);
    err = h * (e1 * k1 + e3 * ws.k3 + e4 * ws.k4 + e5 * ws.k5 + e6 * ws.k6 + e7 * k7);
}

/// Standard step-size update for an order-5 pair; err_ratio = err / tol.
inline double next_step(double h, double err_ratio) {
    if (err_ratio <= 0.0) return 5.0 * h;
    const double factor = 0.9 * std::pow(err_ratio, -0.2);
    return h * std::clamp(factor, 0.2, 5.0);
}

struct AdaptiveOptions {
    double rtol = 1e-9;
    double atol = 1e-12;
    double h0 = 0.0;  ///< initial step; 0 picks t_end * 1e-6
    long max_steps = 50'000'000;
};

/// Integrates y' = f(y) from 0 to t_end with scaled max-norm error control.
/// `observer(t, y)` is called after each accepted step and may return false
/// to stop early. Returns the time reached.
template <class Vec, class Rhs, class Observer>
double integrate_adaptive(const Rhs& f, Vec& y, double t_end, const AdaptiveOptions& opt,
                          Observer&& observer) {
    Workspace<Vec> ws;
    Vec k1, k7, y_new, err;
    f(y, k1);
    double t = 0.0;
    double h = opt.h0 > 0.0 ? opt.h0 : t_end * 1e-6;
    long steps = 0;
    while (t < t_end) {
        if (++steps > opt.max_steps) throw std::runtime_error("integrate_adaptive: step limit");
        const double h_try = std::min(h, t_end - t);
        dp5_step(f, y, k1, h_try, y_new, k7, err, ws);
        double ratio = 0.0;
        for (decltype(err.size()) i = 0; i < err.size(); ++i) {
            const double scale =
                opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            ratio = std::max(ratio, std::abs(err[i]) / scale);
        }
        if (!std::isfinite(ratio)) {
            h = 0.2 * h_try;
            continue;
        }
        if (ratio > 1.0) {
            h = next_step(h_try, ratio);
            continue;
        }
        t = (h_try == t_end - t) ? t_end : t + h_try;
        y.swap(y_new);
        k1.swap(k7);
        // A step clipped at t_end does not shrink the controller's step.
        const double proposal = next_step(h_try, ratio);
        h = h_try < h ? std::max(h, proposal) : proposal;
        if (!observer(t, y)) break;
    }
    return t;
}

}  // namespace pbb::ode
