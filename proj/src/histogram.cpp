#include "pbb/histogram.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"
#include "pbb/rng.hpp"

namespace pbb {

namespace {

std::vector<double> make_edges(std::size_t bins, double lo, double hi) {
    std::vector<double> e(bins + 1);
    for (std::size_t i = 0; i <= bins; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins);
    e.back() = hi;
    return e;
}

std::optional<std::size_t> bin_of(double v, double lo, double hi, std::size_t bins) {
    if (!(v >= lo && v <= hi)) return std::nullopt;
    auto k = static_cast<std::size_t>((v - lo) / (hi - lo) * static_cast<double>(bins));
    return std::min(k, bins - 1);
}

std::pair<double, double> padded_range(double lo, double hi) {
    if (hi > lo) return {lo, hi};
    return {lo - 0.5, hi + 0.5};
}

}  // namespace

double Histogram1D::total() const { return std::accumulate(counts.begin(), counts.end(), 0.0); }

Histogram1D histogram_1d(std::span<const double> values, std::size_t bins, double lo, double hi) {
    if (bins < 1) throw InvalidArgument("histogram_1d: bins must be >= 1");
    if (!(hi > lo)) throw InvalidArgument("histogram_1d: hi must exceed lo");
    Histogram1D h;
    h.edges = make_edges(bins, lo, hi);
    h.counts.assign(bins, 0.0);
    for (const double v : values) {
        if (const auto k = bin_of(v, lo, hi, bins)) h.counts[*k] += 1.0;
    }
    return h;
}

Histogram1D histogram_1d(std::span<const double> values, std::size_t bins) {
    if (values.empty()) throw InvalidArgument("histogram_1d: no values");
    const auto [mn, mx] = std::minmax_element(values.begin(), values.end());
    const auto [lo, hi] = padded_range(*mn, *mx);
    return histogram_1d(values, bins, lo, hi);
}

Histogram2D quadrature_histogram(std::span<const double> i_vals, std::span<const double> q_vals,
                                 std::size_t bins, double noise_photons, std::uint64_t seed,
                                 std::optional<QuadratureRange> range) {
    if (i_vals.size() != q_vals.size()) throw DimensionError("quadrature_histogram: I and Q lengths differ");
    if (bins < 1) throw InvalidArgument("quadrature_histogram: bins must be >= 1");
    if (!(noise_photons >= 0.0)) throw InvalidArgument("quadrature_histogram: noise_photons must be >= 0");
    std::vector<double> xi(i_vals.begin(), i_vals.end());
    std::vector<double> xq(q_vals.begin(), q_vals.end());
    if (noise_photons > 0.0) {
        Rng rng(seed);
        const double sigma = std::sqrt(0.5 * noise_photons);
        for (std::size_t k = 0; k < xi.size(); ++k) {
            xi[k] += sigma * rng.normal();
            xq[k] += sigma * rng.normal();
        }
    }
    double lo = 0.0;
    double hi = 1.0;
    if (range) {
        lo = range->lo;
        hi = range->hi;
        if (!(hi > lo)) throw InvalidArgument("quadrature_histogram: empty range");
    } else if (!xi.empty()) {
        const auto [a, b] = std::minmax_element(xi.begin(), xi.end());
        const auto [c, d] = std::minmax_element(xq.begin(), xq.end());
        std::tie(lo, hi) = padded_range(std::min(*a, *c), std::max(*b, *d));
    }
    Histogram2D h;
    h.noise_photons = noise_photons;
    h.x_edges = make_edges(bins, lo, hi);
    h.y_edges = h.x_edges;
    h.counts.assign(bins * bins, 0.0);
    for (std::size_t k = 0; k < xi.size(); ++k) {
        const auto bx = bin_of(xi[k], lo, hi, bins);
        const auto by = bin_of(xq[k], lo, hi, bins);
        if (bx && by) h.counts[*bx * bins + *by] += 1.0;
    }
    return h;
}

Bimodality detect_bimodality(const Histogram1D& hist, const BimodalityOptions& options) {
    const std::size_t n = hist.bins();
    Bimodality out;
    if (n < 3) return out;
    if (hist.total() < 100.0) warn("detect_bimodality: fewer than 100 counts");

    const std::size_t window = std::max<std::size_t>(3, n / 50);
    const std::size_t half = window / 2;
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= half ? i - half : 0;
        const std::size_t b = std::min(n - 1, i + (window - 1 - half));
        double acc = 0.0;
        for (std::size_t j = a; j <= b; ++j) acc += hist.counts[j];
        s[i] = acc / static_cast<double>(b - a + 1);
    }
    const double global = *std::max_element(s.begin(), s.end());
    if (!(global > 0.0)) return out;

    // Local maxima; a plateau counts once, at its left end.
    std::vector<std::size_t> maxima;
    for (std::size_t i = 0; i < n; ++i) {
        const bool left = i == 0 || s[i] > s[i - 1];
        std::size_t j = i;
        while (j + 1 < n && s[j + 1] == s[i]) ++j;
        const bool right = j + 1 == n || s[j + 1] < s[i];
        if (left && right && s[i] > 0.0) maxima.push_back(i);
        i = j;
    }

    std::vector<std::size_t> peaks;
    for (const std::size_t p : maxima) {
        double left_min = s[p];
        std::size_t k = p;
        while (k > 0 && s[k - 1] <= s[p]) left_min = std::min(left_min, s[--k]);
        double right_min = s[p];
        k = p;
        while (k + 1 < n && s[k + 1] <= s[p]) right_min = std::min(right_min, s[++k]);
        const double base = std::max(left_min, right_min);
        if (s[p] - base >= options.prominence * global) peaks.push_back(p);
    }

    for (const std::size_t p : peaks) out.peaks.push_back(hist.center(p));
    for (std::size_t a = 0; a + 1 < peaks.size(); ++a) {
        const std::size_t lo = peaks[a];
        const std::size_t hi = peaks[a + 1];
        const double valley = *std::min_element(s.begin() + static_cast<std::ptrdiff_t>(lo),
                                                s.begin() + static_cast<std::ptrdiff_t>(hi) + 1);
        if (valley < options.valley * std::min(s[lo], s[hi])) out.bimodal = true;
    }
    return out;
}

}  // namespace pbb
