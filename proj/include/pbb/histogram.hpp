#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace pbb {

struct Histogram1D {
    std::vector<double> edges;   ///< bins + 1 increasing edges
    std::vector<double> counts;  ///< per bin

    std::size_t bins() const noexcept { return counts.size(); }
    double center(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
    double total() const;
};

/// Equal-width bins on [lo, hi]; values outside are dropped and the upper
/// edge is inclusive.
Histogram1D histogram_1d(std::span<const double> values, std::size_t bins, double lo, double hi);
/// Range taken from the data (padded to a unit width when constant).
Histogram1D histogram_1d(std::span<const double> values, std::size_t bins);

struct Histogram2D {
    std::vector<double> x_edges;
    std::vector<double> y_edges;
    std::vector<double> counts;  ///< row-major: counts[ix * (y_edges.size() - 1) + iy]
    double noise_photons = 0.0;

    std::size_t x_bins() const noexcept { return x_edges.size() - 1; }
    std::size_t y_bins() const noexcept { return y_edges.size() - 1; }
    double at(std::size_t ix, std::size_t iy) const { return counts[ix * y_bins() + iy]; }
};

struct QuadratureRange {
    double lo;
    double hi;
};

/// (I, Q) histogram. When noise_photons > 0 each sample first receives
/// independent Gaussian noise of variance noise_photons / 2 per quadrature,
/// drawn from the pinned generator with `seed`. Both axes share one range,
/// taken from the noisy data unless given.
Histogram2D quadrature_histogram(std::span<const double> i_vals, std::span<const double> q_vals,
                                 std::size_t bins, double noise_photons, std::uint64_t seed = 0,
                                 std::optional<QuadratureRange> range = std::nullopt);

struct BimodalityOptions {
    double prominence = 0.05;  ///< fraction of the global maximum
    double valley = 0.5;       ///< fraction of the lower of two peaks
};

struct Bimodality {
    bool bimodal = false;
    std::vector<double> peaks;  ///< bin centers of prominent maxima, ascending
};

/// Moving-average smoothing (window max(3, bins/50)), prominent local
/// maxima, and a valley test between neighbouring peaks.
Bimodality detect_bimodality(const Histogram1D& hist, const BimodalityOptions& options = {});

}  // namespace pbb
