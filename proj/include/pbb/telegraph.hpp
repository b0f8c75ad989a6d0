#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "pbb/timeseries.hpp"

namespace pbb {

enum class TelegraphState { dim, bright };
const char* to_string(TelegraphState s);

enum class ThresholdMode { half_amplitude, variance_multiple };
std::string to_string(ThresholdMode m);
ThresholdMode threshold_mode_from_string(const std::string& name);

struct ThresholdSpec {
    ThresholdMode mode = ThresholdMode::half_amplitude;
    /// Bright level of a fully developed trace; unset uses the series maximum.
    std::optional<double> reference_high;
    double reference_low = 0.0;
    double k_sigma = 5.0;
    /// Runs shorter than this many samples are absorbed by the preceding run.
    int debounce = 1;
    /// Dim-state noise statistics for variance mode; estimated when unset.
    std::optional<double> dim_mean;
    std::optional<double> dim_sigma;

    void validate() const;
};

/// Level separating dim (value <= level) from bright (value > level).
double threshold_level(const TimeSeries& series, const ThresholdSpec& spec);

struct Interval {
    TelegraphState state;
    double start;     ///< s
    double duration;  ///< s
    std::size_t first_sample;
    std::size_t n_samples;
    bool complete;  ///< false for the first and last (censored) intervals
};

/// Maximal alternating dim/bright intervals covering the whole series.
std::vector<Interval> detect_switches(const TimeSeries& series, const ThresholdSpec& spec);

struct DwellStatistics {
    std::optional<double> t_dim;  ///< unset when no complete dim interval exists
    std::optional<double> t_bright;
    std::optional<double> stderr_dim;  ///< sectioned estimate; unset when unavailable
    std::optional<double> stderr_bright;
    std::size_t n_switches = 0;
    std::size_t n_dim = 0;  ///< complete dim intervals used for t_dim
    std::size_t n_bright = 0;
    double filling = 0.0;  ///< bright time / total time over all intervals
};

/// Mean dwell times over complete intervals, standard errors from
/// n_sections equal time sections of the complete-interval span.
DwellStatistics dwell_statistics(const std::vector<Interval>& intervals, int n_sections = 5);

struct SweepPoint {
    double eta;
    DwellStatistics stats;
};

struct HalfFilling {
    double eta_star;
    double t_star;
};

/// Crossing of t_dim and t_bright, interpolating log t against log eta.
/// Throws NoCrossingError when log(t_dim / t_bright) keeps one sign.
HalfFilling half_filling(std::vector<SweepPoint> sweep);

}  // namespace pbb
