#include "pbb/telegraph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pbb/diagnostics.hpp"
#include "pbb/error.hpp"

namespace pbb {

const char* to_string(TelegraphState s) { return s == TelegraphState::dim ? "dim" : "bright"; }

std::string to_string(ThresholdMode m) {
    return m == ThresholdMode::half_amplitude ? "half-amplitude" : "variance-multiple";
}

ThresholdMode threshold_mode_from_string(const std::string& name) {
    if (name == "half-amplitude") return ThresholdMode::half_amplitude;
    if (name == "variance-multiple") return ThresholdMode::variance_multiple;
    throw InvalidArgument("unknown threshold mode '" + name + "'");
}

void ThresholdSpec::validate() const {
    if (!(k_sigma > 0.0)) throw InvalidArgument("ThresholdSpec: k_sigma must be positive");
    if (debounce < 1) throw InvalidArgument("ThresholdSpec: debounce must be >= 1");
    if (reference_high && !(*reference_high > reference_low)) {
        throw InvalidArgument("ThresholdSpec: reference_high must exceed reference_low");
    }
    if (dim_sigma && !(*dim_sigma >= 0.0)) throw InvalidArgument("ThresholdSpec: dim_sigma must be >= 0");
}

double threshold_level(const TimeSeries& series, const ThresholdSpec& spec) {
    spec.validate();
    if (series.values.empty()) throw InvalidArgument("threshold_level: empty series");
    const double high = spec.reference_high
                            ? *spec.reference_high
                            : *std::max_element(series.values.begin(), series.values.end());
    const double half = spec.reference_low + 0.5 * (high - spec.reference_low);
    if (spec.mode == ThresholdMode::half_amplitude) return half;

    double mean = 0.0;
    double sigma = 0.0;
    if (spec.dim_mean && spec.dim_sigma) {
        mean = *spec.dim_mean;
        sigma = *spec.dim_sigma;
    } else {
        std::vector<double> low;
        for (const double v : series.values) {
            if (v <= half) low.push_back(v);
        }
        if (low.size() < 2) {
            throw InvalidArgument("threshold_level: too few dim samples to estimate the dim variance");
        }
        mean = std::accumulate(low.begin(), low.end(), 0.0) / static_cast<double>(low.size());
        double ss = 0.0;
        for (const double v : low) ss += (v - mean) * (v - mean);
        sigma = std::sqrt(ss / static_cast<double>(low.size() - 1));
        if (spec.dim_mean) mean = *spec.dim_mean;
        if (spec.dim_sigma) sigma = *spec.dim_sigma;
    }
    return std::max(half, mean + spec.k_sigma * sigma);
}

std::vector<Interval> detect_switches(const TimeSeries& series, const ThresholdSpec& spec) {
    series.validate();
    if (series.values.empty()) throw InvalidArgument("detect_switches: empty series");
    const double level = threshold_level(series, spec);

    struct Run {
        TelegraphState state;
        std::size_t first;
        std::size_t n;
    };
    std::vector<Run> runs;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto s = series.values[i] > level ? TelegraphState::bright : TelegraphState::dim;
        if (!runs.empty() && runs.back().state == s) {
            ++runs.back().n;
        } else {
            runs.push_back({s, i, 1});
        }
    }

    const auto min_len = static_cast<std::size_t>(spec.debounce);
    std::vector<Run> merged;
    for (const Run& r : runs) {
        if (merged.empty()) {
            merged.push_back(r);
        } else if (r.n < min_len) {
            merged.back().n += r.n;
        } else if (merged.back().state == r.state) {
            merged.back().n += r.n;
        } else if (merged.size() == 1 && merged.back().n < min_len) {
            // A short leading run takes the state of the first long run.
            merged.back().state = r.state;
            merged.back().n += r.n;
        } else {
            merged.push_back(r);
        }
    }

    std::vector<Interval> out;
    out.reserve(merged.size());
    for (std::size_t k = 0; k < merged.size(); ++k) {
        const Run& r = merged[k];
        out.push_back({r.state, series.time(r.first), series.dt * static_cast<double>(r.n), r.first, r.n,
                       k > 0 && k + 1 < merged.size()});
    }
    return out;
}

DwellStatistics dwell_statistics(const std::vector<Interval>& intervals, int n_sections) {
    if (n_sections < 2) throw InvalidArgument("dwell_statistics: n_sections must be >= 2");
    DwellStatistics st;
    if (intervals.empty()) return st;
    st.n_switches = intervals.size() - 1;

    double total = 0.0;
    double bright = 0.0;
    double sum_dim = 0.0;
    double sum_bright = 0.0;
    for (const auto& iv : intervals) {
        total += iv.duration;
        if (iv.state == TelegraphState::bright) bright += iv.duration;
        if (!iv.complete) continue;
        if (iv.state == TelegraphState::dim) {
            sum_dim += iv.duration;
            ++st.n_dim;
        } else {
            sum_bright += iv.duration;
            ++st.n_bright;
        }
    }
    st.filling = total > 0.0 ? bright / total : 0.0;
    if (st.n_dim > 0) st.t_dim = sum_dim / static_cast<double>(st.n_dim);
    if (st.n_bright > 0) st.t_bright = sum_bright / static_cast<double>(st.n_bright);

    if (st.n_switches < static_cast<std::size_t>(n_sections) || intervals.size() < 3) return st;
    const double span_lo = intervals[1].start;
    const double span_hi = intervals[intervals.size() - 2].start + intervals[intervals.size() - 2].duration;
    const double width = (span_hi - span_lo) / n_sections;
    if (!(width > 0.0)) return st;

    const auto sectioned = [&](TelegraphState state) -> std::optional<double> {
        std::vector<double> sum(static_cast<std::size_t>(n_sections), 0.0);
        std::vector<std::size_t> count(static_cast<std::size_t>(n_sections), 0);
        for (const auto& iv : intervals) {
            if (!iv.complete || iv.state != state) continue;
            auto k = static_cast<std::size_t>((iv.start - span_lo) / width);
            k = std::min(k, static_cast<std::size_t>(n_sections - 1));
            sum[k] += iv.duration;
            ++count[k];
        }
        std::vector<double> means;
        for (std::size_t k = 0; k < sum.size(); ++k) {
            if (count[k] == 0) return std::nullopt;
            means.push_back(sum[k] / static_cast<double>(count[k]));
        }
        const double m = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(means.size());
        double ss = 0.0;
        for (const double x : means) ss += (x - m) * (x - m);
        return std::sqrt(ss / static_cast<double>(means.size() - 1)) / std::sqrt(static_cast<double>(means.size()));
    };
    st.stderr_dim = sectioned(TelegraphState::dim);
    st.stderr_bright = sectioned(TelegraphState::bright);
    return st;
}

HalfFilling half_filling(std::vector<SweepPoint> sweep) {
    std::erase_if(sweep, [](const SweepPoint& p) {
        const bool ok = p.eta > 0.0 && p.stats.t_dim && p.stats.t_bright && *p.stats.t_dim > 0.0 &&
                        *p.stats.t_bright > 0.0;
        if (!ok) warn("half_filling: skipping sweep point without both dwell means");
        return !ok;
    });
    if (sweep.size() < 2) throw InvalidArgument("half_filling: need at least two usable sweep points");
    std::sort(sweep.begin(), sweep.end(), [](const SweepPoint& a, const SweepPoint& b) { return a.eta < b.eta; });

    std::vector<double> x, ld, lb, r;
    for (const auto& p : sweep) {
        x.push_back(std::log(p.eta));
        ld.push_back(std::log(*p.stats.t_dim));
        lb.push_back(std::log(*p.stats.t_bright));
        r.push_back(ld.back() - lb.back());
    }
    for (std::size_t k = 1; k < x.size(); ++k) {
        if (ld[k] > ld[k - 1] || lb[k] < lb[k - 1]) {
            warn("half_filling: dwell times are not monotone in eta near eta = " + std::to_string(sweep[k].eta));
            break;
        }
    }
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (r[k] == 0.0) return {sweep[k].eta, *sweep[k].stats.t_dim};
        if (k + 1 < x.size() && std::signbit(r[k]) != std::signbit(r[k + 1]) && r[k + 1] != 0.0) {
            const double f = r[k] / (r[k] - r[k + 1]);
            const double xs = x[k] + f * (x[k + 1] - x[k]);
            const double lt = ld[k] + f * (ld[k + 1] - ld[k]);
            return {std::exp(xs), std::exp(lt)};
        }
    }
    throw NoCrossingError("half_filling: t_dim and t_bright do not cross in the sweep", std::exp(r.front()),
                          std::exp(r.back()));
}

}  // namespace pbb
