#pragma once

#include <string>
#include <vector>

namespace pbb {

/// Uniformly sampled real signal (photon number or output power).
struct TimeSeries {
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;
    std::string unit = "photons";

    std::size_t size() const noexcept { return values.size(); }
    double time(std::size_t i) const noexcept { return t0 + dt * static_cast<double>(i); }

    /// Throws InvalidArgument if dt <= 0 or any value is non-finite.
    void validate() const;
};

}  // namespace pbb
