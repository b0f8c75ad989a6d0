#include "pbb/timeseries.hpp"

#include <cmath>

#include "pbb/error.hpp"

namespace pbb {

void TimeSeries::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("TimeSeries.dt must be > 0");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw InvalidArgument("TimeSeries value at index " + std::to_string(i) +
                                  " is not finite");
        }
    }
}

}  // namespace pbb
