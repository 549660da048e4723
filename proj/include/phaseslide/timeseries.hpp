#pragma once

#include <optional>
#include <vector>

namespace phaseslide {

/// Per-step diagnostics. Column order matches the CSV layout.
struct TimeSeriesRow {
    long step = 0;
    double t = 0.0;
    double sup_dev = 0.0;  ///< ||phi - phistar||_inf
    double l2_dev = 0.0;
    double mu_inf = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double energy = 0.0;
    int newton_iters = 0;
    std::optional<double> w_bound;
    double max_principle_margin = 0.0;  ///< sigma_star - max |sigma|

    bool operator==(const TimeSeriesRow&) const = default;
};

struct TimeSeries {
    std::vector<TimeSeriesRow> rows;
    bool operator==(const TimeSeries&) const = default;
};

} // namespace phaseslide
