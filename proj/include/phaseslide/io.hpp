#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "phaseslide/core.hpp"
#include "phaseslide/timeseries.hpp"

namespace phaseslide {

/// %.17g, reparses to the same double.
std::string format_double(double v);

inline constexpr const char* kTimeSeriesHeader =
    "step,t,sup_dev,l2_dev,mu_inf,sigma_min,sigma_max,energy,newton_iters,w_bound,max_principle_margin";

void write_timeseries(const TimeSeries& series, std::ostream& os);
void emit_timeseries(const TimeSeries& series, const std::filesystem::path& path);
TimeSeries read_timeseries(std::istream& is);
TimeSeries read_timeseries(const std::filesystem::path& path);

/// 1D: header `x,value` then one row per node. 2D: row-major matrix, one line per y index.
void write_snapshot(const ScalarField& field, std::ostream& os);
void emit_snapshot(const ScalarField& field, const std::filesystem::path& path);
ScalarField read_snapshot(std::istream& is, const Grid& grid);
ScalarField read_snapshot(const std::filesystem::path& path, const Grid& grid);

/// P2 grayscale, [min, max] mapped linearly onto [0, 255]; a constant field is all zeros.
/// 2D images are written with the top row at the largest y.
void write_pgm(const ScalarField& field, std::ostream& os);
void emit_pgm(const ScalarField& field, const std::filesystem::path& path);

/// File name of the snapshot at `step`, e.g. phi_000100.csv.
std::string snapshot_name(const std::string& field, long step, const std::string& extension);

} // namespace phaseslide
