#pragma once

#include <string>
#include <vector>

#include "rwasim/engine.hpp"

namespace rwasim {

// Fixed result schema, one row per sweep cell.  Numeric columns use six
// fractional digits and no locale, so identical inputs render identical
// bytes on every platform.
inline constexpr const char* kCsvHeader =
    "scheme,sweep_param,sweep_value,attack_kind,utilization_mean,utilization_std,"
    "n_seeds,leftover_mean,defaults_mean";

std::string render_csv_row(const SweepPoint& point);
std::string render_csv(const std::vector<SweepPoint>& points);

} // namespace rwasim
