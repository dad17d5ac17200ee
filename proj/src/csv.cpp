#include "rwasim/csv.hpp"

#include <cstdio>

namespace rwasim {

namespace {

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6f", v);
    return std::string(buf);
}

} // namespace

std::string render_csv_row(const SweepPoint& point) {
    std::string row;
    row += point.scheme;
    row += ',';
    row += point.sweep_param;
    row += ',';
    row += fixed6(point.sweep_value);
    row += ',';
    row += point.attack_kind;
    row += ',';
    row += fixed6(point.utilization_mean);
    row += ',';
    row += fixed6(point.utilization_std);
    row += ',';
    row += std::to_string(point.n_seeds);
    row += ',';
    row += fixed6(point.leftover_mean);
    row += ',';
    row += fixed6(point.defaults_mean);
    return row;
}

std::string render_csv(const std::vector<SweepPoint>& points) {
    std::string out = kCsvHeader;
    out += '\n';
    for (const SweepPoint& point : points) {
        out += render_csv_row(point);
        out += '\n';
    }
    return out;
}

} // namespace rwasim
