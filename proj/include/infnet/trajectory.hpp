#ifndef INFNET_TRAJECTORY_HPP
#define INFNET_TRAJECTORY_HPP

#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "infnet/quantify.hpp"

namespace infnet {

/// One worldline sample.  All three pipelines (discrete simulation, ODE
/// integration, analytic solution) emit the same record, so their outputs can
/// be diffed directly.  side/gap are set only on discrete reception rows.
///
/// rapidity duplicates ln(k) because k, t and x can exceed double range on
/// long runs while the rapidity stays small; slope fits use this field.
struct TrajectoryPoint {
    double tau = 0.0;
    double t = 0.0;
    double x = 0.0;
    double v = 0.0;
    double k = 1.0;
    double rapidity = 0.0;
    std::optional<Side> side;
    long gap = 0;
};

inline constexpr const char* trajectory_csv_header = "tau,t,x,v,k,side,gap";

/// Lossless, locale-independent double rendering; identical inputs always
/// produce identical bytes.
inline std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

inline void write_csv(std::ostream& out, const std::vector<TrajectoryPoint>& points) {
    out << trajectory_csv_header << '\n';
    for (const auto& p : points) {
        out << format_double(p.tau) << ',' << format_double(p.t) << ','
            << format_double(p.x) << ',' << format_double(p.v) << ','
            << format_double(p.k) << ',';
        if (p.side) out << side_char(*p.side);
        out << ',';
        if (p.side) out << p.gap;
        out << '\n';
    }
}

inline std::string to_csv(const std::vector<TrajectoryPoint>& points) {
    std::ostringstream out;
    write_csv(out, points);
    return out.str();
}

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    long n = 0;
};

/// Ordinary least squares of rapidity against proper time.  In the constant
/// one-sided regime the slope estimates the proper acceleration.
inline LineFit fit_rapidity_slope(const std::vector<TrajectoryPoint>& points) {
    if (points.size() < 2) {
        throw std::invalid_argument("fit_rapidity_slope: need at least two samples");
    }
    double mean_tau = 0.0;
    double mean_phi = 0.0;
    for (const auto& p : points) {
        mean_tau += p.tau;
        mean_phi += p.rapidity;
    }
    const double n = static_cast<double>(points.size());
    mean_tau /= n;
    mean_phi /= n;
    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& p : points) {
        sxx += (p.tau - mean_tau) * (p.tau - mean_tau);
        sxy += (p.tau - mean_tau) * (p.rapidity - mean_phi);
    }
    if (sxx == 0.0) {
        throw std::invalid_argument("fit_rapidity_slope: degenerate tau grid");
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = mean_phi - fit.slope * mean_tau;
    fit.n = static_cast<long>(points.size());
    return fit;
}

struct DeviationStats {
    double max_rel = 0.0;
    double rms_rel = 0.0;
    long samples = 0;
};

/// Pointwise relative deviation of a trajectory from a reference worldline
/// given as tau -> (t, x).  Components whose reference value is negligible on
/// the trajectory's own scale are skipped rather than divided by ~0.
template <class RefFn>
DeviationStats deviation_from_solution(const std::vector<TrajectoryPoint>& points,
                                       RefFn&& reference) {
    double scale = 1.0;
    for (const auto& p : points) {
        scale = std::max({scale, std::abs(p.t), std::abs(p.x)});
    }
    const double floor = 1e-9 * scale;
    DeviationStats stats;
    double sum_sq = 0.0;
    for (const auto& p : points) {
        const auto [rt, rx] = reference(p.tau);
        for (const auto& [have, want] : {std::pair{p.t, rt}, std::pair{p.x, rx}}) {
            if (std::abs(want) <= floor) continue;
            const double rel = std::abs(have - want) / std::abs(want);
            stats.max_rel = std::max(stats.max_rel, rel);
            sum_sq += rel * rel;
            ++stats.samples;
        }
    }
    if (stats.samples > 0) {
        stats.rms_rel = std::sqrt(sum_sq / static_cast<double>(stats.samples));
    }
    return stats;
}

} // namespace infnet

#endif // INFNET_TRAJECTORY_HPP
