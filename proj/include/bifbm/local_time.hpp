#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bifbm/regression.hpp"
#include "bifbm/sampler.hpp"

namespace bifbm {

/// Closed time interval [t0, t1].
struct Interval {
    double t0 = 0.0;
    double t1 = 1.0;
    double length() const noexcept { return t1 - t0; }
};

/// Binned occupation density of a path over a time interval.
///
/// Bins are cubes of side `bandwidth` centered at integer multiples of the
/// bandwidth, so the point 0 is always a bin center. Values are stored with
/// axis 0 varying fastest.
struct LocalTimeEstimate {
    Interval interval;
    double bandwidth = 0.0;
    std::size_t n_grid = 0;
    int d = 1;
    std::vector<long> first_bin;     ///< per axis: index j of the first bin (center j * bandwidth)
    std::vector<std::size_t> bins;   ///< per axis: number of bins
    std::vector<double> values;      ///< time per unit volume
    bool outside_existence_regime = false;  ///< d * HK >= 1 for the generating parameters

    /// Center of bin j along an axis.
    double center(int axis, std::size_t j) const;
    /// Spatial bin centers along an axis.
    std::vector<double> x_centers(int axis = 0) const;
    /// Density of the bin containing x (0 outside the occupied range).
    double value_at(std::span<const double> x) const;
    double value_at(double x) const { return value_at(std::span<const double>(&x, 1)); }
    double max_value() const;
    /// Sum of values times bandwidth^d; equals the occupied time.
    double total_mass() const;
};

/// Default bandwidth n^(-HK): the typical increment size between grid neighbours.
double default_bandwidth(std::size_t n_grid, double hk);

/// Occupation density over `interval` using trapezoidal time weights.
///
/// Each grid cell [t_i, t_{i+1}] clipped to the interval gives the part left of
/// its midpoint to the bin of B(t_i) and the rest to the bin of B(t_{i+1}), so
/// the total mass is the interval length exactly. The interval must lie inside
/// the grid's span.
LocalTimeEstimate occupation_local_time(const SamplePath& path, Interval interval, double bandwidth);

/// Result of the local-time Hoelder scaling study.
struct LocalTimeHolderResult {
    ScalingFit fit;              ///< log of mean L* against log r
    std::vector<double> radii;
    std::vector<double> mean_max_local_time;  ///< mean over paths of max_x L(x, [t0 - r, t0 + r])
    std::vector<double> ratios;  ///< mean L* / phi_1(r), phi_1(r) = r^(1 - HKd) (log log 1/r)^(HKd)
};

/// Maximal local time over balls B(t0, r) for each radius. The bandwidth at
/// radius r is r^HK / bins_per_scale, so the estimate is scale free.
double max_local_time(const SamplePath& path, Interval interval, double bandwidth);

LocalTimeHolderResult local_time_holder(std::span<const SamplePath> paths, double t0, std::span<const double> radii,
                                        double bins_per_scale = 16.0);

}  // namespace bifbm
