#include "bifbm/local_time.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bifbm/error.hpp"

namespace bifbm {

namespace {

long bin_index(double x, double h) {
    return static_cast<long>(std::floor(x / h + 0.5));
}

// Trapezoidal weights of grid points for the part of the path inside [t0, t1].
std::vector<double> occupation_weights(const TimeGrid& grid, Interval interval) {
    std::vector<double> w(grid.size(), 0.0);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        const double a = std::max(grid[i], interval.t0);
        const double b = std::min(grid[i + 1], interval.t1);
        if (!(b > a)) {
            continue;
        }
        const double mid = 0.5 * (grid[i] + grid[i + 1]);
        w[i] += std::max(0.0, std::min(b, mid) - a);
        w[i + 1] += std::max(0.0, b - std::max(a, mid));
    }
    return w;
}

}  // namespace

double LocalTimeEstimate::center(int axis, std::size_t j) const {
    return static_cast<double>(first_bin.at(static_cast<std::size_t>(axis)) + static_cast<long>(j)) * bandwidth;
}

std::vector<double> LocalTimeEstimate::x_centers(int axis) const {
    std::vector<double> out(bins.at(static_cast<std::size_t>(axis)));
    for (std::size_t j = 0; j < out.size(); ++j) {
        out[j] = center(axis, j);
    }
    return out;
}

double LocalTimeEstimate::value_at(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != d) {
        throw DomainError("local time lookup: point has the wrong dimension");
    }
    if (values.empty()) {
        return 0.0;
    }
    std::size_t flat = 0;
    std::size_t stride = 1;
    for (std::size_t a = 0; a < x.size(); ++a) {
        const long j = bin_index(x[a], bandwidth) - first_bin[a];
        if (j < 0 || j >= static_cast<long>(bins[a])) {
            return 0.0;
        }
        flat += static_cast<std::size_t>(j) * stride;
        stride *= bins[a];
    }
    return values[flat];
}

double LocalTimeEstimate::max_value() const {
    return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end());
}

double LocalTimeEstimate::total_mass() const {
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    return sum * std::pow(bandwidth, d);
}

double default_bandwidth(std::size_t n_grid, double hk) {
    if (n_grid == 0) {
        throw DomainError("grid must be nonempty");
    }
    return std::pow(static_cast<double>(n_grid), -hk);
}

LocalTimeEstimate occupation_local_time(const SamplePath& path, Interval interval, double bandwidth) {
    if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
        throw DomainError("local time bandwidth must be positive");
    }
    if (!(interval.t1 >= interval.t0)) {
        throw DomainError("local time interval must satisfy t0 <= t1");
    }
    const TimeGrid& grid = *path.grid;
    if (grid.empty() || interval.t0 < grid.front() || interval.t1 > grid.back()) {
        throw DomainError("local time interval must lie inside the sampled time range");
    }
    LocalTimeEstimate est;
    est.interval = interval;
    est.bandwidth = bandwidth;
    est.n_grid = grid.size();
    est.d = path.d();
    est.outside_existence_regime = static_cast<double>(path.d()) * path.params.hk() >= 1.0;

    const std::vector<double> w = occupation_weights(grid, interval);
    const auto dims = static_cast<std::size_t>(est.d);
    std::vector<long> lo(dims, std::numeric_limits<long>::max());
    std::vector<long> hi(dims, std::numeric_limits<long>::min());
    bool any = false;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) {
            continue;
        }
        any = true;
        for (std::size_t a = 0; a < dims; ++a) {
            const long j = bin_index(path.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)), bandwidth);
            lo[a] = std::min(lo[a], j);
            hi[a] = std::max(hi[a], j);
        }
    }
    if (!any) {
        est.first_bin.assign(dims, 0);
        est.bins.assign(dims, 0);
        return est;
    }
    std::size_t total = 1;
    for (std::size_t a = 0; a < dims; ++a) {
        est.first_bin.push_back(lo[a]);
        est.bins.push_back(static_cast<std::size_t>(hi[a] - lo[a] + 1));
        total *= est.bins.back();
    }
    est.values.assign(total, 0.0);
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (w[i] <= 0.0) {
            continue;
        }
        std::size_t flat = 0;
        std::size_t stride = 1;
        for (std::size_t a = 0; a < dims; ++a) {
            const long j = bin_index(path.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a)), bandwidth);
            flat += static_cast<std::size_t>(j - lo[a]) * stride;
            stride *= est.bins[a];
        }
        est.values[flat] += w[i];
    }
    const double volume = std::pow(bandwidth, est.d);
    for (double& v : est.values) {
        v /= volume;
    }
    return est;
}

double max_local_time(const SamplePath& path, Interval interval, double bandwidth) {
    return occupation_local_time(path, interval, bandwidth).max_value();
}

LocalTimeHolderResult local_time_holder(std::span<const SamplePath> paths, double t0, std::span<const double> radii,
                                        double bins_per_scale) {
    if (paths.empty()) {
        throw DomainError("local time scaling needs at least one path");
    }
    if (radii.size() < 2) {
        throw DomainError("local time scaling needs at least two radii");
    }
    const double hkd = paths.front().params.hk() * paths.front().d();
    LocalTimeHolderResult out;
    for (const double r : radii) {
        if (!(r > 0.0) || r >= std::exp(-1.0)) {
            throw DomainError("local time radii must lie in (0, 1/e)");
        }
        double sum = 0.0;
        for (const auto& path : paths) {
            const TimeGrid& grid = *path.grid;
            const Interval ball{std::max(t0 - r, grid.front()), std::min(t0 + r, grid.back())};
            sum += max_local_time(path, ball, std::pow(r, path.params.hk()) / bins_per_scale);
        }
        const double mean = sum / static_cast<double>(paths.size());
        const double phi1 = std::pow(r, 1.0 - hkd) * std::pow(std::log(std::log(1.0 / r)), hkd);
        out.radii.push_back(r);
        out.mean_max_local_time.push_back(mean);
        out.ratios.push_back(mean / phi1);
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < out.radii.size(); ++i) {
        lx.push_back(std::log(out.radii[i]));
        ly.push_back(std::log(out.mean_max_local_time[i]));
    }
    out.fit = fit_scaling(std::move(lx), std::move(ly));
    return out;
}

}  // namespace bifbm
