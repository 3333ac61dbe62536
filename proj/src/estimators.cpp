#include "bifbm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "bifbm/error.hpp"
#include "bifbm/parallel.hpp"

namespace bifbm {

namespace {

Eigen::MatrixXd::ConstColXpr first_component(const SamplePath& path) {
    if (path.size() == 0) {
        throw EmptySetError("path has no points");
    }
    return path.values.col(0);
}

// Linear interpolation of y on the grid at t, starting the search at `hint`
// (advanced monotonically by the caller for increasing queries).
double interpolate(const TimeGrid& grid, const Eigen::Ref<const Eigen::VectorXd>& y, double t, std::size_t& hint) {
    const std::size_t n = grid.size();
    if (t <= grid.front()) {
        return y(0);
    }
    if (t >= grid.back()) {
        return y(static_cast<Eigen::Index>(n - 1));
    }
    while (hint + 1 < n && grid[hint + 1] < t) {
        ++hint;
    }
    while (hint > 0 && grid[hint] > t) {
        --hint;
    }
    const double a = grid[hint];
    const double b = grid[hint + 1];
    const double w = (t - a) / (b - a);
    return (1.0 - w) * y(static_cast<Eigen::Index>(hint)) + w * y(static_cast<Eigen::Index>(hint + 1));
}

// Largest spacing among grid cells meeting [a, b].
double max_spacing_on(const TimeGrid& grid, double a, double b) {
    double h = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (grid[i + 1] > a && grid[i] < b) {
            h = std::max(h, grid[i + 1] - grid[i]);
        }
    }
    return h;
}

double tail_fit_guard(std::size_t count, std::size_t n, double x) {
    if (count == 0) {
        throw EmptySetError("no path satisfied the small-ball event at x = " + std::to_string(x) +
                            "; increase the number of paths or x");
    }
    if (count == n) {
        throw DomainError("every path satisfied the small-ball event at x = " + std::to_string(x) +
                          "; decrease x");
    }
    return std::log(-std::log(static_cast<double>(count) / static_cast<double>(n)));
}

SmallBallResult small_ball_from_statistic(std::span<const double> stat, std::span<const double> x_values) {
    SmallBallResult out;
    out.n_paths = stat.size();
    std::vector<double> lx;
    std::vector<double> ly;
    for (const double x : x_values) {
        const auto count = static_cast<std::size_t>(
            std::count_if(stat.begin(), stat.end(), [x](double m) { return m <= x; }));
        out.x_values.push_back(x);
        out.counts.push_back(count);
        out.probabilities.push_back(static_cast<double>(count) / static_cast<double>(stat.size()));
        ly.push_back(tail_fit_guard(count, stat.size(), x));
        lx.push_back(std::log(1.0 / x));
    }
    out.fit = fit_scaling(std::move(lx), std::move(ly));
    return out;
}

void require_decreasing(std::span<const double> v, const char* what) {
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] < v[i - 1])) {
            throw DomainError(std::string(what) + " must be strictly decreasing");
        }
    }
}

// Points binned at one scale, counted as distinct boxes.
std::size_t distinct_boxes(std::vector<std::vector<long>>& keys) {
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
}

long box(double v, double delta) {
    return static_cast<long>(std::floor(v / delta));
}

}  // namespace

TimeGrid log_grid(std::size_t n_points, double t_max, double min_ratio) {
    if (n_points < 2) {
        throw DomainError("log grid needs at least two positive points");
    }
    if (!(min_ratio > 0.0 && min_ratio < 1.0)) {
        throw DomainError("log grid ratio must lie in (0, 1)");
    }
    return TimeGrid::geometric(t_max * min_ratio, t_max, n_points, true);
}

double quadratic_variation(const SamplePath& path, Interval interval) {
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    double qv = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (grid[i] >= interval.t0 && grid[i + 1] <= interval.t1) {
            const double d = b(static_cast<Eigen::Index>(i + 1)) - b(static_cast<Eigen::Index>(i));
            qv += d * d;
            ++used;
        }
    }
    if (used == 0) {
        throw EmptySetError("quadratic variation: fewer than two grid points in the interval");
    }
    return qv;
}

std::vector<double> chung_statistic(const SamplePath& path, std::span<const double> radii) {
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    const double hk = path.params.hk();
    std::vector<double> out;
    out.reserve(radii.size());
    for (const double r : radii) {
        if (!(r > 0.0) || r >= std::exp(-1.0)) {
            throw DomainError("Chung radii must lie in (0, 1/e)");
        }
        if (grid.back() < r) {
            throw DomainError("path does not cover [0, r] for r = " + std::to_string(r));
        }
        double m = 0.0;
        for (std::size_t i = 0; i < grid.size() && grid[i] <= r; ++i) {
            m = std::max(m, std::abs(b(static_cast<Eigen::Index>(i))));
        }
        out.push_back(m * std::pow(std::log(std::log(1.0 / r)), hk) / std::pow(r, hk));
    }
    return out;
}

SmallBallResult small_ball_mc(const BifBmParams& p, std::span<const double> x_values, std::size_t n_paths,
                              std::size_t n_grid, std::uint64_t seed, double min_ratio) {
    if (p.d() != 1) {
        throw DomainError("small-ball estimator needs d = 1");
    }
    if (x_values.size() < 2 || n_paths == 0) {
        throw DomainError("small-ball estimator needs at least two levels and one path");
    }
    require_decreasing(x_values, "small-ball levels");
    const LampertiSampler sampler(log_grid(n_grid, 1.0, min_ratio), p, LampertiMode::circulant);
    std::vector<double> maxima(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        const SamplePath path = sampler.sample(seed, i);
        maxima[i] = path.values.col(0).cwiseAbs().maxCoeff();
    });
    return small_ball_from_statistic(maxima, x_values);
}

double holder_norm(const SamplePath& path, double alpha) {
    if (!(alpha > 0.0) || alpha >= path.params.hk()) {
        throw DomainError("Hoelder exponent must lie in (0, HK)");
    }
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    std::size_t n = 0;
    while (n < grid.size() && grid[n] <= 1.0) {
        ++n;
    }
    double sup = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double num = std::abs(b(static_cast<Eigen::Index>(j)) - b(static_cast<Eigen::Index>(i)));
            sup = std::max(sup, num / std::pow(grid[j] - grid[i], alpha));
        }
    }
    return sup;
}

SmallBallResult holder_small_ball_mc(const BifBmParams& p, double alpha, std::span<const double> eps_values,
                                     std::size_t n_paths, std::size_t n_grid, std::uint64_t seed) {
    if (eps_values.size() < 2 || n_paths == 0) {
        throw DomainError("Hoelder small-ball estimator needs at least two levels and one path");
    }
    require_decreasing(eps_values, "Hoelder small-ball levels");
    const LampertiSampler sampler(log_grid(n_grid, 1.0, 1e-4), p, LampertiMode::circulant);
    std::vector<double> norms(n_paths);
    parallel_for(n_paths, [&](std::size_t i) { norms[i] = holder_norm(sampler.sample(seed, i), alpha); });
    return small_ball_from_statistic(norms, eps_values);
}

ScalingFit box_count_fit(std::span<const double> scales, std::span<const double> counts, std::size_t trim) {
    if (scales.size() != counts.size()) {
        throw DomainError("box counts and scales differ in length");
    }
    require_decreasing(scales, "box scales");
    if (scales.size() < 2 * trim + 2) {
        throw DomainError("too few box scales left after trimming");
    }
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = trim; i + trim < scales.size(); ++i) {
        if (!(counts[i] > 0.0)) {
            throw EmptySetError("box count is zero at scale " + std::to_string(scales[i]));
        }
        lx.push_back(std::log(1.0 / scales[i]));
        ly.push_back(std::log(counts[i]));
    }
    return fit_scaling(std::move(lx), std::move(ly));
}

std::vector<double> dyadic_scales(const TimeGrid& grid, double max_spacing_ratio, int j_min) {
    const double h = max_spacing_on(grid, grid.front(), grid.back());
    std::vector<double> out;
    for (int j = j_min; j < 60; ++j) {
        const double delta = std::ldexp(1.0, -j);
        if (delta < max_spacing_ratio * h) {
            break;
        }
        out.push_back(delta);
    }
    return out;
}

std::vector<double> level_set_box_counts(const SamplePath& path, double x, double epsilon,
                                         std::span<const double> scales) {
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    std::vector<double> hits;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double s = b(static_cast<Eigen::Index>(i)) - x;
        bool hit = std::abs(s) < epsilon;
        if (!hit && i + 1 < grid.size()) {
            hit = s * (b(static_cast<Eigen::Index>(i + 1)) - x) < 0.0;
        }
        if (hit) {
            hits.push_back(grid[i]);
        }
    }
    std::vector<double> counts;
    for (const double delta : scales) {
        std::size_t c = 0;
        long last = 0;
        for (std::size_t k = 0; k < hits.size(); ++k) {
            const long j = box(hits[k], delta);
            if (k == 0 || j != last) {
                ++c;
                last = j;
            }
        }
        counts.push_back(static_cast<double>(c));
    }
    return counts;
}

ScalingFit level_set_dimension(std::span<const SamplePath> paths, double x, double epsilon,
                               std::span<const double> scales, std::size_t trim) {
    if (paths.empty()) {
        throw DomainError("level-set dimension needs at least one path");
    }
    std::vector<double> mean(scales.size(), 0.0);
    for (const auto& path : paths) {
        const auto c = level_set_box_counts(path, x, epsilon, scales);
        for (std::size_t i = 0; i < c.size(); ++i) {
            mean[i] += c[i] / static_cast<double>(paths.size());
        }
    }
    if (std::all_of(mean.begin(), mean.end(), [](double c) { return c == 0.0; })) {
        throw EmptySetError("level set is empty on every path");
    }
    return box_count_fit(scales, mean, trim);
}

ScalingFit level_set_dimension(const SamplePath& path, double x, double epsilon, std::span<const double> scales,
                               std::size_t trim) {
    return level_set_dimension(std::span<const SamplePath>(&path, 1), x, epsilon, scales, trim);
}

std::vector<double> level_set_box_counts(const SampleField& field, double x, std::span<const double> scales) {
    if (field.grids.size() != 2 || field.values.cols() != 1) {
        throw DomainError("sheet level sets are supported for N = 2, d = 1");
    }
    const TimeGrid& g0 = field.grids[0];
    const TimeGrid& g1 = field.grids[1];
    const std::size_t n0 = g0.size();
    const std::size_t n1 = g1.size();
    auto value = [&](std::size_t i, std::size_t j) {
        return field.values(static_cast<Eigen::Index>(i + n0 * j), 0) - x;
    };
    std::vector<std::pair<double, double>> hits;
    for (std::size_t j = 0; j + 1 < n1; ++j) {
        for (std::size_t i = 0; i + 1 < n0; ++i) {
            const double a = value(i, j);
            const double b = value(i + 1, j);
            const double c = value(i, j + 1);
            const double e = value(i + 1, j + 1);
            const double lo = std::min({a, b, c, e});
            const double hi = std::max({a, b, c, e});
            if (lo <= 0.0 && hi >= 0.0) {
                hits.emplace_back(g0[i], g1[j]);
            }
        }
    }
    std::vector<double> counts;
    for (const double delta : scales) {
        std::vector<std::pair<long, long>> boxes;
        boxes.reserve(hits.size());
        for (const auto& [s, t] : hits) {
            boxes.emplace_back(box(s, delta), box(t, delta));
        }
        std::sort(boxes.begin(), boxes.end());
        counts.push_back(static_cast<double>(std::unique(boxes.begin(), boxes.end()) - boxes.begin()));
    }
    return counts;
}

std::vector<double> graph_image_box_counts(const SamplePath& path, DimensionTarget target,
                                           std::span<const double> scales) {
    const TimeGrid& grid = *path.grid;
    const std::size_t n = grid.size();
    if (n == 0 || !path.values.allFinite()) {
        throw EmptySetError("graph/image point cloud is empty or not finite");
    }
    std::vector<double> counts;
    for (const double delta : scales) {
        if (target == DimensionTarget::graph && path.d() == 1) {
            // Column-wise range of the piecewise-linear path.
            const auto b = path.values.col(0);
            double total = 0.0;
            std::size_t i = 0;
            while (i < n) {
                const long col = box(grid[i], delta);
                double lo = b(static_cast<Eigen::Index>(i));
                double hi = lo;
                std::size_t j = i;
                while (j < n && box(grid[j], delta) == col) {
                    lo = std::min(lo, b(static_cast<Eigen::Index>(j)));
                    hi = std::max(hi, b(static_cast<Eigen::Index>(j)));
                    ++j;
                }
                if (j < n) {
                    // the segment leaving the column
                    lo = std::min(lo, b(static_cast<Eigen::Index>(j)));
                    hi = std::max(hi, b(static_cast<Eigen::Index>(j)));
                }
                total += static_cast<double>(box(hi, delta) - box(lo, delta) + 1);
                i = j;
            }
            counts.push_back(total);
            continue;
        }
        std::vector<std::vector<long>> keys(n);
        for (std::size_t i = 0; i < n; ++i) {
            auto& k = keys[i];
            if (target == DimensionTarget::graph) {
                k.push_back(box(grid[i], delta));
            }
            for (int c = 0; c < path.d(); ++c) {
                k.push_back(box(path.values(static_cast<Eigen::Index>(i), c), delta));
            }
        }
        counts.push_back(static_cast<double>(distinct_boxes(keys)));
    }
    return counts;
}

std::vector<double> graph_image_box_counts(const SampleField& field, DimensionTarget target,
                                           std::span<const double> scales) {
    const auto n = static_cast<std::size_t>(field.values.rows());
    if (n == 0 || !field.values.allFinite()) {
        throw EmptySetError("graph/image point cloud is empty or not finite");
    }
    std::vector<double> counts;
    for (const double delta : scales) {
        std::vector<std::vector<long>> keys(n);
        for (std::size_t p = 0; p < n; ++p) {
            auto& k = keys[p];
            if (target == DimensionTarget::graph) {
                std::size_t rest = p;
                for (const auto& g : field.grids) {
                    k.push_back(box(g[rest % g.size()], delta));
                    rest /= g.size();
                }
            }
            for (Eigen::Index c = 0; c < field.values.cols(); ++c) {
                k.push_back(box(field.values(static_cast<Eigen::Index>(p), c), delta));
            }
        }
        counts.push_back(static_cast<double>(distinct_boxes(keys)));
    }
    return counts;
}

ScalingFit graph_image_dimension(std::span<const SamplePath> paths, DimensionTarget target,
                                 std::span<const double> scales, std::size_t trim) {
    if (paths.empty()) {
        throw DomainError("dimension estimate needs at least one path");
    }
    std::vector<double> mean(scales.size(), 0.0);
    for (const auto& path : paths) {
        const auto c = graph_image_box_counts(path, target, scales);
        for (std::size_t i = 0; i < c.size(); ++i) {
            mean[i] += c[i] / static_cast<double>(paths.size());
        }
    }
    return box_count_fit(scales, mean, trim);
}

ScalingFit graph_image_dimension(const SampleField& field, DimensionTarget target, std::span<const double> scales,
                                 std::size_t trim) {
    const auto c = graph_image_box_counts(field, target, scales);
    return box_count_fit(scales, c, trim);
}

double renormalization_functional(const SamplePath& path, const std::function<double(double)>& f, double t_end) {
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    if (!(t_end > grid.front()) || t_end > grid.back()) {
        throw DomainError("renormalization horizon must lie inside the sampled range");
    }
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < grid.size() && grid[i] < t_end; ++i) {
        const double a = grid[i];
        const double fa = f(b(static_cast<Eigen::Index>(i)));
        double c = grid[i + 1];
        double vc = b(static_cast<Eigen::Index>(i + 1));
        if (c > t_end) {
            const double w = (t_end - a) / (c - a);
            vc = (1.0 - w) * b(static_cast<Eigen::Index>(i)) + w * vc;
            c = t_end;
        }
        integral += 0.5 * (c - a) * (fa + f(vc));
    }
    return std::pow(t_end, path.params.hk() - 1.0) * integral;
}

std::vector<double> oscillation_moments(const SamplePath& path, double epsilon, int k_max) {
    if (!(epsilon > 0.0) || k_max < 1) {
        throw DomainError("oscillation moments need eps > 0 and k_max >= 1");
    }
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    if (!grid.starts_at_zero() || grid.back() < 1.0 + epsilon) {
        throw DomainError("oscillation moments need a path on [0, 1 + eps]");
    }
    const double h = max_spacing_on(grid, 0.0, 1.0 + epsilon);
    if (h > epsilon / 8.0 * (1.0 + 1e-12)) {
        throw ResolutionError("grid spacing " + std::to_string(h) + " exceeds eps/8 = " +
                              std::to_string(epsilon / 8.0));
    }
    const double scale = std::pow(epsilon, -path.params.hk());
    std::vector<double> nodes;
    for (std::size_t i = 0; i < grid.size() && grid[i] < 1.0; ++i) {
        nodes.push_back(grid[i]);
    }
    nodes.push_back(1.0);
    std::vector<double> z(nodes.size());
    std::size_t hint0 = 0;
    std::size_t hint1 = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double at = interpolate(grid, b, nodes[i], hint0);
        const double ahead = interpolate(grid, b, nodes[i] + epsilon, hint1);
        z[i] = (ahead - at) * scale;
    }
    std::vector<double> out(static_cast<std::size_t>(k_max), 0.0);
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double w = 0.5 * (nodes[i + 1] - nodes[i]);
        double pa = 1.0;
        double pb = 1.0;
        for (int k = 0; k < k_max; ++k) {
            pa *= z[i];
            pb *= z[i + 1];
            out[static_cast<std::size_t>(k)] += w * (pa + pb);
        }
    }
    return out;
}

std::size_t count_crossings(std::span<const double> values, double u) {
    std::size_t n = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        const double a = values[i] - u;
        const double c = values[i + 1] - u;
        if (a * c < 0.0) {
            ++n;
        } else if (c == 0.0 && i + 2 < values.size()) {
            ++n;
        }
    }
    return n;
}

CrossingResult crossing_count_localtime(const SamplePath& path, const std::function<double(double)>& f,
                                        std::span<const double> epsilons, std::span<const double> u_grid) {
    if (epsilons.empty() || u_grid.size() < 2) {
        throw DomainError("crossing study needs smoothing scales and at least two levels");
    }
    require_decreasing(epsilons, "smoothing scales");
    const double du = u_grid[1] - u_grid[0];
    for (std::size_t k = 1; k < u_grid.size(); ++k) {
        if (std::abs((u_grid[k] - u_grid[k - 1]) - du) > 1e-9 * std::abs(du) || !(du > 0.0)) {
            throw DomainError("crossing levels must be increasing and uniformly spaced");
        }
    }
    const auto b = first_component(path);
    const TimeGrid& grid = *path.grid;
    const double eps_max = epsilons.front();
    const double eps_min = epsilons.back();
    if (grid.back() - grid.front() <= eps_max) {
        throw DomainError("path is shorter than the largest smoothing scale");
    }
    const double h = max_spacing_on(grid, grid.front(), grid.back());
    if (h > eps_min / 8.0 * (1.0 + 1e-12)) {
        throw ResolutionError("grid spacing " + std::to_string(h) + " exceeds min eps/8 = " +
                              std::to_string(eps_min / 8.0));
    }
    CrossingResult out;
    out.interval = Interval{grid.front(), grid.back() - eps_max};
    out.epsilons.assign(epsilons.begin(), epsilons.end());

    // Running integral of the piecewise-linear path.
    const std::size_t n = grid.size();
    std::vector<double> cum(n, 0.0);
    for (std::size_t i = 1; i < n; ++i) {
        cum[i] = cum[i - 1] +
                 0.5 * (grid[i] - grid[i - 1]) * (b(static_cast<Eigen::Index>(i)) + b(static_cast<Eigen::Index>(i - 1)));
    }
    auto integral_to = [&](double t, std::size_t& j) {
        while (j + 1 < n && grid[j + 1] <= t) {
            ++j;
        }
        if (j + 1 >= n) {
            return cum[n - 1];
        }
        const double s = t - grid[j];
        const double len = grid[j + 1] - grid[j];
        const double b0 = b(static_cast<Eigen::Index>(j));
        const double b1 = b(static_cast<Eigen::Index>(j + 1));
        return cum[j] + b0 * s + (b1 - b0) * s * s / (2.0 * len);
    };

    std::size_t m = 0;
    while (m < n && grid[m] <= out.interval.t1) {
        ++m;
    }
    const double hk = path.params.hk();
    for (const double eps : epsilons) {
        std::vector<double> smooth(m);
        std::size_t j = 0;
        for (std::size_t i = 0; i < m; ++i) {
            smooth[i] = (integral_to(grid[i] + eps, j) - cum[i]) / eps;
        }
        // diff[k] accumulates crossings of level u_grid[k]
        std::vector<long> diff(u_grid.size() + 1, 0);
        for (std::size_t i = 0; i + 1 < m; ++i) {
            const double lo = std::min(smooth[i], smooth[i + 1]);
            const double hi = std::max(smooth[i], smooth[i + 1]);
            const auto first = std::upper_bound(u_grid.begin(), u_grid.end(), lo) - u_grid.begin();
            const auto last = std::lower_bound(u_grid.begin(), u_grid.end(), hi) - u_grid.begin();
            if (last > first) {
                ++diff[static_cast<std::size_t>(first)];
                --diff[static_cast<std::size_t>(last)];
            }
            if (i + 2 < m) {
                // a value landing exactly on a level counts once
                const auto hit = std::lower_bound(u_grid.begin(), u_grid.end(), smooth[i + 1]);
                if (hit != u_grid.end() && *hit == smooth[i + 1]) {
                    const auto k = static_cast<std::size_t>(hit - u_grid.begin());
                    ++diff[k];
                    --diff[k + 1];
                }
            }
        }
        double sum = 0.0;
        long running = 0;
        for (std::size_t k = 0; k < u_grid.size(); ++k) {
            running += diff[k];
            sum += f(u_grid[k]) * static_cast<double>(running) * du;
        }
        out.crossing_integrals.push_back(std::sqrt(std::numbers::pi / 2.0) * std::pow(eps, 1.0 - hk) * sum);
    }
    const LocalTimeEstimate lt = occupation_local_time(path, out.interval, du);
    double lt_sum = 0.0;
    for (const double u : u_grid) {
        lt_sum += f(u) * lt.value_at(u) * du;
    }
    out.local_time_integral = lt_sum;
    for (const double c : out.crossing_integrals) {
        out.ratios.push_back(c / lt_sum);
    }
    return out;
}

TailResult local_time_tail(const BifBmParams& p, std::span<const double> x_values, std::size_t n_paths,
                           std::uint64_t seed, std::size_t n_grid) {
    if (x_values.empty() || n_paths == 0) {
        throw DomainError("local-time tail needs levels and paths");
    }
    const LampertiSampler sampler(log_grid(n_grid), p, LampertiMode::circulant);
    const double bandwidth = default_bandwidth(n_grid, p.hk());
    std::vector<double> lt(n_paths);
    parallel_for(n_paths, [&](std::size_t i) {
        const SamplePath path = sampler.sample(seed, i);
        lt[i] = occupation_local_time(path, Interval{0.0, 1.0}, bandwidth).value_at(std::vector<double>(p.d(), 0.0));
    });
    TailResult out;
    out.n_paths = n_paths;
    std::vector<double> lx;
    std::vector<double> ly;
    for (const double x : x_values) {
        const auto count =
            static_cast<std::size_t>(std::count_if(lt.begin(), lt.end(), [x](double v) { return v > x; }));
        if (count == 0 || count == n_paths) {
            continue;
        }
        const double nlp = -std::log(static_cast<double>(count) / static_cast<double>(n_paths));
        out.x_values.push_back(x);
        out.neg_log_probabilities.push_back(nlp);
        lx.push_back(std::log(x));
        ly.push_back(std::log(nlp));
    }
    if (lx.size() < 2) {
        throw EmptySetError("local-time tail: fewer than two levels with observed exceedances");
    }
    out.fit = fit_scaling(std::move(lx), std::move(ly));
    return out;
}

}  // namespace bifbm
