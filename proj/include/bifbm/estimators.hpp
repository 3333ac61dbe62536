#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "bifbm/local_time.hpp"
#include "bifbm/params.hpp"
#include "bifbm/regression.hpp"
#include "bifbm/sampler.hpp"

namespace bifbm {

/// Log-uniform grid on [t_max * min_ratio, t_max] plus the origin.
///
/// Monte Carlo estimators on long grids use it with the circulant Lamperti
/// sampler, which costs O(n log n) per path.
TimeGrid log_grid(std::size_t n_points, double t_max = 1.0, double min_ratio = 1e-6);

/// Sum of squared increments between consecutive grid points inside the interval.
double quadratic_variation(const SamplePath& path, Interval interval);

/// max_{t in [0, r]} |B(t)| (log log 1/r)^HK / r^HK for each radius, first component.
std::vector<double> chung_statistic(const SamplePath& path, std::span<const double> radii);

struct SmallBallResult {
    ScalingFit fit;                  ///< log(-log P) against log(1/x)
    std::vector<double> x_values;
    std::vector<double> probabilities;
    std::vector<std::size_t> counts;
    std::size_t n_paths = 0;
};

/// Monte Carlo estimate of P{max_[0,1] |B| <= x} for decreasing x; d must be 1.
/// Paths come from the circulant Lamperti sampler on log_grid(n_grid, 1, min_ratio).
SmallBallResult small_ball_mc(const BifBmParams& p, std::span<const double> x_values, std::size_t n_paths,
                              std::size_t n_grid, std::uint64_t seed, double min_ratio = 1e-6);

/// Discrete sup over grid pairs of |B(s) - B(t)| / |s - t|^alpha on [0, 1]; requires alpha < HK.
double holder_norm(const SamplePath& path, double alpha);

/// Monte Carlo small-ball fit for the alpha-Hoelder norm: log(-log P{||B||_alpha <= eps}) against log(1/eps).
SmallBallResult holder_small_ball_mc(const BifBmParams& p, double alpha, std::span<const double> eps_values,
                                     std::size_t n_paths, std::size_t n_grid, std::uint64_t seed);

/// Box-counting fit. Scales must be strictly decreasing box sides; the `trim`
/// coarsest and `trim` finest scales are excluded from the regression.
ScalingFit box_count_fit(std::span<const double> scales, std::span<const double> counts, std::size_t trim = 2);

/// Dyadic box sides 2^-j, j >= j_min, that are at least max_spacing_ratio times the largest grid spacing.
std::vector<double> dyadic_scales(const TimeGrid& grid, double max_spacing_ratio = 4.0, int j_min = 0);

/// Number of boxes of each scale on the time axis that meet {t : B(t) = x}.
///
/// A grid cell marks a hit when B - x changes sign strictly across it, or when
/// |B(t_i) - x| < epsilon at a grid point; hits are located at the cell's left end.
std::vector<double> level_set_box_counts(const SamplePath& path, double x, double epsilon,
                                         std::span<const double> scales);

/// Box-counting dimension of the level set, counts averaged over the given paths.
ScalingFit level_set_dimension(std::span<const SamplePath> paths, double x, double epsilon,
                               std::span<const double> scales, std::size_t trim = 2);
ScalingFit level_set_dimension(const SamplePath& path, double x, double epsilon, std::span<const double> scales,
                               std::size_t trim = 2);

/// Level-set box counts of a two-parameter, one-component sheet.
///
/// A grid cell meets the level set when its four corner values do not all lie
/// strictly on one side of x; the hit is located at the cell's lower corner and
/// binned into squares of side delta.
std::vector<double> level_set_box_counts(const SampleField& field, double x, std::span<const double> scales);

enum class DimensionTarget { image, graph };

/// Box counts of the image {B(t)} or the graph {(t, B(t))}.
///
/// For d = 1 graphs each time column of width delta contributes the number of
/// value boxes spanned by the path's range in that column. Otherwise the
/// sampled points are binned directly.
std::vector<double> graph_image_box_counts(const SamplePath& path, DimensionTarget target,
                                           std::span<const double> scales);
std::vector<double> graph_image_box_counts(const SampleField& field, DimensionTarget target,
                                           std::span<const double> scales);

ScalingFit graph_image_dimension(std::span<const SamplePath> paths, DimensionTarget target,
                                 std::span<const double> scales, std::size_t trim = 2);
ScalingFit graph_image_dimension(const SampleField& field, DimensionTarget target, std::span<const double> scales,
                                 std::size_t trim = 2);

/// T^(HK - 1) * int_0^T F(B(u)) du by the trapezoidal rule on the grid points in [0, T].
double renormalization_functional(const SamplePath& path, const std::function<double(double)>& f, double t_end);

/// Trapezoidal int_0^1 Z(t)^k dt for k = 1..k_max, Z(t) = (B(t + eps) - B(t)) / eps^HK.
///
/// Z is evaluated at the grid points in [0, 1] and at t = 1; B(t + eps) is
/// linearly interpolated. The grid must start at 0, reach 1 + eps, and have
/// spacing at most eps / 8 everywhere on [0, 1 + eps].
std::vector<double> oscillation_moments(const SamplePath& path, double epsilon, int k_max);

struct CrossingResult {
    std::vector<double> epsilons;
    std::vector<double> crossing_integrals;  ///< (pi/2)^(1/2) eps^(1-HK) sum_u f(u) N_u du
    double local_time_integral = 0.0;        ///< sum_u f(u) L(u, I) du
    std::vector<double> ratios;
    Interval interval;
};

/// Counts of level crossings by the smoothed path B_eps(t) = (1/eps) int_t^{t+eps} B.
///
/// A level u in u_grid is crossed in cell i when it lies strictly between
/// the two smoothed values; a value exactly equal to u at an interior grid
/// point counts once. u_grid must be uniformly spaced; its spacing is the
/// local-time bandwidth. The interval is [front, back - max eps].
CrossingResult crossing_count_localtime(const SamplePath& path, const std::function<double(double)>& f,
                                        std::span<const double> epsilons, std::span<const double> u_grid);

/// Number of crossings of level u by the values (same tie rule as above).
std::size_t count_crossings(std::span<const double> values, double u);

struct TailResult {
    ScalingFit fit;  ///< log(-log P{L(0,1) > x}) against log x
    std::vector<double> x_values;
    std::vector<double> neg_log_probabilities;
    std::size_t n_paths = 0;
};

/// Monte Carlo tail of L(0, [0, 1]); points with zero exceedances are omitted.
TailResult local_time_tail(const BifBmParams& p, std::span<const double> x_values, std::size_t n_paths,
                           std::uint64_t seed, std::size_t n_grid = 1 << 14);

}  // namespace bifbm
