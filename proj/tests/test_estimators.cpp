#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "bifbm/error.hpp"
#include "bifbm/estimators.hpp"
#include "bifbm/local_time.hpp"
#include "bifbm/params.hpp"
#include "bifbm/sampler.hpp"

using namespace bifbm;

namespace {

// Deterministic path B(t) = f(t) on the given grid.
SamplePath make_path(const TimeGrid& grid, const std::function<double(double)>& f, const BifBmParams& p) {
    SamplePath path;
    path.grid = std::make_shared<const TimeGrid>(grid);
    path.values.resize(static_cast<Eigen::Index>(grid.size()), 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        path.values(static_cast<Eigen::Index>(i), 0) = f(grid[i]);
    }
    path.params = p;
    return path;
}

const BifBmParams kBm(0.5, 1.0);

}  // namespace

TEST(LogGrid, StartsAtZeroAndIsLogUniform) {
    const TimeGrid g = log_grid(100, 2.0, 1e-3);
    ASSERT_EQ(g.size(), 101u);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_NEAR(g[1], 2e-3, 1e-15);
    EXPECT_NEAR(g.back(), 2.0, 1e-14);
    EXPECT_TRUE(g.is_log_uniform());
    EXPECT_THROW(log_grid(1), DomainError);
    EXPECT_THROW(log_grid(10, 1.0, 1.5), DomainError);
}

TEST(QuadraticVariation, LinearPathGivesOneOverN) {
    const std::size_t n = 1000;
    const SamplePath path = make_path(TimeGrid::uniform(1.0, n + 1), [](double t) { return t; }, kBm);
    EXPECT_NEAR(quadratic_variation(path, Interval{0.0, 1.0}), 1.0 / n, 1e-15);
    // Half the interval holds half the cells.
    EXPECT_NEAR(quadratic_variation(path, Interval{0.0, 0.5}), 0.5 / n, 1e-15);
}

TEST(ChungStatistic, LinearPathClosedForm) {
    const BifBmParams p(0.5, 0.8);
    const SamplePath path = make_path(TimeGrid::uniform(1.0, 4097), [](double t) { return t; }, p);
    const std::vector<double> radii{0.25, 0.125, 0.0625};
    const std::vector<double> c = chung_statistic(path, radii);
    for (std::size_t i = 0; i < radii.size(); ++i) {
        const double r = radii[i];
        EXPECT_NEAR(c[i], r * std::pow(std::log(std::log(1.0 / r)), p.hk()) / std::pow(r, p.hk()), 1e-12);
    }
    const std::vector<double> bad{0.5};
    EXPECT_THROW(chung_statistic(path, bad), DomainError);
}

TEST(SmallBall, ProbabilitiesDecreaseAndEdgeCasesThrow) {
    const BifBmParams p(0.5, 0.8);
    const std::vector<double> xs{1.5, 1.0, 0.7};
    const SmallBallResult r = small_ball_mc(p, xs, 2000, 256, 5);
    ASSERT_EQ(r.probabilities.size(), 3u);
    EXPECT_GT(r.probabilities[0], r.probabilities[1]);
    EXPECT_GT(r.probabilities[1], r.probabilities[2]);
    EXPECT_GT(r.fit.slope, 0.0);
    const std::vector<double> tiny{1e-6, 1e-7};
    EXPECT_THROW(small_ball_mc(p, tiny, 200, 64, 5), EmptySetError);
    const std::vector<double> huge{1e6, 1e5};
    EXPECT_THROW(small_ball_mc(p, huge, 200, 64, 5), DomainError);
    const std::vector<double> increasing{0.5, 1.0};
    EXPECT_THROW(small_ball_mc(p, increasing, 200, 64, 5), DomainError);
}

TEST(HolderNorm, LinearPathAndExponentRange) {
    const SamplePath path = make_path(TimeGrid::uniform(1.0, 65), [](double t) { return t; }, kBm);
    // sup |t - s|^{1 - alpha} over [0, 1] is attained at the full interval.
    EXPECT_NEAR(holder_norm(path, 0.25), 1.0, 1e-15);
    EXPECT_THROW(holder_norm(path, 0.5), DomainError);
    EXPECT_THROW(holder_norm(path, 0.0), DomainError);
}

TEST(BoxCounting, ExactPowerLawAndValidation) {
    std::vector<double> scales;
    std::vector<double> counts;
    for (int j = 1; j <= 10; ++j) {
        scales.push_back(std::ldexp(1.0, -j));
        counts.push_back(std::pow(scales.back(), -1.5));
    }
    EXPECT_NEAR(box_count_fit(scales, counts).slope, 1.5, 1e-12);
    std::vector<double> short_counts(counts.begin(), counts.begin() + 3);
    EXPECT_THROW(box_count_fit(scales, short_counts), DomainError);
    counts[4] = 0.0;
    EXPECT_THROW(box_count_fit(scales, counts), EmptySetError);
}

TEST(DyadicScales, StopAtRatioTimesSpacing) {
    const TimeGrid g = TimeGrid::uniform(1.0, 1025);
    const std::vector<double> s = dyadic_scales(g, 4.0);
    ASSERT_FALSE(s.empty());
    EXPECT_EQ(s.front(), 1.0);
    EXPECT_EQ(s.back(), std::ldexp(1.0, -8));
}

TEST(LevelSet, SingleCrossingGivesOneBoxPerScale) {
    const TimeGrid g = TimeGrid::uniform(1.0, 1001);
    const SamplePath path = make_path(g, [](double t) { return t - 0.3004; }, kBm);
    const std::vector<double> scales{0.5, 0.25, 0.125, 0.0625};
    for (const double c : level_set_box_counts(path, 0.0, 0.0, scales)) {
        EXPECT_EQ(c, 1.0);
    }
    // A wide epsilon band marks every point within it.
    const std::vector<double> counts = level_set_box_counts(path, 0.0, 0.2, scales);
    EXPECT_GT(counts.back(), 1.0);
    const std::vector<double> away = level_set_box_counts(path, 5.0, 0.0, scales);
    EXPECT_EQ(away.front(), 0.0);
}

TEST(LevelSet, ZeroPathHitsEveryBox) {
    // Half-open grid i / 4096, i < 4096, so no point sits on the right edge of [0, 1).
    const TimeGrid g = TimeGrid::uniform(1.0 - 1.0 / 4096.0, 4096);
    const SamplePath path = make_path(g, [](double) { return 0.0; }, kBm);
    std::vector<double> scales;
    for (int j = 0; j <= 9; ++j) {
        scales.push_back(std::ldexp(1.0, -j));
    }
    const std::vector<double> counts = level_set_box_counts(path, 0.0, 1e-12, scales);
    for (std::size_t j = 0; j < scales.size(); ++j) {
        EXPECT_EQ(counts[j], 1.0 / scales[j]);
    }
    EXPECT_NEAR(level_set_dimension(path, 0.0, 1e-12, scales).slope, 1.0, 1e-12);
}

TEST(LevelSet, SheetDiagonalIsDimensionOne) {
    const TimeGrid axis = TimeGrid::uniform_open(1.0, 256);
    SampleField field;
    field.grids = {axis, axis};
    field.values.resize(256 * 256, 1);
    for (std::size_t j = 0; j < 256; ++j) {
        for (std::size_t i = 0; i < 256; ++i) {
            field.values(static_cast<Eigen::Index>(i + 256 * j), 0) = axis[i] - axis[j] + 1e-9;
        }
    }
    const std::vector<double> scales{0.25, 0.125, 0.0625, 0.03125, 0.015625};
    const std::vector<double> counts = level_set_box_counts(field, 0.0, scales);
    EXPECT_NEAR(box_count_fit(scales, counts, 1).slope, 1.0, 0.1);
    field.grids.pop_back();
    EXPECT_THROW(level_set_box_counts(field, 0.0, scales), DomainError);
}

TEST(GraphDimension, StraightLineIsOneDimensional) {
    const TimeGrid g = TimeGrid::uniform(1.0 - 1.0 / 4096.0, 4096);
    const SamplePath path = make_path(g, [](double t) { return 0.5 * t; }, kBm);
    std::vector<double> scales;
    for (int j = 0; j <= 9; ++j) {
        scales.push_back(std::ldexp(1.0, -j));
    }
    // The image [0, 1/2) meets exactly 2^(j-1) boxes of side 2^-j.
    const std::vector<SamplePath> paths{path};
    const std::vector<double> image = graph_image_box_counts(path, DimensionTarget::image, scales);
    for (std::size_t j = 1; j < scales.size(); ++j) {
        EXPECT_EQ(image[j], 0.5 / scales[j]);
    }
    EXPECT_NEAR(graph_image_dimension(paths, DimensionTarget::image, scales).slope, 1.0, 1e-12);
    // Each column [k d, (k + 1) d) of the graph, with the segment leaving it, spans the
    // value range [k d / 2, (k + 1) d / 2]: two boxes for odd k except the last column.
    const std::vector<double> graph = graph_image_box_counts(path, DimensionTarget::graph, scales);
    for (std::size_t j = 1; j < scales.size(); ++j) {
        EXPECT_EQ(graph[j], 1.5 / scales[j] - 1.0) << "j=" << j;
    }
}

TEST(GraphDimension, BrownianGraphNearOneAndAHalf) {
    const auto paths = sample_cholesky(TimeGrid::uniform(1.0, 1025), kBm, 1, 3);
    // Coarse grid and a single path: only the broad range is checked.
    const std::vector<double> scales = dyadic_scales(*paths.front().grid, 4.0);
    const double slope = graph_image_dimension(paths, DimensionTarget::graph, scales).slope;
    EXPECT_GT(slope, 1.2);
    EXPECT_LT(slope, 1.6);
}

TEST(Renormalization, ConstantPathClosedForm) {
    const BifBmParams p(0.625, 0.8);
    const double horizon = 100.0;
    const SamplePath path = make_path(TimeGrid::uniform(horizon, 1001), [](double) { return 0.0; }, p);
    const auto indicator = [](double v) { return std::abs(v) <= 1.0 ? 1.0 : 0.0; };
    EXPECT_NEAR(renormalization_functional(path, indicator, horizon), std::pow(horizon, p.hk()), 1e-9);
}

TEST(Oscillation, LinearPathMomentsAndResolution) {
    const BifBmParams p(0.625, 0.8);
    const double eps = 1.0 / 64.0;
    const SamplePath path = make_path(TimeGrid::uniform(1.0 + eps, 4097), [](double t) { return t; }, p);
    const std::vector<double> m = oscillation_moments(path, eps, 3);
    for (int k = 1; k <= 3; ++k) {
        EXPECT_NEAR(m[static_cast<std::size_t>(k - 1)], std::pow(eps, k * (1.0 - p.hk())), 1e-12) << "k=" << k;
    }
    const SamplePath coarse = make_path(TimeGrid::uniform(1.0 + eps, 65), [](double t) { return t; }, p);
    EXPECT_THROW(oscillation_moments(coarse, eps, 2), ResolutionError);
    const SamplePath short_path = make_path(TimeGrid::uniform(1.0, 4097), [](double t) { return t; }, p);
    EXPECT_THROW(oscillation_moments(short_path, eps, 2), DomainError);
}

TEST(Crossings, CountAndTieRule) {
    const std::vector<double> zigzag{0.0, 1.0, 0.0, 1.0};
    EXPECT_EQ(count_crossings(zigzag, 0.5), 3u);
    const std::vector<double> touch{0.0, 0.5, 1.0};
    EXPECT_EQ(count_crossings(touch, 0.5), 1u);
    EXPECT_EQ(count_crossings(touch, 2.0), 0u);
}

TEST(Crossings, LinearPathRatioMatchesScaling) {
    // For B(t) = t every level in the range is crossed once and has local time 1,
    // so the ratio reduces to (pi/2)^(1/2) eps^(1-HK) up to edge effects.
    const BifBmParams p(0.5, 1.0);
    const SamplePath path = make_path(TimeGrid::uniform(2.0, 1 << 14), [](double t) { return t; }, p);
    const std::vector<double> eps{0.25, 0.125};
    std::vector<double> levels;
    for (int j = 0; j <= 100; ++j) {
        levels.push_back(0.4 + 0.01 * j);
    }
    const CrossingResult r = crossing_count_localtime(path, [](double) { return 1.0; }, eps, levels);
    for (std::size_t e = 0; e < eps.size(); ++e) {
        EXPECT_NEAR(r.ratios[e] / (std::sqrt(std::numbers::pi / 2.0) * std::pow(eps[e], 1.0 - p.hk())), 1.0, 0.03);
    }
}

TEST(LocalTime, LinearPathHasUnitDensityAndExactMass) {
    const SamplePath path = make_path(TimeGrid::uniform(1.0, 10001), [](double t) { return t; }, kBm);
    const LocalTimeEstimate est = occupation_local_time(path, Interval{0.0, 1.0}, 0.01);
    EXPECT_NEAR(est.total_mass(), 1.0, 1e-12);
    EXPECT_NEAR(est.value_at(0.5), 1.0, 1e-9);
    EXPECT_NEAR(est.value_at(0.25), 1.0, 1e-9);
    EXPECT_EQ(est.value_at(3.0), 0.0);
    // Bin centres sit at integer multiples of the bandwidth.
    const double c = est.center(0, 0);
    EXPECT_NEAR(c / 0.01, std::round(c / 0.01), 1e-9);
}

TEST(LocalTime, DefaultBandwidth) {
    EXPECT_DOUBLE_EQ(default_bandwidth(1024, 0.5), 1.0 / 32.0);
}

TEST(LocalTime, MaxOverBallsScalesAsPhiOne) {
    const BifBmParams p(0.5, 0.8);
    const auto paths = sample_lamperti(log_grid(1 << 14), p, 10, 21, LampertiMode::circulant);
    const std::vector<double> radii{0.25, 0.125, 0.0625, 0.03125};
    const LocalTimeHolderResult r = local_time_holder(paths, 0.5, radii);
    ASSERT_EQ(r.ratios.size(), radii.size());
    for (const double v : r.ratios) {
        EXPECT_GT(v, 0.0);
        EXPECT_TRUE(std::isfinite(v));
    }
    // L* grows like r^{1-HK} up to logarithms.
    EXPECT_NEAR(r.fit.slope, 1.0 - p.hk(), 0.25);
}

TEST(LocalTimeTail, ThrowsWithoutExceedances) {
    const BifBmParams p(0.5, 0.8);
    const std::vector<double> xs{1e3, 2e3};
    EXPECT_THROW(local_time_tail(p, xs, 50, 1, 256), EmptySetError);
}
