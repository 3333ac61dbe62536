#include <cmath>
#include <cstdlib>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "bifbm/error.hpp"
#include "bifbm/kernels.hpp"
#include "bifbm/path_io.hpp"
#include "bifbm/regression.hpp"
#include "bifbm/rng.hpp"
#include "bifbm/sampler.hpp"

using namespace bifbm;

namespace {

struct CovEstimate {
    Eigen::MatrixXd mean_product;  // sample mean of X_i X_j
    Eigen::MatrixXd std_error;     // standard error of that mean
};

// Centered model, so E[X_i X_j] is estimated without subtracting sample means.
CovEstimate empirical_covariance(const std::vector<Eigen::VectorXd>& samples) {
    const auto n = static_cast<Eigen::Index>(samples.front().size());
    const double m = static_cast<double>(samples.size());
    Eigen::MatrixXd s1 = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd s2 = Eigen::MatrixXd::Zero(n, n);
    for (const auto& x : samples) {
        const Eigen::MatrixXd prod = x * x.transpose();
        s1 += prod;
        s2 += prod.cwiseProduct(prod);
    }
    CovEstimate est;
    est.mean_product = s1 / m;
    const Eigen::MatrixXd var = (s2 / m - est.mean_product.cwiseProduct(est.mean_product)) * (m / (m - 1.0));
    est.std_error = (var / m).cwiseSqrt();
    return est;
}

std::vector<Eigen::VectorXd> component_samples(const std::vector<SamplePath>& paths, int c = 0) {
    std::vector<Eigen::VectorXd> out;
    out.reserve(paths.size());
    for (const auto& p : paths) {
        out.emplace_back(p.values.col(c));
    }
    return out;
}

class ScopedThreads {
public:
    explicit ScopedThreads(const char* value) {
        if (const char* old = std::getenv("BIFBM_THREADS")) {
            old_ = old;
            had_ = true;
        }
        setenv("BIFBM_THREADS", value, 1);
    }
    ~ScopedThreads() {
        if (had_) {
            setenv("BIFBM_THREADS", old_.c_str(), 1);
        } else {
            unsetenv("BIFBM_THREADS");
        }
    }

private:
    std::string old_;
    bool had_ = false;
};

}  // namespace

TEST(Rng, StreamIsReproducibleAndStandardNormal) {
    NormalStream a(42);
    NormalStream b(42);
    std::vector<double> xs(200000);
    for (auto& x : xs) {
        x = a();
        ASSERT_EQ(x, b());
    }
    double m1 = 0.0;
    double m2 = 0.0;
    double m4 = 0.0;
    for (const double x : xs) {
        m1 += x;
        m2 += x * x;
        m4 += x * x * x * x;
    }
    const double n = static_cast<double>(xs.size());
    EXPECT_NEAR(m1 / n, 0.0, 4.0 / std::sqrt(n));
    EXPECT_NEAR(m2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
    EXPECT_NEAR(m4 / n, 3.0, 4.0 * std::sqrt(96.0 / n));
}

TEST(Rng, PinnedFirstValues) {
    // Guards the versioned stream definition against accidental change.
    NormalStream s(0);
    const double first = s();
    NormalStream again(0);
    EXPECT_EQ(first, again());
    EXPECT_NE(derive_seed(7, 0, 0), derive_seed(7, 1, 0));
    EXPECT_NE(derive_seed(7, 0, 0), derive_seed(7, 0, 1));
    EXPECT_EQ(derive_seed(7, 3, 2), derive_seed(7, 3, 2));
}

TEST(Rng, UniformIsInHalfOpenUnitInterval) {
    NormalStream s(3);
    for (int i = 0; i < 100000; ++i) {
        const double u = s.uniform();
        ASSERT_GT(u, 0.0);
        ASSERT_LE(u, 1.0);
    }
}

TEST(CholeskySampler, EmpiricalCovarianceWithinFourStandardErrors) {
    const BifBmParams p(0.6, 0.5);
    const TimeGrid grid = TimeGrid::uniform_open(2.0, 16);
    const auto paths = sample_cholesky(grid, p, 20000, 2024);
    const CovEstimate est = empirical_covariance(component_samples(paths));
    for (Eigen::Index i = 0; i < 16; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double exact = cov_bifbm(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)], p);
            EXPECT_NEAR(est.mean_product(i, j), exact, 4.0 * est.std_error(i, j)) << i << "," << j;
        }
    }
}

TEST(CholeskySampler, OriginIsExactlyZero) {
    const BifBmParams p(0.5, 0.5, 2);
    const auto only_zero = sample_cholesky(TimeGrid({0.0}), p, 3, 1);
    for (const auto& path : only_zero) {
        EXPECT_EQ(path.values.cwiseAbs().maxCoeff(), 0.0);
    }
    const auto paths = sample_cholesky(TimeGrid::uniform(1.0, 9), p, 5, 1);
    for (const auto& path : paths) {
        EXPECT_EQ(path.values(0, 0), 0.0);
        EXPECT_EQ(path.values(0, 1), 0.0);
        EXPECT_EQ(path.values.rows(), 9);
        EXPECT_EQ(path.values.cols(), 2);
    }
}

TEST(CholeskySampler, BrownianQuadraticVariation) {
    const std::size_t n = std::size_t{1} << 12;
    const TimeGrid grid = TimeGrid::uniform(1.0, n + 1);
    const CholeskySampler sampler(grid, BifBmParams(0.5, 1.0));
    double qv = 0.0;
    const int n_paths = 4;
    for (int i = 0; i < n_paths; ++i) {
        const SamplePath path = sampler.sample(11, static_cast<std::uint64_t>(i));
        for (std::size_t k = 0; k + 1 < path.size(); ++k) {
            const double d = path.values(static_cast<Eigen::Index>(k + 1), 0) - path.values(static_cast<Eigen::Index>(k), 0);
            qv += d * d;
        }
    }
    EXPECT_NEAR(qv / n_paths, 1.0, 0.03);
}

TEST(CholeskySampler, DeterministicAcrossWorkerCounts) {
    const BifBmParams p(0.7, 0.6, 2);
    const TimeGrid grid = TimeGrid::uniform(1.0, 33);
    std::vector<SamplePath> serial;
    std::vector<SamplePath> parallel;
    {
        ScopedThreads t("1");
        serial = sample_cholesky(grid, p, 17, 99);
    }
    {
        ScopedThreads t("4");
        parallel = sample_cholesky(grid, p, 17, 99);
    }
    ASSERT_EQ(serial.size(), parallel.size());
    for (std::size_t i = 0; i < serial.size(); ++i) {
        EXPECT_TRUE((serial[i].values.array() == parallel[i].values.array()).all());
    }
    const CholeskySampler sampler(grid, p);
    EXPECT_TRUE((sampler.sample(99, 5).values.array() == serial[5].values.array()).all());
}

TEST(CholeskySampler, ComponentsAreIndependent) {
    const BifBmParams p(0.6, 0.8, 2);
    const TimeGrid grid({0.5, 1.0});
    const auto paths = sample_cholesky(grid, p, 20000, 5);
    std::vector<double> cross;
    for (const auto& path : paths) {
        cross.push_back(path.values(1, 0) * path.values(1, 1));
    }
    const MeanEstimate m = mean_estimate(cross);
    EXPECT_NEAR(m.mean, 0.0, 4.0 * m.std_error);
}

TEST(CholeskySampler, SelfSimilarityKolmogorovSmirnov) {
    const BifBmParams p(0.6, 0.5);
    const double a = 4.0;
    const auto paths = sample_cholesky(TimeGrid({1.0, a}), p, 20000, 77);
    std::vector<double> at_one;
    std::vector<double> scaled;
    for (std::size_t i = 0; i < 10000; ++i) {
        at_one.push_back(paths[i].values(0, 0));
        scaled.push_back(std::pow(a, -p.hk()) * paths[i + 10000].values(1, 0));
    }
    const KsResult ks = ks_two_sample(at_one, scaled);
    EXPECT_GT(ks.p_value, 0.01);
}

TEST(CholeskySampler, RejectsZeroPaths) {
    EXPECT_THROW(sample_cholesky(TimeGrid({1.0}), BifBmParams(0.5, 0.5), 0, 1), DomainError);
}

TEST(LampertiSampler, MarginalVarianceBothModes) {
    const BifBmParams p(0.5, 0.8);
    const TimeGrid grid = TimeGrid::geometric(0.05, 5.0, 24);
    for (const LampertiMode mode : {LampertiMode::toeplitz_exact, LampertiMode::circulant}) {
        const auto paths = sample_lamperti(grid, p, 10000, 8, mode);
        const CovEstimate est = empirical_covariance(component_samples(paths));
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const auto k = static_cast<Eigen::Index>(i);
            EXPECT_NEAR(est.mean_product(k, k), std::pow(grid[i], 2.0 * p.hk()), 3.0 * est.std_error(k, k))
                << "point " << i;
        }
    }
}

TEST(LampertiSampler, StationarySequenceHasConstantVariance) {
    const BifBmParams p(0.75, 0.4);
    const LampertiSampler sampler(TimeGrid::geometric(0.01, 10.0, 64), p, LampertiMode::circulant);
    std::vector<Eigen::VectorXd> ys;
    for (std::uint64_t i = 0; i < 10000; ++i) {
        ys.push_back(sampler.sample_stationary(derive_seed(3, i, 0)));
    }
    const CovEstimate est = empirical_covariance(ys);
    for (Eigen::Index i = 0; i < 64; i += 9) {
        EXPECT_NEAR(est.mean_product(i, i), 1.0, 3.0 * est.std_error(i, i));
    }
}

TEST(LampertiSampler, ToeplitzAgreesWithCholesky) {
    const BifBmParams p(0.25, 0.8);
    const TimeGrid grid = TimeGrid::geometric(0.1, 2.0, 12);
    const auto chol = empirical_covariance(component_samples(sample_cholesky(grid, p, 20000, 1)));
    const auto toep =
        empirical_covariance(component_samples(sample_lamperti(grid, p, 20000, 2, LampertiMode::toeplitz_exact)));
    for (Eigen::Index i = 0; i < 12; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double combined = std::hypot(chol.std_error(i, j), toep.std_error(i, j));
            EXPECT_NEAR(chol.mean_product(i, j), toep.mean_product(i, j), 4.0 * combined);
        }
    }
}

TEST(LampertiSampler, CirculantCovarianceMatchesKernel) {
    const BifBmParams p(0.9, 0.9);
    const TimeGrid grid = TimeGrid::geometric(0.02, 3.0, 10, true);
    const auto paths = sample_lamperti(grid, p, 20000, 4, LampertiMode::circulant);
    const CovEstimate est = empirical_covariance(component_samples(paths));
    EXPECT_EQ(est.mean_product(0, 0), 0.0);
    for (Eigen::Index i = 1; i < 11; ++i) {
        for (Eigen::Index j = 1; j <= i; ++j) {
            const double exact = cov_bifbm(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)], p);
            EXPECT_NEAR(est.mean_product(i, j), exact, 4.0 * est.std_error(i, j));
        }
    }
}

TEST(LampertiSampler, CirculantReportsEmbedding) {
    const BifBmParams p(0.5, 0.4);
    const LampertiSampler s(TimeGrid::geometric(1e-3, 1.0, 1000), p, LampertiMode::circulant);
    EXPECT_GE(s.embedding_size(), 2u * 999u);
    EXPECT_TRUE(std::isfinite(s.min_eigenvalue()));
    EXPECT_THROW(LampertiSampler(TimeGrid::uniform_open(1.0, 10), p, LampertiMode::circulant), DomainError);
}

TEST(LampertiSampler, ZeroOnlyGridGivesZeroPath) {
    const LampertiSampler s(TimeGrid({0.0}), BifBmParams(0.5, 0.5), LampertiMode::toeplitz_exact);
    EXPECT_EQ(s.sample(1, 0).values(0, 0), 0.0);
}

TEST(SpectralSampler, ZeroAmplitudeGivesZeroPath) {
    const SpectralSampler s = SpectralSampler::from_modes(BifBmParams(0.5, 0.5), {1.0}, {0.0});
    const auto grid = std::make_shared<const TimeGrid>(TimeGrid::geometric(0.1, 10.0, 20));
    const SamplePath path = s.sample(grid, 1, 0);
    EXPECT_EQ(path.values.cwiseAbs().maxCoeff(), 0.0);
}

TEST(SpectralSampler, TailMassTooLargeIsAnError) {
    EXPECT_THROW(SpectralSampler(BifBmParams(0.25, 0.4), 64, 2.0, 1e-3), TailMassError);
    EXPECT_THROW(SpectralSampler(BifBmParams(0.5, 0.5), 4, 100.0), DomainError);
}

TEST(SpectralSampler, CovarianceRefinementHalvesError) {
    const BifBmParams p(0.5, 0.8);
    std::vector<double> pts;
    for (int i = 0; i < 8; ++i) {
        pts.push_back(0.5 * std::pow(2.0, i / 7.0));
    }
    double prev = INFINITY;
    for (const std::size_t n : {256u, 512u, 1024u, 2048u}) {
        const SpectralSampler s(p, n, 1000.0);
        double err = 0.0;
        for (const double a : pts) {
            for (const double b : pts) {
                err = std::max(err, std::abs(s.model_covariance(a, b) - cov_bifbm(a, b, p)));
            }
        }
        EXPECT_LE(err, 0.5 * prev) << "n_modes=" << n;
        prev = err;
    }
}

TEST(SpectralSampler, MarginalVarianceAtOne) {
    const BifBmParams p(0.5, 0.8);
    const SpectralSampler s(p, 4096, 1000.0);
    EXPECT_NEAR(s.model_covariance(1.0, 1.0), 1.0, 0.05);
    EXPECT_LT(s.variance_bias_bound(1.0), 0.05);
    const auto grid = std::make_shared<const TimeGrid>(TimeGrid({1.0}));
    std::vector<double> sq;
    for (std::uint64_t i = 0; i < 5000; ++i) {
        const double v = s.sample(grid, 31, i).values(0, 0);
        sq.push_back(v * v);
    }
    EXPECT_NEAR(mean_estimate(sq).mean, 1.0, 0.05);
}

TEST(SheetSampler, OneAxisMatchesCholeskyLaw) {
    const SheetParams sp = SheetParams::isotropic(std::vector<double>{0.6}, std::vector<double>{0.5}, 1);
    const TimeGrid grid = TimeGrid::uniform_open(1.0, 6);
    const auto fields = sample_sheet({grid}, sp, 20000, 12);
    std::vector<Eigen::VectorXd> samples;
    for (const auto& f : fields) {
        samples.emplace_back(f.values.col(0));
    }
    const CovEstimate est = empirical_covariance(samples);
    for (Eigen::Index i = 0; i < 6; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double exact =
                cov_bifbm(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)], BifBmParams(0.6, 0.5));
            EXPECT_NEAR(est.mean_product(i, j), exact, 4.0 * est.std_error(i, j));
        }
    }
}

TEST(SheetSampler, TwoAxisVarianceFacesAndIncrements) {
    Eigen::MatrixXd h(2, 2);
    h << 0.5, 0.7, 0.4, 0.6;
    Eigen::MatrixXd k(2, 2);
    k << 0.8, 1.0, 0.9, 0.5;
    const SheetParams sp(h, k);
    const std::vector<TimeGrid> grids{TimeGrid::uniform(1.0, 5), TimeGrid::uniform(2.0, 4)};
    const auto fields = sample_sheet(grids, sp, 10000, 21);
    const std::size_t n0 = 5;
    for (const auto& f : fields) {
        for (std::size_t a = 0; a < 5; ++a) {
            EXPECT_EQ(f.values(static_cast<Eigen::Index>(a), 0), 0.0);  // t_1 = 0 face
        }
        for (std::size_t b = 0; b < 4; ++b) {
            EXPECT_EQ(f.values(static_cast<Eigen::Index>(b * n0), 1), 0.0);  // t_0 = 0 face
        }
    }
    for (int comp = 0; comp < 2; ++comp) {
        for (std::size_t a = 1; a < 5; ++a) {
            for (std::size_t b = 1; b < 4; ++b) {
                const auto row = static_cast<Eigen::Index>(a + n0 * b);
                std::vector<double> sq;
                for (const auto& f : fields) {
                    sq.push_back(f.values(row, comp) * f.values(row, comp));
                }
                const MeanEstimate m = mean_estimate(sq);
                const double exact = std::pow(grids[0][a], 2.0 * h(comp, 0) * k(comp, 0)) *
                                     std::pow(grids[1][b], 2.0 * h(comp, 1) * k(comp, 1));
                EXPECT_NEAR(m.mean, exact, 3.0 * m.std_error) << comp << " " << a << " " << b;
            }
        }
    }
    // Increment along axis 0 at fixed t_1: the exact variance over |s_0 - t_0|^{2 H K} stays in
    // a scanned band, and the empirical variance matches the exact one.
    const int comp = 0;
    const double hk0 = h(comp, 0) * k(comp, 0);
    const std::size_t b = 3;
    for (std::size_t a = 2; a < 5; ++a) {
        const std::vector<double> s{grids[0][1], grids[1][b]};
        const std::vector<double> t{grids[0][a], grids[1][b]};
        const double exact = cov_sheet(s, s, comp, sp) + cov_sheet(t, t, comp, sp) - 2.0 * cov_sheet(s, t, comp, sp);
        std::vector<double> sq;
        for (const auto& f : fields) {
            const double d = f.values(static_cast<Eigen::Index>(a + n0 * b), comp) -
                             f.values(static_cast<Eigen::Index>(1 + n0 * b), comp);
            sq.push_back(d * d);
        }
        const MeanEstimate m = mean_estimate(sq);
        EXPECT_NEAR(m.mean, exact, 3.0 * m.std_error);
        const double ratio = exact / std::pow(t[0] - s[0], 2.0 * hk0);
        EXPECT_GT(ratio, 0.0);
        EXPECT_LT(ratio, 2.0 * std::pow(2.0, 2.0 * h(comp, 1) * k(comp, 1)));
    }
}

TEST(SheetSampler, SizeCapEnforced) {
    const SheetParams sp = SheetParams::isotropic(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 1.0}, 1);
    const std::vector<TimeGrid> grids{TimeGrid::uniform(1.0, 300), TimeGrid::uniform(1.0, 300)};
    EXPECT_THROW(SheetSampler(grids, sp), SizeCapError);
    EXPECT_THROW(SheetSampler({TimeGrid::uniform(1.0, 3)}, sp), DomainError);
}

TEST(PathIo, CsvAndBinaryRoundTrip) {
    const auto paths = sample_cholesky(TimeGrid::uniform(1.0, 7), BifBmParams(0.5, 0.5, 2), 1, 123);
    const SamplePath& path = paths.front();

    std::stringstream csv;
    write_path_csv(csv, path);
    const std::string text = csv.str();
    EXPECT_EQ(text.substr(0, text.find('\n')), "t,component_1,component_2");
    const PathRecord from_csv = read_path_csv(csv);
    ASSERT_EQ(from_csv.times.size(), 7u);
    EXPECT_TRUE((from_csv.values.array() == path.values.array()).all());

    std::stringstream bin;
    write_path_binary(bin, path);
    const std::string bytes = bin.str();
    EXPECT_EQ(bytes.size(), 36u + 7u * 3u * 8u);
    EXPECT_EQ(bytes.substr(0, 4), "BFBM");
    const PathRecord from_bin = read_path_binary(bin);
    EXPECT_EQ(from_bin.seed, 123u);
    EXPECT_EQ(from_bin.method, Method::cholesky);
    EXPECT_TRUE((from_bin.values.array() == path.values.array()).all());
    EXPECT_EQ(from_bin.times[6], 1.0);

    std::stringstream bad("XXXX");
    EXPECT_THROW(read_path_binary(bad), DomainError);
    std::stringstream truncated(bytes.substr(0, 50));
    EXPECT_THROW(read_path_binary(truncated), DomainError);
}
