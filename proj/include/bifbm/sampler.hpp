#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/gram.hpp"
#include "bifbm/params.hpp"
#include "bifbm/spectral.hpp"

namespace bifbm {

enum class Method : std::uint32_t { cholesky = 0, lamperti = 1, spectral = 2 };

std::string to_string(Method m);
Method method_from_string(const std::string& name);

/// One realization of a d-dimensional bi-fBm on a grid.
///
/// values is n x d; row i holds B(grid[i]). Rows at t = 0 are exactly zero.
struct SamplePath {
    std::shared_ptr<const TimeGrid> grid;
    Eigen::MatrixXd values;
    Method method = Method::cholesky;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    BifBmParams params{0.5, 1.0, 1};

    std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
    int d() const noexcept { return static_cast<int>(values.cols()); }
    double t(std::size_t i) const { return (*grid)[i]; }
    /// Component c as a contiguous column.
    std::span<const double> component(int c = 0) const {
        return {values.col(c).data(), static_cast<std::size_t>(values.rows())};
    }
};

/// One realization of a bifractional Brownian sheet on a product grid.
///
/// values has prod(n_j) rows and d columns. The row of the point with per-axis
/// indices (k_0, ..., k_{N-1}) is k_0 + n_0 * (k_1 + n_1 * (k_2 + ...)): axis 0 varies fastest.
struct SampleField {
    std::vector<TimeGrid> grids;
    Eigen::MatrixXd values;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

/// Exact sampler: B = L xi per component, with L the Cholesky factor of the Gram matrix.
class CholeskySampler {
public:
    CholeskySampler(TimeGrid grid, const BifBmParams& p);

    SamplePath sample(std::uint64_t seed, std::uint64_t index) const;
    const CovarianceMatrix& covariance() const noexcept { return cov_; }

private:
    std::shared_ptr<const TimeGrid> grid_;
    BifBmParams params_;
    CovarianceMatrix cov_;
};

enum class LampertiMode { toeplitz_exact, circulant };

/// Sampler through the stationary process Y(tau) = e^{-HK tau} B(e^tau).
///
/// Y is sampled at tau_i = log t_i and mapped back with B(t) = t^HK Y(log t).
/// A leading t = 0 point is allowed and gets the value 0.
///
/// toeplitz_exact factorizes the Gram matrix of r(tau_i - tau_j) on any positive grid.
/// circulant requires log-uniform positive points; it embeds the Toeplitz sequence in a
/// circulant of size m >= 2(M-1) (a power of two) and doubles m up to max_doublings times
/// while the embedding has a negative eigenvalue. Eigenvalues down to
/// -kEmbeddingRoundoff * (largest eigenvalue) are treated as zero; anything more negative
/// raises EmbeddingError carrying the minimum eigenvalue.
class LampertiSampler {
public:
    static constexpr double kEmbeddingRoundoff = 1e-13;

    LampertiSampler(TimeGrid grid, const BifBmParams& p, LampertiMode mode, int max_doublings = 2);
    ~LampertiSampler();
    LampertiSampler(const LampertiSampler&) = delete;
    LampertiSampler& operator=(const LampertiSampler&) = delete;

    SamplePath sample(std::uint64_t seed, std::uint64_t index) const;

    /// Sample of the stationary sequence Y on the positive points (one component).
    Eigen::VectorXd sample_stationary(std::uint64_t stream_seed) const;

    LampertiMode mode() const noexcept { return mode_; }
    /// Smallest eigenvalue of the accepted circulant embedding (NaN in toeplitz mode).
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }
    /// Circulant size actually used (0 in toeplitz mode).
    std::size_t embedding_size() const noexcept { return m_; }
    const TimeGrid& grid() const noexcept { return *grid_; }

private:
    struct FftPlan;

    std::shared_ptr<const TimeGrid> grid_;
    BifBmParams params_;
    LampertiMode mode_;
    std::size_t offset_ = 0;  // index of the first positive point
    std::size_t n_pos_ = 0;
    Eigen::MatrixXd toeplitz_factor_;
    std::vector<double> sqrt_eigen_;  // sqrt(lambda_j / m), j = 0..m/2
    std::size_t m_ = 0;
    double min_eigenvalue_;
    std::unique_ptr<FftPlan> plan_;
};

/// Approximate sampler from a finite spectral sum:
///   B(t) = t^HK sum_j a_j (xi_j cos(lambda_j log t) + eta_j sin(lambda_j log t)),
/// with lambda_j = (j + 1/2) dlambda, dlambda = lambda_max / n_modes and
/// a_j^2 = 2 f(lambda_j) dlambda (the factor 2 folds in the mirror frequency -lambda_j).
class SpectralSampler {
public:
    /// Throws TailMassError when the spectral mass beyond lambda_max exceeds tail_tol.
    SpectralSampler(const BifBmParams& p, std::size_t n_modes, double lambda_max, double tail_tol = 0.05);

    /// Sampler from explicit frequencies and amplitudes.
    static SpectralSampler from_modes(const BifBmParams& p, std::vector<double> lambdas,
                                      std::vector<double> amplitudes);

    SamplePath sample(const std::shared_ptr<const TimeGrid>& grid, std::uint64_t seed, std::uint64_t index) const;

    /// Covariance of the approximate law: (st)^HK sum_j a_j^2 cos(lambda_j (log s - log t)).
    double model_covariance(double s, double t) const;

    /// Spectral mass beyond lambda_max, i.e. the variance deficit of Y from truncation.
    double tail_mass() const noexcept { return tail_mass_; }
    /// Reported bias bound on the variance at t: t^{2HK} (tail mass + |1 - tail mass - sum a_j^2|).
    double variance_bias_bound(double t) const;
    std::size_t n_modes() const noexcept { return lambdas_.size(); }
    std::span<const double> amplitudes() const noexcept { return amplitudes_; }

private:
    SpectralSampler(const BifBmParams& p, std::vector<double> lambdas, std::vector<double> amplitudes,
                    double tail_mass);

    BifBmParams params_;
    std::vector<double> lambdas_;
    std::vector<double> amplitudes_;
    double tail_mass_ = 0.0;
};

/// Default cap on the number of points of a product grid.
inline constexpr std::size_t kSheetSizeCap = std::size_t{1} << 16;

/// Exact sheet sampler: per component, the Cholesky factor of the product-grid Gram
/// matrix is the Kronecker product of per-axis factors, applied one axis at a time.
class SheetSampler {
public:
    SheetSampler(std::vector<TimeGrid> grids, const SheetParams& p, std::size_t size_cap = kSheetSizeCap);

    SampleField sample(std::uint64_t seed, std::uint64_t index) const;
    std::size_t total_points() const noexcept { return total_; }

private:
    std::vector<TimeGrid> grids_;
    SheetParams params_;
    std::size_t total_ = 1;
    // factors_[i][j]: lower factor for component i along axis j
    std::vector<std::vector<Eigen::MatrixXd>> factors_;
};

std::vector<SamplePath> sample_cholesky(const TimeGrid& grid, const BifBmParams& p, std::size_t n_paths,
                                        std::uint64_t seed);
std::vector<SamplePath> sample_lamperti(const TimeGrid& grid, const BifBmParams& p, std::size_t n_paths,
                                        std::uint64_t seed, LampertiMode mode);
std::vector<SamplePath> sample_spectral(const TimeGrid& grid, const BifBmParams& p, std::size_t n_modes,
                                        double lambda_max, std::size_t n_paths, std::uint64_t seed,
                                        double tail_tol = 0.05);
std::vector<SampleField> sample_sheet(const std::vector<TimeGrid>& grids, const SheetParams& p, std::size_t n_fields,
                                      std::uint64_t seed, std::size_t size_cap = kSheetSizeCap);

}  // namespace bifbm
