#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bifbm/params.hpp"

namespace bifbm {

/// Diagonal jitter levels tried in order when a Cholesky factorization fails.
inline constexpr std::array<double, 4> kJitterLadder{0.0, 1e-14, 1e-12, 1e-10};

/// Symmetric Gram matrix together with its (jittered) lower Cholesky factor.
///
/// Rows whose entries are identically zero (points with zero variance, e.g. t = 0)
/// are kept out of the factorization and get zero rows in the factor, so
/// L * L^T reproduces the entries exactly there.
class CovarianceMatrix {
public:
    /// Factorizes `entries`; throws NotPositiveDefiniteError past the last jitter level.
    explicit CovarianceMatrix(Eigen::MatrixXd entries);

    const Eigen::MatrixXd& entries() const noexcept { return entries_; }
    const Eigen::MatrixXd& factor() const noexcept { return factor_; }
    double jitter_applied() const noexcept { return jitter_; }
    Eigen::Index size() const noexcept { return entries_.rows(); }

private:
    Eigen::MatrixXd entries_;
    Eigen::MatrixXd factor_;
    double jitter_ = 0.0;
};

/// Lower Cholesky factor of `a` with the jitter ladder. Returns the jitter used.
/// Throws NotPositiveDefiniteError when every level fails.
double jittered_cholesky(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower);

/// Gram matrix of the bi-fBm covariance on a grid.
CovarianceMatrix cov_matrix(const TimeGrid& grid, const BifBmParams& p);

/// Var(B(target) | B(c), c in conditioners) by Schur complement.
///
/// Throws SingularConditionerError when the conditioning block cannot be factorized
/// within the jitter ladder, DomainError when target is among the conditioners.
double conditional_variance(std::size_t target, std::span<const std::size_t> conditioners,
                            const CovarianceMatrix& cov);

/// Conditional variance of B(target) given B on every point of [a, b] that lies at
/// distance >= r from target, with conditioners spaced r / per_radius apart
/// (outward from target +- r). One value per radius.
std::vector<double> conditional_variance_profile(double target, std::span<const double> radii, double a, double b,
                                                 const BifBmParams& p, int per_radius = 2);

}  // namespace bifbm
