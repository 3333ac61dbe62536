#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace bifbm {

/// Exponents of a bifractional Brownian motion in R^d.
///
/// Covariance of each component is
///   R(s,t) = 2^-K [ (t^2H + s^2H)^K - |t-s|^(2HK) ].
/// K = 1 gives fractional Brownian motion with Hurst index H.
class BifBmParams {
public:
    BifBmParams(double h, double k, int d = 1);

    double h() const noexcept { return h_; }
    double k() const noexcept { return k_; }
    int d() const noexcept { return d_; }
    /// Self-similarity index HK.
    double hk() const noexcept { return h_ * k_; }
    /// Decay rate min{H(2-K), HK} attached to the Lamperti covariance in the literature.
    /// It bounds the true rate only when HK <= 1/2; see lamperti_decay().
    double beta_decay() const noexcept;
    /// Exact exponential decay rate of the Lamperti covariance, min{H(2-K), 1-HK}.
    double lamperti_decay() const noexcept;

private:
    double h_;
    double k_;
    int d_;
};

/// Exponent matrices of an (N,d) bifractional Brownian sheet.
///
/// Row i holds the per-axis exponents (H_{i,1..N}, K_{i,1..N}) of component i.
class SheetParams {
public:
    SheetParams(Eigen::MatrixXd hbar, Eigen::MatrixXd kbar);

    /// Sheet whose d components all share the per-axis exponents h[j], k[j].
    static SheetParams isotropic(std::span<const double> h, std::span<const double> k, int d);

    int d() const noexcept { return static_cast<int>(hbar_.rows()); }
    int n_params() const noexcept { return static_cast<int>(hbar_.cols()); }
    double h(int i, int j) const { return hbar_(i, j); }
    double k(int i, int j) const { return kbar_(i, j); }
    const Eigen::MatrixXd& hbar() const noexcept { return hbar_; }
    const Eigen::MatrixXd& kbar() const noexcept { return kbar_; }

    /// H*_j = max_i H_{i,j}.
    double h_star(int j) const;
    /// K*_j = max_i K_{i,j}.
    double k_star(int j) const;
    /// One-parameter exponents of component i along axis j.
    BifBmParams axis(int i, int j) const;

private:
    Eigen::MatrixXd hbar_;
    Eigen::MatrixXd kbar_;
};

/// Strictly increasing, nonnegative sampling times.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<double> points);

    /// n points t_i = t_max * i / (n-1), i = 0..n-1 (a single point {t_max} when n = 1).
    static TimeGrid uniform(double t_max, std::size_t n);
    /// n points t_i = t_max * (i+1) / n, excluding the origin.
    static TimeGrid uniform_open(double t_max, std::size_t n);
    /// n points log-uniform on [t_min, t_max]; optionally prefixed with t = 0.
    static TimeGrid geometric(double t_min, double t_max, std::size_t n, bool include_zero = false);

    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    double operator[](std::size_t i) const { return points_[i]; }
    double front() const { return points_.front(); }
    double back() const { return points_.back(); }
    std::span<const double> points() const noexcept { return points_; }
    bool starts_at_zero() const noexcept { return !points_.empty() && points_.front() == 0.0; }

    /// Index of the first strictly positive point.
    std::size_t first_positive() const noexcept { return starts_at_zero() ? 1 : 0; }

    /// True when the positive points are equally spaced in log-time (relative tolerance tol).
    bool is_log_uniform(double tol = 1e-9) const;

private:
    std::vector<double> points_;
};

}  // namespace bifbm
