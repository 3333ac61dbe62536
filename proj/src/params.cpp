#include "bifbm/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bifbm/error.hpp"

namespace bifbm {

BifBmParams::BifBmParams(double h, double k, int d) : h_(h), k_(k), d_(d) {
    if (!(h > 0.0 && h < 1.0)) {
        throw DomainError("H must lie in (0,1), got " + std::to_string(h));
    }
    if (!(k > 0.0 && k <= 1.0)) {
        throw DomainError("K must lie in (0,1], got " + std::to_string(k));
    }
    if (d < 1) {
        throw DomainError("dimension d must be >= 1");
    }
}

double BifBmParams::beta_decay() const noexcept { return std::min(h_ * (2.0 - k_), h_ * k_); }

double BifBmParams::lamperti_decay() const noexcept { return std::min(h_ * (2.0 - k_), 1.0 - h_ * k_); }

SheetParams::SheetParams(Eigen::MatrixXd hbar, Eigen::MatrixXd kbar)
    : hbar_(std::move(hbar)), kbar_(std::move(kbar)) {
    if (hbar_.rows() < 1 || hbar_.cols() < 1) {
        throw DomainError("sheet exponent matrices must be nonempty");
    }
    if (hbar_.rows() != kbar_.rows() || hbar_.cols() != kbar_.cols()) {
        throw DomainError("H and K exponent matrices must have the same shape");
    }
    for (Eigen::Index i = 0; i < hbar_.rows(); ++i) {
        for (Eigen::Index j = 0; j < hbar_.cols(); ++j) {
            // Reuse the one-parameter validation for each entry.
            BifBmParams(hbar_(i, j), kbar_(i, j));
        }
    }
}

SheetParams SheetParams::isotropic(std::span<const double> h, std::span<const double> k, int d) {
    if (h.size() != k.size() || h.empty()) {
        throw DomainError("per-axis H and K vectors must be nonempty and of equal length");
    }
    if (d < 1) {
        throw DomainError("dimension d must be >= 1");
    }
    const auto n = static_cast<Eigen::Index>(h.size());
    Eigen::MatrixXd hb(d, n), kb(d, n);
    for (int i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            hb(i, j) = h[static_cast<std::size_t>(j)];
            kb(i, j) = k[static_cast<std::size_t>(j)];
        }
    }
    return SheetParams(std::move(hb), std::move(kb));
}

double SheetParams::h_star(int j) const { return hbar_.col(j).maxCoeff(); }
double SheetParams::k_star(int j) const { return kbar_.col(j).maxCoeff(); }

BifBmParams SheetParams::axis(int i, int j) const { return BifBmParams(hbar_(i, j), kbar_(i, j)); }

TimeGrid::TimeGrid(std::vector<double> points) : points_(std::move(points)) {
    for (std::size_t i = 0; i < points_.size(); ++i) {
        if (!std::isfinite(points_[i]) || points_[i] < 0.0) {
            throw DomainError("time grid points must be finite and nonnegative");
        }
        if (i > 0 && !(points_[i - 1] < points_[i])) {
            throw DomainError("time grid points must be strictly increasing");
        }
    }
}

TimeGrid TimeGrid::uniform(double t_max, std::size_t n) {
    if (n == 0) {
        throw DomainError("grid must be nonempty");
    }
    if (!(t_max > 0.0)) {
        throw DomainError("t_max must be positive");
    }
    if (n == 1) {
        return TimeGrid({t_max});
    }
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    pts.back() = t_max;
    return TimeGrid(std::move(pts));
}

TimeGrid TimeGrid::uniform_open(double t_max, std::size_t n) {
    if (n == 0) {
        throw DomainError("grid must be nonempty");
    }
    if (!(t_max > 0.0)) {
        throw DomainError("t_max must be positive");
    }
    std::vector<double> pts(n);
    for (std::size_t i = 0; i < n; ++i) {
        pts[i] = t_max * static_cast<double>(i + 1) / static_cast<double>(n);
    }
    return TimeGrid(std::move(pts));
}

TimeGrid TimeGrid::geometric(double t_min, double t_max, std::size_t n, bool include_zero) {
    if (n == 0) {
        throw DomainError("grid must be nonempty");
    }
    if (!(t_min > 0.0) || !(t_max >= t_min)) {
        throw DomainError("geometric grid needs 0 < t_min <= t_max");
    }
    if (n > 1 && !(t_max > t_min)) {
        throw DomainError("geometric grid with n > 1 needs t_min < t_max");
    }
    std::vector<double> pts;
    pts.reserve(n + (include_zero ? 1 : 0));
    if (include_zero) {
        pts.push_back(0.0);
    }
    const double lo = std::log(t_min);
    const double step = n > 1 ? (std::log(t_max) - lo) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        pts.push_back(std::exp(lo + step * static_cast<double>(i)));
    }
    if (n > 1) {
        pts[pts.size() - n] = t_min;
        pts.back() = t_max;
    }
    return TimeGrid(std::move(pts));
}

bool TimeGrid::is_log_uniform(double tol) const {
    const std::size_t first = first_positive();
    if (points_.size() < first + 3) {
        return points_.size() > first;
    }
    const double step = std::log(points_[first + 1] / points_[first]);
    for (std::size_t i = first + 1; i + 1 < points_.size(); ++i) {
        const double s = std::log(points_[i + 1] / points_[i]);
        if (std::abs(s - step) > tol * std::max(1.0, std::abs(step)) + 1e-12) {
            return false;
        }
    }
    return true;
}

}  // namespace bifbm
