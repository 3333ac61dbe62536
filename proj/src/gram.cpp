#include "bifbm/gram.hpp"

#include <algorithm>
#include <string>

#include "bifbm/error.hpp"
#include "bifbm/kernels.hpp"

namespace bifbm {

namespace {

bool symmetric(const Eigen::MatrixXd& a) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return ((a - a.transpose()).cwiseAbs().maxCoeff()) <= 1e-14 * scale;
}

}  // namespace

double jittered_cholesky(const Eigen::MatrixXd& a, Eigen::MatrixXd& lower) {
    const Eigen::Index n = a.rows();
    for (const double jitter : kJitterLadder) {
        Eigen::MatrixXd shifted = a;
        shifted.diagonal().array() += jitter;
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() == Eigen::Success) {
            lower = llt.matrixL();
            if (lower.diagonal().minCoeff() > 0.0 && lower.allFinite()) {
                return jitter;
            }
        }
    }
    throw NotPositiveDefiniteError("Gram matrix of size " + std::to_string(n) +
                                   " is not positive definite even with jitter " +
                                   std::to_string(kJitterLadder.back()));
}

CovarianceMatrix::CovarianceMatrix(Eigen::MatrixXd entries) : entries_(std::move(entries)) {
    if (entries_.rows() != entries_.cols() || entries_.rows() == 0) {
        throw DomainError("covariance matrix must be square and nonempty");
    }
    if (!symmetric(entries_)) {
        throw DomainError("covariance matrix is not symmetric");
    }
    const Eigen::Index n = entries_.rows();
    std::vector<Eigen::Index> active;
    active.reserve(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (entries_.row(i).cwiseAbs().maxCoeff() != 0.0) {
            active.push_back(i);
        }
    }
    factor_ = Eigen::MatrixXd::Zero(n, n);
    if (active.empty()) {
        return;
    }
    const auto m = static_cast<Eigen::Index>(active.size());
    Eigen::MatrixXd sub(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b < m; ++b) {
            sub(a, b) = entries_(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]);
        }
    }
    Eigen::MatrixXd lower;
    jitter_ = jittered_cholesky(sub, lower);
    for (Eigen::Index a = 0; a < m; ++a) {
        for (Eigen::Index b = 0; b <= a; ++b) {
            factor_(active[static_cast<std::size_t>(a)], active[static_cast<std::size_t>(b)]) = lower(a, b);
        }
    }
}

CovarianceMatrix cov_matrix(const TimeGrid& grid, const BifBmParams& p) {
    if (grid.empty()) {
        throw DomainError("grid must be nonempty");
    }
    const auto n = static_cast<Eigen::Index>(grid.size());
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double v = cov_bifbm(grid[static_cast<std::size_t>(i)], grid[static_cast<std::size_t>(j)], p);
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    return CovarianceMatrix(std::move(a));
}

double conditional_variance(std::size_t target, std::span<const std::size_t> conditioners,
                            const CovarianceMatrix& cov) {
    const auto n = static_cast<std::size_t>(cov.size());
    if (target >= n) {
        throw DomainError("conditional variance: target index out of range");
    }
    const Eigen::MatrixXd& a = cov.entries();
    const auto ti = static_cast<Eigen::Index>(target);
    if (conditioners.empty()) {
        return a(ti, ti);
    }
    const auto m = static_cast<Eigen::Index>(conditioners.size());
    Eigen::MatrixXd cc(m, m);
    Eigen::VectorXd ct(m);
    for (Eigen::Index r = 0; r < m; ++r) {
        const std::size_t ir = conditioners[static_cast<std::size_t>(r)];
        if (ir >= n) {
            throw DomainError("conditional variance: conditioner index out of range");
        }
        if (ir == target) {
            throw DomainError("conditional variance: target cannot condition on itself");
        }
        ct(r) = a(static_cast<Eigen::Index>(ir), ti);
        for (Eigen::Index c = 0; c < m; ++c) {
            cc(r, c) = a(static_cast<Eigen::Index>(ir), static_cast<Eigen::Index>(conditioners[static_cast<std::size_t>(c)]));
        }
    }
    Eigen::MatrixXd lower;
    try {
        jittered_cholesky(cc, lower);
    } catch (const NotPositiveDefiniteError&) {
        throw SingularConditionerError("conditioning block of size " + std::to_string(m) +
                                       " is numerically singular");
    }
    const Eigen::VectorXd w = lower.triangularView<Eigen::Lower>().solve(ct);
    const double v = a(ti, ti) - w.squaredNorm();
    // Rounding can push an exactly determined value slightly below zero.
    return v > 0.0 ? v : 0.0;
}

std::vector<double> conditional_variance_profile(double target, std::span<const double> radii, double a, double b,
                                                 const BifBmParams& p, int per_radius) {
    if (!(a >= 0.0) || !(a < target) || !(target < b) || per_radius < 1) {
        throw DomainError("conditional variance profile needs 0 <= a < target < b and per_radius >= 1");
    }
    std::vector<double> out;
    out.reserve(radii.size());
    for (const double r : radii) {
        if (!(r > 0.0)) {
            throw DomainError("conditioning radius must be positive");
        }
        const double step = r / per_radius;
        std::vector<double> pts{target};
        for (double s = target - r; s >= a; s -= step) {
            pts.push_back(s);
        }
        for (double s = target + r; s <= b; s += step) {
            pts.push_back(s);
        }
        if (pts.size() == 1) {
            throw DomainError("conditioning radius leaves no conditioner inside [a, b]");
        }
        const auto n = static_cast<Eigen::Index>(pts.size());
        Eigen::MatrixXd g(n, n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index j = 0; j <= i; ++j) {
                const double v = cov_bifbm(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)], p);
                g(i, j) = v;
                g(j, i) = v;
            }
        }
        // Only the conditioning block is factorized; the full matrix never needs to be.
        const Eigen::MatrixXd cc = g.bottomRightCorner(n - 1, n - 1);
        const Eigen::VectorXd ct = g.col(0).tail(n - 1);
        Eigen::MatrixXd lower;
        try {
            jittered_cholesky(cc, lower);
        } catch (const NotPositiveDefiniteError&) {
            throw SingularConditionerError("conditioning block at radius " + std::to_string(r) +
                                           " is numerically singular");
        }
        const Eigen::VectorXd w = lower.triangularView<Eigen::Lower>().solve(ct);
        out.push_back(std::max(0.0, g(0, 0) - w.squaredNorm()));
    }
    return out;
}

}  // namespace bifbm
