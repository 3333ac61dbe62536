#include "bifbm/kernels.hpp"

#include <cmath>
#include <string>

#include "bifbm/error.hpp"

namespace bifbm {

namespace {

void require_nonnegative(double s, double t) {
    if (!(s >= 0.0) || !(t >= 0.0)) {
        throw DomainError("covariance arguments must be nonnegative, got (" + std::to_string(s) + ", " +
                          std::to_string(t) + ")");
    }
}

}  // namespace

double cov_bifbm(double s, double t, const BifBmParams& p) {
    require_nonnegative(s, t);
    if (s == 0.0 || t == 0.0) {
        return 0.0;  // B(0) = 0; the general formula leaves a rounding residue here
    }
    const double h = p.h();
    const double k = p.k();
    const double sum = std::pow(t, 2.0 * h) + std::pow(s, 2.0 * h);
    return std::exp2(-k) * (std::pow(sum, k) - std::pow(std::abs(t - s), 2.0 * h * k));
}

double cov_sheet(std::span<const double> s, std::span<const double> t, int i, const SheetParams& p) {
    const auto n = static_cast<std::size_t>(p.n_params());
    if (s.size() != n || t.size() != n) {
        throw DomainError("sheet covariance: expected " + std::to_string(n) + " coordinates, got " +
                          std::to_string(s.size()) + " and " + std::to_string(t.size()));
    }
    if (i < 0 || i >= p.d()) {
        throw DomainError("sheet covariance: component index out of range");
    }
    double out = 1.0;
    for (std::size_t j = 0; j < n; ++j) {
        out *= cov_bifbm(s[j], t[j], p.axis(i, static_cast<int>(j)));
    }
    return out;
}

double increment_variance(double s, double t, const BifBmParams& p) {
    require_nonnegative(s, t);
    const double h = p.h();
    const double k = p.k();
    const double hk = p.hk();
    const double c = std::exp2(1.0 - k);
    const double smooth =
        std::pow(t, 2.0 * hk) + std::pow(s, 2.0 * hk) - c * std::pow(std::pow(t, 2.0 * h) + std::pow(s, 2.0 * h), k);
    const double v = smooth + c * std::pow(std::abs(t - s), 2.0 * hk);
    return v > 0.0 ? v : 0.0;
}

double lamperti_cov(double tau, const BifBmParams& p) {
    const double x = std::abs(tau);
    if (x == 0.0) {
        return 1.0;
    }
    const double h = p.h();
    const double k = p.k();
    const double hk = p.hk();
    if (x < 1.0) {
        return std::exp2(-k) * std::exp(-hk * x) *
               (std::pow(std::exp(2.0 * h * x) + 1.0, k) - std::pow(std::expm1(x), 2.0 * hk));
    }
    // 2^-K e^{HK x} [ (1 + e^{-2Hx})^K - (1 - e^{-x})^{2HK} ] = 2^-K e^{HK x + b} expm1(a - b)
    const double a = k * std::log1p(std::exp(-2.0 * h * x));
    const double b = 2.0 * hk * std::log1p(-std::exp(-x));
    return std::exp2(-k) * std::exp(hk * x + b) * std::expm1(a - b);
}

double q_function(double z, double h, double k) {
    if (!(z >= 0.0 && z <= 1.0)) {
        throw DomainError("Q-function argument must lie in [0,1]");
    }
    const BifBmParams p(h, k);
    if (z == 0.0) {
        return 0.0;
    }
    if (z == 1.0) {
        return 1.0;
    }
    return cov_bifbm(1.0, z, p) / std::pow(z, p.hk());
}

}  // namespace bifbm
