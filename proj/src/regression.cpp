#include "bifbm/regression.hpp"

#include <algorithm>
#include <cmath>

#include "bifbm/error.hpp"

namespace bifbm {

ScalingFit fit_scaling(std::vector<double> abscissae, std::vector<double> ordinates) {
    const std::size_t n = abscissae.size();
    if (n < 2 || ordinates.size() != n) {
        throw DomainError("scaling fit needs at least two (x, y) pairs of equal length");
    }
    const bool increasing = abscissae[1] > abscissae[0];
    for (std::size_t i = 1; i < n; ++i) {
        if (increasing ? !(abscissae[i] > abscissae[i - 1]) : !(abscissae[i] < abscissae[i - 1])) {
            throw DomainError("scaling fit abscissae must be strictly monotone");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(abscissae[i]) || !std::isfinite(ordinates[i])) {
            throw DomainError("scaling fit data must be finite");
        }
    }
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += abscissae[i];
        my += ordinates[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = abscissae[i] - mx;
        const double dy = ordinates[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy > 0.0 ? std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0) : 1.0;
    fit.abscissae = std::move(abscissae);
    fit.ordinates = std::move(ordinates);
    return fit;
}

MeanEstimate mean_estimate(std::span<const double> values) {
    MeanEstimate est;
    est.n = values.size();
    if (values.empty()) {
        throw EmptySetError("mean of an empty sample");
    }
    double sum = 0.0;
    for (const double v : values) {
        sum += v;
    }
    est.mean = sum / static_cast<double>(est.n);
    if (est.n > 1) {
        double ss = 0.0;
        for (const double v : values) {
            ss += (v - est.mean) * (v - est.mean);
        }
        est.std_error = std::sqrt(ss / static_cast<double>(est.n - 1) / static_cast<double>(est.n));
    }
    return est;
}

double kolmogorov_survival(double x) {
    // The alternating series converges slowly near 0, where the survival is 1 to double precision.
    if (x < 0.2) {
        return 1.0;
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) {
            break;
        }
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) {
        throw EmptySetError("KS test needs two nonempty samples");
    }
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0;
    std::size_t j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) {
            ++i;
        }
        while (j < b.size() && b[j] == v) {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double ne = na * nb / (na + nb);
    const double sq = std::sqrt(ne);
    KsResult res;
    res.statistic = d;
    res.p_value = kolmogorov_survival((sq + 0.12 + 0.11 / sq) * d);
    return res;
}

}  // namespace bifbm
