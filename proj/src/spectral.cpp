#include "bifbm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bifbm/error.hpp"
#include "bifbm/kernels.hpp"

namespace bifbm {

namespace {

constexpr int kMaxDepth = 20;

struct Piece {
    double value;
    double error;
};

// 15-point Kronrod value with |K15 - G7| as the error estimate.
template <class G>
Piece kronrod_piece(const G& g, double a, double b) {
    using boost::math::quadrature::gauss;
    using boost::math::quadrature::gauss_kronrod;
    const double k15 = gauss_kronrod<double, 15>::integrate(g, a, b, 0, 0.0);
    const double g7 = gauss<double, 7>::integrate(g, a, b);
    return {k15, std::abs(k15 - g7)};
}

// Bisection until each piece meets its share of an absolute tolerance or hits the
// rounding floor of its own magnitude, whichever is larger.
template <class G>
Piece adaptive_piece(const G& g, double a, double b, double tol, int depth) {
    const Piece whole = kronrod_piece(g, a, b);
    const double m = 0.5 * (a + b);
    const double scale = std::max({std::abs(g(a)), std::abs(g(m)), std::abs(g(b))});
    const double floor = 1e-14 * (b - a) * scale;
    if (whole.error <= std::max(tol, floor) || depth >= kMaxDepth) {
        return whole;
    }
    const Piece left = adaptive_piece(g, a, m, 0.5 * tol, depth + 1);
    const Piece right = adaptive_piece(g, m, b, 0.5 * tol, depth + 1);
    return {left.value + right.value, left.error + right.error};
}

// r has a |t|^{2HK} cusp at the origin, so the first cell is cut into dyadic pieces
// [b 2^{-l-1}, b 2^{-l}], on each of which the integrand is smooth. Refinement stops
// once the untouched remainder [0, hi] is below a thousandth of the tolerance (|g| <= 1).
template <class G>
Piece cusp_cell(const G& g, double b, double tol) {
    Piece total{0.0, 0.0};
    double hi = b;
    while (hi > 1e-3 * tol) {
        const double lo = 0.5 * hi;
        const Piece p = adaptive_piece(g, lo, hi, 0.02 * tol, 0);
        total.value += p.value;
        total.error += p.error;
        hi = lo;
    }
    total.value += hi * g(0.5 * hi);
    total.error += hi;
    return total;
}

// Integrate g(t, cos(omega t), sin(omega t)) over [0, t_end] in cells of length pi/omega,
// accumulating the error estimates. Throws if the total error exceeds budget.
//
// The trigonometric factors are evaluated in cell-local coordinates,
// cos(omega (a_c + u)) = (-1)^c cos(omega u), so the rounding of large t never enters
// the phase.
template <class G>
double cellwise_integral(const G& g, double omega, double t_end, double budget) {
    const double cell = omega > 0.0 ? std::min(std::numbers::pi / omega, t_end) : t_end;
    const auto n_cells = static_cast<std::size_t>(std::ceil(t_end / cell));
    const double share = 0.5 * budget / static_cast<double>(n_cells);
    auto local = [&](double a, double sign) {
        return [&g, a, sign, omega](double u) {
            return g(a + u, sign * std::cos(omega * u), sign * std::sin(omega * u));
        };
    };
    Piece total = cusp_cell(local(0.0, 1.0), cell, 0.5 * budget);
    for (std::size_t c = 1; c < n_cells; ++c) {
        const double a = static_cast<double>(c) * cell;
        const double len = std::min(t_end - a, cell);
        if (!(len > 0.0)) {
            break;
        }
        const Piece p = adaptive_piece(local(a, c % 2 == 0 ? 1.0 : -1.0), 0.0, len, share, 0);
        total.value += p.value;
        total.error += p.error;
    }
    if (!(total.error <= budget) || !std::isfinite(total.value)) {
        throw QuadratureError("oscillatory quadrature error estimate " + std::to_string(total.error) +
                              " exceeds tolerance " + std::to_string(budget));
    }
    return total.value;
}

void require_tol(double tol) {
    if (!(tol > 0.0)) {
        throw DomainError("quadrature tolerance must be positive");
    }
}

// int_0^u lambda^2 cos(lambda t) d lambda, given c = cos(ut) and s = sin(ut)
double second_moment_kernel(double u, double t, double c, double s) {
    const double x = u * t;
    if (x < 0.5) {
        // sum_n (-1)^n t^{2n} u^{2n+3} / ((2n)! (2n+3))
        double term = u * u * u;  // n = 0 numerator
        double sum = term / 3.0;
        for (int n = 1; n < 12; ++n) {
            term *= -x * x / static_cast<double>((2 * n - 1) * (2 * n));
            sum += term / static_cast<double>(2 * n + 3);
        }
        return sum;
    }
    return u * u * s / t + 2.0 * u * c / (t * t) - 2.0 * s / (t * t * t);
}

}  // namespace

double spectral_truncation(const BifBmParams& p, double tol) {
    require_tol(tol);
    return std::max(20.0, -std::log(tol) / std::min(p.beta_decay(), p.lamperti_decay()));
}

double spectral_density(double lambda, const BifBmParams& p, double tol) {
    const double t_end = spectral_truncation(p, tol);
    const double w = std::abs(lambda);
    auto g = [&](double t, double c, double) { return lamperti_cov(t, p) * c; };
    const double integral = cellwise_integral(g, w, t_end, tol * std::numbers::pi);
    return integral / std::numbers::pi;
}

double spectral_tail_mass(double u, const BifBmParams& p, double tol) {
    if (!(u > 0.0)) {
        throw DomainError("spectral tail cutoff must be positive");
    }
    const double t_end = spectral_truncation(p, tol);
    auto g = [&](double t, double, double s) { return t == 0.0 ? u : lamperti_cov(t, p) * s / t; };
    const double inside = 2.0 / std::numbers::pi * cellwise_integral(g, u, t_end, tol * std::numbers::pi / 2.0);
    return 1.0 - inside;
}

double spectral_second_moment(double u, const BifBmParams& p, double tol) {
    if (!(u > 0.0)) {
        throw DomainError("spectral moment cutoff must be positive");
    }
    const double t_end = spectral_truncation(p, tol);
    auto g = [&](double t, double c, double s) { return lamperti_cov(t, p) * second_moment_kernel(u, t, c, s); };
    const double budget = tol * std::numbers::pi / 2.0 * std::max(1.0, u * u);
    return 2.0 / std::numbers::pi * cellwise_integral(g, u, t_end, budget);
}

double SpectralTable::operator()(double lambda) const {
    const double w = std::abs(lambda);
    if (lambdas.empty()) {
        return 0.0;
    }
    if (w <= lambdas.front()) {
        return values.front();
    }
    if (w >= lambdas.back()) {
        return values.back() * std::pow(w / lambdas.back(), tail_exponent);
    }
    const auto it = std::upper_bound(lambdas.begin(), lambdas.end(), w);
    const auto hi = static_cast<std::size_t>(it - lambdas.begin());
    const std::size_t lo = hi - 1;
    const double frac = std::log(w / lambdas[lo]) / std::log(lambdas[hi] / lambdas[lo]);
    return std::exp(std::log(values[lo]) + frac * (std::log(values[hi]) - std::log(values[lo])));
}

SpectralTable make_spectral_table(const BifBmParams& p, double lambda_lo, double lambda_hi, std::size_t n,
                                  double tol) {
    if (!(lambda_lo > 0.0) || !(lambda_hi > lambda_lo) || n < 2) {
        throw DomainError("spectral table needs 0 < lambda_lo < lambda_hi and n >= 2");
    }
    SpectralTable table;
    table.beta_decay = p.beta_decay();
    table.tail_exponent = -(1.0 + 2.0 * p.hk());
    table.lambdas.resize(n);
    table.values.resize(n);
    const double step = std::log(lambda_hi / lambda_lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double lam = lambda_lo * std::exp(step * static_cast<double>(i));
        table.lambdas[i] = lam;
        table.values[i] = spectral_density(lam, p, tol);
        if (!(table.values[i] > 0.0)) {
            throw QuadratureError("spectral density evaluated nonpositive at lambda = " + std::to_string(lam) +
                                  "; tighten the tolerance");
        }
    }
    return table;
}

}  // namespace bifbm
