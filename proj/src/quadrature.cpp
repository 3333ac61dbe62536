#include "bifbm/quadrature.hpp"

#include <cmath>
#include <numbers>

#include "bifbm/error.hpp"

namespace bifbm {

namespace {

// Reference rule on [-1, 1] by Newton iteration on the Legendre recurrence.
QuadratureRule reference_rule(std::size_t n) {
    QuadratureRule r;
    r.nodes.resize(n);
    r.weights.resize(n);
    const auto nd = static_cast<double>(n);
    for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (nd + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (std::size_t k = 2; k <= n; ++k) {
                const auto kd = static_cast<double>(k);
                const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
                p0 = p1;
                p1 = p2;
            }
            dp = nd * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[i] = -x;
        r.weights[i] = w;
        r.nodes[n - 1 - i] = x;
        r.weights[n - 1 - i] = w;
    }
    return r;
}

void append_panel(QuadratureRule& out, const QuadratureRule& ref, double a, double b) {
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < ref.size(); ++i) {
        out.nodes.push_back(mid + half * ref.nodes[i]);
        out.weights.push_back(half * ref.weights[i]);
    }
}

}  // namespace

QuadratureRule gauss_legendre(std::size_t n, double a, double b) {
    if (n == 0) {
        throw DomainError("Gauss-Legendre rule needs at least one node");
    }
    if (!(b > a)) {
        throw DomainError("quadrature interval must satisfy a < b");
    }
    QuadratureRule out;
    append_panel(out, reference_rule(n), a, b);
    return out;
}

QuadratureRule graded_rule(std::size_t n_per_panel, double a, double b, int depth_left, int depth_right) {
    if (n_per_panel == 0 || depth_left < 0 || depth_right < 0) {
        throw DomainError("graded rule needs nodes per panel and nonnegative depths");
    }
    if (!(b > a)) {
        throw DomainError("quadrature interval must satisfy a < b");
    }
    const QuadratureRule ref = reference_rule(n_per_panel);
    const double mid = 0.5 * (a + b);
    const double half = mid - a;
    QuadratureRule out;
    // Left half, panels ordered from a upward.
    if (depth_left == 0) {
        append_panel(out, ref, a, mid);
    } else {
        append_panel(out, ref, a, a + half * std::ldexp(1.0, -depth_left));
        for (int k = depth_left; k >= 1; --k) {
            append_panel(out, ref, a + half * std::ldexp(1.0, -k), a + half * std::ldexp(1.0, -(k - 1)));
        }
    }
    // Right half, panels ordered from mid upward toward b.
    if (depth_right == 0) {
        append_panel(out, ref, mid, b);
    } else {
        for (int k = 0; k < depth_right; ++k) {
            append_panel(out, ref, b - half * std::ldexp(1.0, -k), b - half * std::ldexp(1.0, -(k + 1)));
        }
        append_panel(out, ref, b - half * std::ldexp(1.0, -depth_right), b);
    }
    return out;
}

}  // namespace bifbm
