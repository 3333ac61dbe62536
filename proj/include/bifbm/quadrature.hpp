#pragma once

#include <cstddef>
#include <vector>

namespace bifbm {

/// Nodes and weights of a quadrature rule.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;

    std::size_t size() const noexcept { return nodes.size(); }
    /// Sum of weight * g(node).
    template <class F>
    double integrate(F&& g) const {
        double s = 0.0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            s += weights[i] * g(nodes[i]);
        }
        return s;
    }
};

/// n-point Gauss-Legendre rule on [a, b]. Nodes never touch the endpoints.
QuadratureRule gauss_legendre(std::size_t n, double a, double b);

/// Composite Gauss-Legendre rule on [a, b] with panels graded geometrically
/// toward the endpoints.
///
/// Each half of [a, b] that is graded is split at ratios 1/2, 1/4, ... toward
/// its endpoint, `depth` times; the last panel reaches the endpoint. A depth of
/// 0 leaves that half as one panel. Used for integrands with algebraic
/// endpoint singularities such as u^-HK.
QuadratureRule graded_rule(std::size_t n_per_panel, double a, double b, int depth_left, int depth_right);

}  // namespace bifbm
