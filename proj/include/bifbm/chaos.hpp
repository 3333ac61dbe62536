#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "bifbm/params.hpp"

namespace bifbm {

/// H_n(x) = ((-1)^n / n!) e^{x^2/2} d^n/dx^n e^{-x^2/2}, i.e. He_n(x) / n!.
///
/// Three-term recurrence (n + 1) H_{n+1} = x H_n - H_{n-1}. Orders above 300
/// are evaluated through hermite_log and may underflow to 0.
double hermite(int n, double x);

/// Hermite value carried as sign * exp(log_abs) to avoid under/overflow.
struct LogMagnitude {
    double log_abs = 0.0;  ///< -inf for an exact zero
    int sign = 1;
};

LogMagnitude hermite_log(int n, double x);

/// He_n(x) / sqrt(n!) for n = 0..n_max: the orthonormal Hermite family.
std::vector<double> hermite_orthonormal(int n_max, double x);

/// Product of centered Gaussian densities with variance sigma2 at each coordinate of x.
double gaussian_kernel(double sigma2, std::span<const double> x);
double gaussian_kernel(double sigma2, double x);

/// beta_n(s) = p_{sigma^2}(x) / sigma^n * H_n(x / sigma) with sigma = prod_j s_j^{H_ij K_ij}.
double chaos_coefficient(double x, int n, std::span<const double> s, const SheetParams& p, int i);

/// One chaos term: the multi-index (n_1, ..., n_d) of total order m and its contribution.
struct ChaosTerm {
    int m = 0;
    std::vector<int> composition;
    double value = 0.0;
    double partial_sum = 0.0;  ///< running total through this term, in table order
};

struct TruncatedNorm {
    double value = 0.0;
    int order_cap = 0;
    double tail_estimate = 0.0;
    double envelope_exponent = 0.0;  ///< gamma in the term envelope C m^-gamma
    bool divergent = false;          ///< weighted envelope not summable
    std::vector<double> order_terms;  ///< total contribution of each order m = 0..M
    std::vector<ChaosTerm> terms;     ///< per composition, orders ascending, colexicographic within an order
};

/// Compositions of m into d nonnegative parts in colexicographic order.
std::vector<std::vector<int>> compositions(int m, int d);

/// Order-m chaos contributions to ||L(x, [0, t])||_2^2 summed for m = 0..M.
///
/// Uses the isometry E[I_n(f)^2] = n! ||f||^2, so the order-n term of one
/// component is n! int int beta_n(u) beta_n(v) R(u, v)^n du dv. Each axis of
/// [0, t_j]^2 is split into the triangles v <= u and u < v and mapped to
/// (a, z) with the smaller coordinate equal to z a; there the correlation
/// factor depends on z alone. Both variables use graded Gauss-Legendre
/// panels (quad_n nodes per panel, `depth` halvings toward each singular end).
TruncatedNorm local_time_l2_truncated(std::span<const double> x, std::span<const double> t, const SheetParams& p,
                                      int order_cap, std::size_t quad_n = 16, int depth = 48);

/// (1 + m)^alpha weighted partial sum; alpha = 0 reproduces local_time_l2_truncated.
/// `divergent` is set when alpha is at or beyond sum_j 1/(2 H*_j K*_j) - d/2.
TruncatedNorm watanabe_norm_truncated(std::span<const double> x, std::span<const double> t, const SheetParams& p,
                                      double alpha, int order_cap, std::size_t quad_n = 16, int depth = 48);

/// Largest c with Q(z)^n <= exp(-c n (1 - z)^{2H}) over the given n and z; z must lie in (1 - delta, 1).
double q_decay_check(double h, double k, double delta, std::span<const int> n_values, std::span<const double> z_grid);

/// Exponent gamma of the chaos term envelope C m^-gamma: sum_j 1/(2 H*_j K*_j) - d/2 + 1.
double chaos_envelope_exponent(const SheetParams& p);

}  // namespace bifbm
