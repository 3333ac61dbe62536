#include "bifbm/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "bifbm/error.hpp"
#include "bifbm/kernels.hpp"
#include "bifbm/quadrature.hpp"

namespace bifbm {

namespace {

constexpr int kDirectHermiteMax = 300;

// out[n] = He_n(x) / sqrt(n!) for n = 0..out.size()-1.
void fill_orthonormal(double x, std::span<double> out) {
    if (out.empty()) {
        return;
    }
    out[0] = 1.0;
    if (out.size() > 1) {
        out[1] = x;
    }
    for (std::size_t n = 1; n + 1 < out.size(); ++n) {
        const auto nd = static_cast<double>(n);
        out[n + 1] = (x * out[n] - std::sqrt(nd) * out[n - 1]) / std::sqrt(nd + 1.0);
    }
}

double sum_inverse_hk_star(const SheetParams& p) {
    double s = 0.0;
    for (int j = 0; j < p.n_params(); ++j) {
        s += 1.0 / (p.h_star(j) * p.k_star(j));
    }
    return s;
}

}  // namespace

double hermite(int n, double x) {
    if (n < 0) {
        throw DomainError("Hermite order must be nonnegative");
    }
    if (n > kDirectHermiteMax) {
        const LogMagnitude v = hermite_log(n, x);
        return v.sign * std::exp(v.log_abs);
    }
    double prev = 1.0;
    if (n == 0) {
        return prev;
    }
    double cur = x;
    for (int k = 1; k < n; ++k) {
        const double next = (x * cur - prev) / static_cast<double>(k + 1);
        prev = cur;
        cur = next;
    }
    return cur;
}

LogMagnitude hermite_log(int n, double x) {
    if (n < 0) {
        throw DomainError("Hermite order must be nonnegative");
    }
    // Scaled recurrence: true values are (prev, cur) * exp(shift).
    double prev = 1.0;
    double cur = n == 0 ? 1.0 : x;
    double shift = 0.0;
    for (int k = 1; k < n; ++k) {
        const double next = (x * cur - prev) / static_cast<double>(k + 1);
        prev = cur;
        cur = next;
        const double mag = std::abs(cur);
        if (mag > 1e150 || (mag < 1e-150 && mag > 0.0)) {
            const double s = std::log(mag);
            prev /= mag;
            cur /= mag;
            shift += s;
        }
    }
    LogMagnitude out;
    if (cur == 0.0) {
        out.log_abs = -std::numeric_limits<double>::infinity();
        return out;
    }
    out.log_abs = std::log(std::abs(cur)) + shift;
    out.sign = cur < 0.0 ? -1 : 1;
    return out;
}

std::vector<double> hermite_orthonormal(int n_max, double x) {
    if (n_max < 0) {
        throw DomainError("Hermite order must be nonnegative");
    }
    std::vector<double> out(static_cast<std::size_t>(n_max) + 1);
    fill_orthonormal(x, out);
    return out;
}

double gaussian_kernel(double sigma2, std::span<const double> x) {
    if (!(sigma2 > 0.0)) {
        throw DomainError("Gaussian kernel variance must be positive");
    }
    double out = 1.0;
    for (const double xi : x) {
        out *= std::exp(-xi * xi / (2.0 * sigma2)) / std::sqrt(2.0 * std::numbers::pi * sigma2);
    }
    return out;
}

double gaussian_kernel(double sigma2, double x) {
    return gaussian_kernel(sigma2, std::span<const double>(&x, 1));
}

double chaos_coefficient(double x, int n, std::span<const double> s, const SheetParams& p, int i) {
    if (static_cast<int>(s.size()) != p.n_params()) {
        throw DomainError("chaos coefficient: expected " + std::to_string(p.n_params()) + " time coordinates");
    }
    if (i < 0 || i >= p.d()) {
        throw DomainError("chaos coefficient: component index out of range");
    }
    double sigma = 1.0;
    for (std::size_t j = 0; j < s.size(); ++j) {
        if (!(s[j] > 0.0)) {
            throw DomainError("chaos coefficient needs every time coordinate positive");
        }
        sigma *= std::pow(s[j], p.h(i, static_cast<int>(j)) * p.k(i, static_cast<int>(j)));
    }
    return gaussian_kernel(sigma * sigma, x) / std::pow(sigma, n) * hermite(n, x / sigma);
}

std::vector<std::vector<int>> compositions(int m, int d) {
    if (m < 0 || d < 1) {
        throw DomainError("compositions need m >= 0 and d >= 1");
    }
    std::vector<std::vector<int>> out;
    // Colexicographic: the last part varies slowest.
    std::vector<int> c(static_cast<std::size_t>(d), 0);
    c[0] = m;
    while (true) {
        out.push_back(c);
        // Find the first position with a positive part that can move right.
        std::size_t j = 0;
        while (j + 1 < c.size() && c[j] == 0) {
            ++j;
        }
        if (j + 1 >= c.size()) {
            break;
        }
        const int carry = c[j] - 1;
        c[j] = 0;
        c[j + 1] += 1;
        c[0] = carry;
    }
    return out;
}

double chaos_envelope_exponent(const SheetParams& p) {
    double s = 0.0;
    for (int j = 0; j < p.n_params(); ++j) {
        s += 1.0 / (2.0 * p.h_star(j) * p.k_star(j));
    }
    return s - 0.5 * p.d() + 1.0;
}

namespace {

void finish_norm(TruncatedNorm& out, double alpha) {
    const int big_m = out.order_cap;
    double partial = 0.0;
    for (auto& term : out.terms) {
        term.value *= std::pow(1.0 + term.m, alpha);
        partial += term.value;
        term.partial_sum = partial;
    }
    for (int m = 0; m <= big_m; ++m) {
        out.order_terms[static_cast<std::size_t>(m)] *= std::pow(1.0 + m, alpha);
    }
    out.value = 0.0;
    for (const double v : out.order_terms) {
        out.value += v;
    }
    const double gamma = out.envelope_exponent - alpha;
    if (gamma <= 1.0) {
        out.divergent = true;
        out.tail_estimate = std::numeric_limits<double>::infinity();
        return;
    }
    // Envelope constant from the last (up to) four orders.
    const int first = std::max(1, big_m - 3);
    if (big_m < 1) {
        out.tail_estimate = std::numeric_limits<double>::quiet_NaN();
        return;
    }
    double c = 0.0;
    for (int m = first; m <= big_m; ++m) {
        c += out.order_terms[static_cast<std::size_t>(m)] * std::pow(static_cast<double>(m), gamma);
    }
    c /= static_cast<double>(big_m - first + 1);
    out.tail_estimate = c * std::pow(big_m + 0.5, 1.0 - gamma) / (gamma - 1.0);
}

}  // namespace

TruncatedNorm local_time_l2_truncated(std::span<const double> x, std::span<const double> t, const SheetParams& p,
                                      int order_cap, std::size_t quad_n, int depth) {
    const int d = p.d();
    const int big_n = p.n_params();
    if (static_cast<int>(x.size()) != d || static_cast<int>(t.size()) != big_n) {
        throw DomainError("chaos norm: level must have d entries and time N entries");
    }
    if (order_cap < 0) {
        throw DomainError("chaos norm: order cap must be nonnegative");
    }
    if (!(sum_inverse_hk_star(p) > d)) {
        throw DomainError("chaos norm: sum_j 1/(H*_j K*_j) must exceed d for the local time to be in L2");
    }
    if (big_n > 2) {
        throw ResolutionError("chaos norm: tensor quadrature supports N <= 2 time parameters");
    }
    if (quad_n < 2 || depth < 1) {
        throw ResolutionError("chaos norm: need at least 2 nodes per panel and grading depth >= 1");
    }
    for (const double tj : t) {
        if (!(tj > 0.0)) {
            throw DomainError("chaos norm: time coordinates must be positive");
        }
    }

    const auto nd = static_cast<std::size_t>(d);
    const auto nn = static_cast<std::size_t>(big_n);
    const auto orders = static_cast<std::size_t>(order_cap) + 1;

    // Rules per axis and correlation factors Q_ij(z) on the z nodes.
    std::vector<QuadratureRule> a_rules;
    for (std::size_t j = 0; j < nn; ++j) {
        a_rules.push_back(graded_rule(quad_n, 0.0, t[j], depth, 0));
    }
    const QuadratureRule z_rule = graded_rule(quad_n, 0.0, 1.0, depth, depth);
    std::vector<std::vector<std::vector<double>>> q(nd, std::vector<std::vector<double>>(nn));
    for (std::size_t i = 0; i < nd; ++i) {
        for (std::size_t j = 0; j < nn; ++j) {
            for (const double z : z_rule.nodes) {
                q[i][j].push_back(q_function(z, p.h(static_cast<int>(i), static_cast<int>(j)),
                                             p.k(static_cast<int>(i), static_cast<int>(j))));
            }
        }
    }

    // Composition table.
    std::vector<std::vector<int>> comps;
    std::vector<int> comp_order;
    for (int m = 0; m <= order_cap; ++m) {
        for (auto& c : compositions(m, d)) {
            comps.push_back(std::move(c));
            comp_order.push_back(m);
        }
    }
    std::vector<double> acc(comps.size(), 0.0);

    std::vector<std::vector<double>> term(nd, std::vector<double>(orders));
    std::vector<double> hu(orders);
    std::vector<double> hv(orders);
    std::vector<double> u(nn);
    std::vector<double> v(nn);
    std::vector<std::size_t> ia(nn, 0);
    std::vector<std::size_t> iz(nn, 0);

    for (unsigned region = 0; region < (1u << nn); ++region) {
        std::fill(ia.begin(), ia.end(), 0);
        std::fill(iz.begin(), iz.end(), 0);
        while (true) {
            double w = 1.0;
            for (std::size_t j = 0; j < nn; ++j) {
                const double a = a_rules[j].nodes[ia[j]];
                const double z = z_rule.nodes[iz[j]];
                w *= a_rules[j].weights[ia[j]] * z_rule.weights[iz[j]] * a;
                if ((region >> j) & 1u) {
                    u[j] = z * a;
                    v[j] = a;
                } else {
                    u[j] = a;
                    v[j] = z * a;
                }
            }
            for (std::size_t i = 0; i < nd; ++i) {
                double su = 1.0;
                double sv = 1.0;
                double rho = 1.0;
                for (std::size_t j = 0; j < nn; ++j) {
                    const double hk = p.h(static_cast<int>(i), static_cast<int>(j)) *
                                      p.k(static_cast<int>(i), static_cast<int>(j));
                    su *= std::pow(u[j], hk);
                    sv *= std::pow(v[j], hk);
                    rho *= q[i][j][iz[j]];
                }
                const double base = gaussian_kernel(su * su, x[i]) * gaussian_kernel(sv * sv, x[i]);
                if (base == 0.0) {
                    // x far in the Gaussian tail; the Hermite factors would overflow.
                    std::fill(term[i].begin(), term[i].end(), 0.0);
                    continue;
                }
                fill_orthonormal(x[i] / su, hu);
                fill_orthonormal(x[i] / sv, hv);
                double rn = 1.0;
                for (std::size_t n = 0; n < orders; ++n) {
                    term[i][n] = base * hu[n] * hv[n] * rn;
                    rn *= rho;
                }
            }
            if (nd == 1) {
                for (std::size_t n = 0; n < orders; ++n) {
                    acc[n] += w * term[0][n];
                }
            } else {
                for (std::size_t c = 0; c < comps.size(); ++c) {
                    double prod = w;
                    for (std::size_t i = 0; i < nd; ++i) {
                        prod *= term[i][static_cast<std::size_t>(comps[c][i])];
                    }
                    acc[c] += prod;
                }
            }
            // Advance the 2N-digit odometer (z fastest).
            std::size_t j = 0;
            while (j < nn) {
                if (++iz[j] < z_rule.size()) {
                    break;
                }
                iz[j] = 0;
                if (++ia[j] < a_rules[j].size()) {
                    break;
                }
                ia[j] = 0;
                ++j;
            }
            if (j == nn) {
                break;
            }
        }
    }

    TruncatedNorm out;
    out.order_cap = order_cap;
    out.envelope_exponent = chaos_envelope_exponent(p);
    out.order_terms.assign(orders, 0.0);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        ChaosTerm ct;
        ct.m = comp_order[c];
        ct.composition = comps[c];
        ct.value = acc[c];
        out.order_terms[static_cast<std::size_t>(ct.m)] += acc[c];
        out.terms.push_back(std::move(ct));
    }
    finish_norm(out, 0.0);
    return out;
}

TruncatedNorm watanabe_norm_truncated(std::span<const double> x, std::span<const double> t, const SheetParams& p,
                                      double alpha, int order_cap, std::size_t quad_n, int depth) {
    if (!(alpha >= 0.0)) {
        throw DomainError("Watanabe weight exponent must be nonnegative");
    }
    TruncatedNorm out = local_time_l2_truncated(x, t, p, order_cap, quad_n, depth);
    if (alpha == 0.0) {
        return out;
    }
    // Terms carry weight 1 so far; apply (1 + m)^alpha.
    finish_norm(out, alpha);
    const double bound = out.envelope_exponent - 1.0;
    out.divergent = out.divergent || alpha >= bound;
    return out;
}

double q_decay_check(double h, double k, double delta, std::span<const int> n_values, std::span<const double> z_grid) {
    if (!(delta > 0.0 && delta < 0.5)) {
        throw DomainError("q decay check: delta must lie in (0, 0.5)");
    }
    if (n_values.empty() || z_grid.empty()) {
        throw DomainError("q decay check: need orders and z values");
    }
    double c = std::numeric_limits<double>::infinity();
    for (const double z : z_grid) {
        if (!(z > 1.0 - delta && z < 1.0)) {
            throw DomainError("q decay check: z values must lie in (1 - delta, 1)");
        }
        const double q = q_function(z, h, k);
        for (const int n : n_values) {
            if (n < 1) {
                throw DomainError("q decay check: orders must be positive");
            }
            const double lhs = -static_cast<double>(n) * std::log(q);
            c = std::min(c, lhs / (static_cast<double>(n) * std::pow(1.0 - z, 2.0 * h)));
        }
    }
    return c;
}

}  // namespace bifbm
