#include <cmath>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <gtest/gtest.h>

#include "bifbm/chaos.hpp"
#include "bifbm/error.hpp"
#include "bifbm/experiments.hpp"
#include "bifbm/kernels.hpp"
#include "bifbm/params.hpp"

using namespace bifbm;

namespace {

SheetParams one_parameter(double h, double k) {
    const std::vector<double> hs{h};
    const std::vector<double> ks{k};
    return SheetParams::isotropic(hs, ks, 1);
}

// Polynomial coefficients of He_n built from He_{n+1} = x He_n - He_n', which is the
// derivative definition written one order at a time.
std::vector<std::vector<double>> hermite_polynomials(int n_max) {
    std::vector<std::vector<double>> he{{1.0}};
    for (int n = 0; n < n_max; ++n) {
        const std::vector<double>& p = he.back();
        std::vector<double> next(p.size() + 1, 0.0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            next[j + 1] += p[j];
        }
        for (std::size_t j = 1; j < p.size(); ++j) {
            next[j - 1] -= static_cast<double>(j) * p[j];
        }
        he.push_back(next);
    }
    return he;
}

double horner(const std::vector<double>& c, double x) {
    double v = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        v = v * x + *it;
    }
    return v;
}

double cov(double s, double t, double h, double k) {
    return std::pow(2.0, -k) *
           (std::pow(std::pow(t, 2 * h) + std::pow(s, 2 * h), k) - std::pow(std::abs(t - s), 2 * h * k));
}

double normal_density(double var, double x) {
    return std::exp(-x * x / (2.0 * var)) / std::sqrt(2.0 * std::numbers::pi * var);
}

}  // namespace

TEST(Hermite, MatchesDerivativeDefinition) {
    const auto he = hermite_polynomials(10);
    double factorial = 1.0;
    for (int n = 0; n <= 10; ++n) {
        if (n > 0) {
            factorial *= n;
        }
        for (const double x : {-2.0, 0.0, 1.0, 3.0}) {
            EXPECT_NEAR(hermite(n, x), horner(he[static_cast<std::size_t>(n)], x) / factorial, 1e-9)
                << "n=" << n << " x=" << x;
            EXPECT_NEAR(hermite(n, x), hermite_explicit(n, x), 1e-12);
        }
    }
    EXPECT_THROW(hermite(-1, 0.0), DomainError);
}

TEST(Hermite, GeneratingFunction) {
    for (const double x : {-2.0, 0.5, 3.0}) {
        for (const double y : {-0.5, 0.3}) {
            double s = 0.0;
            for (int n = 0; n <= 40; ++n) {
                s += hermite(n, x) * std::pow(y, n);
            }
            EXPECT_NEAR(s, std::exp(x * y - 0.5 * y * y), 1e-8);
        }
    }
}

TEST(Hermite, LogMagnitudeAndOrthonormalAgree) {
    for (const int n : {0, 1, 7, 30, 120}) {
        const double x = 1.3;
        const LogMagnitude lm = hermite_log(n, x);
        const double h = hermite(n, x);
        EXPECT_EQ(lm.sign, h < 0.0 ? -1 : 1);
        EXPECT_NEAR(lm.log_abs, std::log(std::abs(h)), 1e-10);
    }
    EXPECT_EQ(hermite_log(3, 0.0).log_abs, -std::numeric_limits<double>::infinity());
    // Large orders stay finite on the log scale.
    EXPECT_TRUE(std::isfinite(hermite_log(2000, 5.0).log_abs));

    const std::vector<double> ortho = hermite_orthonormal(12, -0.7);
    double factorial = 1.0;
    for (int n = 0; n <= 12; ++n) {
        if (n > 0) {
            factorial *= n;
        }
        EXPECT_NEAR(ortho[static_cast<std::size_t>(n)], hermite(n, -0.7) * std::sqrt(factorial), 1e-11);
    }
}

TEST(GaussianKernel, ValuesAndValidation) {
    EXPECT_NEAR(gaussian_kernel(1.0, 0.0), 1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-15);
    EXPECT_NEAR(gaussian_kernel(4.0, 2.0), normal_density(4.0, 2.0), 1e-15);
    const std::vector<double> x{0.5, -1.0};
    EXPECT_NEAR(gaussian_kernel(2.0, x), normal_density(2.0, 0.5) * normal_density(2.0, -1.0), 1e-15);
    // Unit mass by a midpoint sum.
    double mass = 0.0;
    for (int i = -4000; i < 4000; ++i) {
        mass += gaussian_kernel(0.7, (i + 0.5) * 0.005) * 0.005;
    }
    EXPECT_NEAR(mass, 1.0, 1e-10);
    EXPECT_THROW(gaussian_kernel(0.0, 1.0), DomainError);
}

TEST(ChaosCoefficient, ExplicitForm) {
    const SheetParams p = one_parameter(0.5, 0.8);
    const std::vector<double> s{0.3};
    const double sigma = std::pow(0.3, 0.4);
    EXPECT_NEAR(chaos_coefficient(0.2, 0, s, p, 0), normal_density(sigma * sigma, 0.2), 1e-14);
    for (const int n : {1, 2, 5}) {
        EXPECT_NEAR(chaos_coefficient(0.2, n, s, p, 0),
                    normal_density(sigma * sigma, 0.2) / std::pow(sigma, n) * hermite_explicit(n, 0.2 / sigma), 1e-12);
    }
    EXPECT_EQ(chaos_coefficient(0.0, 3, s, p, 0), 0.0);
    const std::vector<double> zero{0.0};
    EXPECT_THROW(chaos_coefficient(0.2, 1, zero, p, 0), DomainError);
    EXPECT_THROW(chaos_coefficient(0.2, 1, s, p, 1), DomainError);
}

TEST(Compositions, CountAndOrder) {
    const auto c = compositions(2, 2);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c[0], (std::vector<int>{2, 0}));
    EXPECT_EQ(c[1], (std::vector<int>{1, 1}));
    EXPECT_EQ(c[2], (std::vector<int>{0, 2}));
    // C(m + d - 1, d - 1) compositions.
    EXPECT_EQ(compositions(5, 3).size(), 21u);
    EXPECT_EQ(compositions(0, 4).size(), 1u);
    for (const auto& v : compositions(6, 3)) {
        EXPECT_EQ(v[0] + v[1] + v[2], 6);
    }
    EXPECT_THROW(compositions(-1, 2), DomainError);
}

TEST(ChaosNorm, ZerothOrderMatchesSquaredMean) {
    const SheetParams p = one_parameter(0.5, 0.8);
    const double x = 0.0;
    const double t = 1.0;
    const TruncatedNorm n = local_time_l2_truncated(std::span<const double>(&x, 1), std::span<const double>(&t, 1), p, 0);
    const double mean = local_time_mean_oracle(0.4, 1.0);
    EXPECT_NEAR(n.order_terms[0], mean * mean, 1e-8);
}

TEST(ChaosNorm, FirstOrderMatchesDirectDoubleIntegral) {
    const double h = 0.5;
    const double k = 0.8;
    const double x = 0.3;
    const double t = 1.0;
    const double hk = h * k;
    // Order-one term: int int p_u(x) p_v(x) (x / s_u^2)(x / s_v^2) R(u, v) du dv, s_u = u^HK.
    const auto integrand = [&](double u, double v) {
        const double su2 = std::pow(u, 2 * hk);
        const double sv2 = std::pow(v, 2 * hk);
        return normal_density(su2, x) * normal_density(sv2, x) * (x / su2) * (x / sv2) * cov(u, v, h, k);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    const auto outer = [&](double u) {
        const auto inner = [&](double v) { return integrand(u, v); };
        return ts.integrate(inner, 0.0, u, 1e-12) + ts.integrate(inner, u, t, 1e-12);
    };
    const double reference = ts.integrate(outer, 0.0, t, 1e-10);

    const SheetParams p = one_parameter(h, k);
    const TruncatedNorm n = local_time_l2_truncated(std::span<const double>(&x, 1), std::span<const double>(&t, 1), p, 1);
    EXPECT_NEAR(n.order_terms[1], reference, 1e-7 * std::max(1.0, std::abs(reference)));
}

TEST(ChaosNorm, OddOrdersVanishAtZeroAndPartialSumsIncrease) {
    const SheetParams p = one_parameter(0.5, 0.8);
    const double x = 0.0;
    const double t = 1.0;
    const TruncatedNorm n = local_time_l2_truncated(std::span<const double>(&x, 1), std::span<const double>(&t, 1), p, 12);
    for (int m = 1; m <= 12; m += 2) {
        EXPECT_NEAR(n.order_terms[static_cast<std::size_t>(m)], 0.0, 1e-12);
    }
    for (std::size_t i = 1; i < n.terms.size(); ++i) {
        EXPECT_GE(n.terms[i].partial_sum, n.terms[i - 1].partial_sum - 1e-15);
    }
    EXPECT_NEAR(n.terms.back().partial_sum, n.value, 1e-14);
    EXPECT_FALSE(n.divergent);
}

TEST(ChaosNorm, TailCorrectedValueNearSecondMoment) {
    const BifBmParams bp(0.5, 0.8);
    const SheetParams p = one_parameter(0.5, 0.8);
    const double x = 0.0;
    const double t = 1.0;
    const TruncatedNorm n = local_time_l2_truncated(std::span<const double>(&x, 1), std::span<const double>(&t, 1), p, 40);
    const double oracle = local_time_second_moment_oracle(bp, 1.0);
    EXPECT_LT(n.value, oracle);
    EXPECT_NEAR((n.value + n.tail_estimate) / oracle, 1.0, 0.02);
}

TEST(ChaosNorm, TwoComponentTableIsSymmetric) {
    const std::vector<double> hs{0.5};
    const std::vector<double> ks{0.4};
    const SheetParams p2 = SheetParams::isotropic(hs, ks, 2);
    const std::vector<double> x{0.0, 0.0};
    const double t = 1.0;
    const TruncatedNorm n = local_time_l2_truncated(x, std::span<const double>(&t, 1), p2, 2);
    ASSERT_EQ(n.terms.size(), 1u + 2u + 3u);
    // Symmetric components give equal (2, 0) and (0, 2) terms.
    EXPECT_NEAR(n.terms[3].value, n.terms[5].value, 1e-12 * std::abs(n.terms[3].value));
    EXPECT_EQ(n.terms[4].composition, (std::vector<int>{1, 1}));
}

TEST(WatanabeNorm, WeightsAndDivergence) {
    const SheetParams p = one_parameter(0.5, 0.5);
    const double x = 0.0;
    const double t = 1.0;
    const auto xs = std::span<const double>(&x, 1);
    const auto ts = std::span<const double>(&t, 1);
    const TruncatedNorm plain = local_time_l2_truncated(xs, ts, p, 16);
    const TruncatedNorm w0 = watanabe_norm_truncated(xs, ts, p, 0.0, 16);
    const TruncatedNorm w1 = watanabe_norm_truncated(xs, ts, p, 1.0, 16);
    EXPECT_DOUBLE_EQ(w0.value, plain.value);
    EXPECT_GT(w1.value, plain.value);
    EXPECT_FALSE(w1.divergent);
    // Envelope exponent 1/(2 HK) - d/2 + 1 = 2.5 for H = K = 1/2.
    EXPECT_DOUBLE_EQ(w1.envelope_exponent, 2.5);
    // Consecutive even terms of the weighted series decrease.
    for (int m = 4; m <= 16; m += 2) {
        EXPECT_LT(w1.order_terms[static_cast<std::size_t>(m)], w1.order_terms[static_cast<std::size_t>(m - 2)]);
    }
    const TruncatedNorm w2 = watanabe_norm_truncated(xs, ts, p, 2.0, 16);
    EXPECT_TRUE(w2.divergent);
    EXPECT_TRUE(std::isinf(w2.tail_estimate));
    EXPECT_THROW(watanabe_norm_truncated(xs, ts, p, -1.0, 4), DomainError);
}

TEST(ChaosNorm, ValidatesArguments) {
    const double x = 0.0;
    const double t = 1.0;
    const auto xs = std::span<const double>(&x, 1);
    const auto ts = std::span<const double>(&t, 1);
    // d = 2 with HK = 0.6 has no local time in L2.
    const std::vector<double> h1{0.75};
    const std::vector<double> k1{0.8};
    const std::vector<double> x2{0.0, 0.0};
    EXPECT_THROW(local_time_l2_truncated(x2, ts, SheetParams::isotropic(h1, k1, 2), 2), DomainError);
    EXPECT_THROW(local_time_l2_truncated(xs, ts, one_parameter(0.5, 0.5), -1), DomainError);
    EXPECT_THROW(local_time_l2_truncated(xs, ts, one_parameter(0.5, 0.5), 2, 1), ResolutionError);
    const double neg = -1.0;
    EXPECT_THROW(local_time_l2_truncated(xs, std::span<const double>(&neg, 1), one_parameter(0.5, 0.5), 2),
                 DomainError);
    const std::vector<double> h3{0.5, 0.5, 0.5};
    const std::vector<double> k3{0.5, 0.5, 0.5};
    const std::vector<double> t3{1.0, 1.0, 1.0};
    EXPECT_THROW(local_time_l2_truncated(xs, t3, SheetParams::isotropic(h3, k3, 1), 2), ResolutionError);
}

TEST(QDecay, PositiveConstantSatisfiesInequality) {
    const std::vector<int> ns{1, 5, 20, 100};
    std::vector<double> z;
    for (int i = 1; i < 50; ++i) {
        z.push_back(0.9 + 0.1 * i / 50.0);
    }
    const double c = q_decay_check(0.5, 0.8, 0.1, ns, z);
    EXPECT_GT(c, 0.0);
    for (const double zi : z) {
        for (const int n : ns) {
            EXPECT_LE(std::pow(q_function(zi, 0.5, 0.8), n), std::exp(-c * n * std::pow(1.0 - zi, 1.0)) * (1 + 1e-12));
        }
    }
    const std::vector<double> outside{0.5};
    EXPECT_THROW(q_decay_check(0.5, 0.8, 0.1, ns, outside), DomainError);
}
