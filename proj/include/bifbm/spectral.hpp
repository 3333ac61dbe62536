#pragma once

#include <span>
#include <vector>

#include "bifbm/params.hpp"

namespace bifbm {

/// Default absolute accuracy target for the oscillatory quadratures below.
inline constexpr double kSpectralTol = 1e-10;

/// Truncation point T = max(20, -log(tol)/rate) for integrals of the Lamperti covariance,
/// with rate the smaller of beta_decay() and lamperti_decay().
double spectral_truncation(const BifBmParams& p, double tol);

/// Spectral density f(lambda) = (1/pi) int_0^inf r(t) cos(t lambda) dt of the Lamperti process.
///
/// Integrated one half-period of the cosine at a time with adaptive Gauss-Kronrod,
/// truncated at spectral_truncation(p, tol). Throws QuadratureError when the
/// accumulated error estimate exceeds tol.
double spectral_density(double lambda, const BifBmParams& p, double tol = kSpectralTol);

/// Spectral mass outside (-u, u): r(0) - (2/pi) int_0^inf r(t) sin(ut)/t dt.
double spectral_tail_mass(double u, const BifBmParams& p, double tol = kSpectralTol);

/// Truncated second moment int_{|lambda|<u} lambda^2 f(lambda) d lambda.
double spectral_second_moment(double u, const BifBmParams& p, double tol = kSpectralTol);

/// Tabulated spectral density with log-log interpolation.
struct SpectralTable {
    std::vector<double> lambdas;  ///< increasing, positive
    std::vector<double> values;   ///< f(lambdas[i]) > 0
    double beta_decay = 0.0;      ///< min{H(2-K), HK}
    double tail_exponent = 0.0;   ///< -(1 + 2HK), used beyond the last node

    /// Interpolated f(|lambda|): constant below the first node, power law above the last.
    double operator()(double lambda) const;
};

/// Evaluate f on n log-spaced frequencies in [lambda_lo, lambda_hi].
SpectralTable make_spectral_table(const BifBmParams& p, double lambda_lo, double lambda_hi, std::size_t n,
                                  double tol = kSpectralTol);

}  // namespace bifbm
