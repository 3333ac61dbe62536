#pragma once

#include <span>
#include <vector>

namespace bifbm {

/// Least-squares line through (abscissae, ordinates), usually log-scale data.
struct ScalingFit {
    std::vector<double> abscissae;
    std::vector<double> ordinates;
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares. Abscissae must be strictly monotone with at least two points.
/// r_squared is clamped to [0, 1] and set to 1 when the ordinates are constant.
ScalingFit fit_scaling(std::vector<double> abscissae, std::vector<double> ordinates);

/// Mean and standard error of the mean.
struct MeanEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
};

MeanEstimate mean_estimate(std::span<const double> values);

/// Two-sample Kolmogorov-Smirnov test.
struct KsResult {
    double statistic = 0.0;  ///< sup |F_a - F_b|
    double p_value = 1.0;    ///< asymptotic Kolmogorov distribution, small-sample corrected
};

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

/// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

}  // namespace bifbm
