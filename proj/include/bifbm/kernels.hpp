#pragma once

#include <span>

#include "bifbm/params.hpp"

namespace bifbm {

/// Covariance R(s,t) = 2^-K [ (t^2H + s^2H)^K - |t-s|^(2HK) ] of one component.
double cov_bifbm(double s, double t, const BifBmParams& p);

/// Product covariance of component i of an (N,d) sheet at s, t in R_+^N.
double cov_sheet(std::span<const double> s, std::span<const double> t, int i, const SheetParams& p);

/// E[(B(t) - B(s))^2], evaluated in a form that keeps the |t-s|^(2HK) term exact.
double increment_variance(double s, double t, const BifBmParams& p);

/// Covariance r(tau) of the stationary Lamperti process Y(tau) = e^{-HK tau} B(e^tau).
///
/// Even in tau with r(0) = 1. Large |tau| uses a log1p/expm1 form so the
/// exponentially small values keep full relative precision.
double lamperti_cov(double tau, const BifBmParams& p);

/// Q(z) = R(1,z) / z^HK on [0,1], with Q(0) = 0 and Q(1) = 1.
double q_function(double z, double h, double k);

}  // namespace bifbm
