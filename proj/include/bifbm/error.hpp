#pragma once

#include <stdexcept>
#include <string>

namespace bifbm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameters or arguments outside the admissible domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Gram matrix could not be factorized even at the maximum jitter.
class NotPositiveDefiniteError : public Error {
public:
    using Error::Error;
};

/// Conditioning block numerically singular beyond the jitter policy.
class SingularConditionerError : public Error {
public:
    using Error::Error;
};

/// Adaptive quadrature could not reach the requested tolerance.
class QuadratureError : public Error {
public:
    using Error::Error;
};

/// Circulant embedding produced a negative eigenvalue.
class EmbeddingError : public Error {
public:
    EmbeddingError(const std::string& what, double min_eigenvalue)
        : Error(what), min_eigenvalue_(min_eigenvalue) {}
    double min_eigenvalue() const noexcept { return min_eigenvalue_; }

private:
    double min_eigenvalue_;
};

/// Spectral truncation leaves more tail mass than requested.
class TailMassError : public Error {
public:
    using Error::Error;
};

/// Product grid exceeds the configured point cap.
class SizeCapError : public Error {
public:
    using Error::Error;
};

/// An estimator found nothing to work with (empty interval, empty level set, ...).
class EmptySetError : public Error {
public:
    using Error::Error;
};

/// Grid too coarse for the requested smoothing/shift scale.
class ResolutionError : public Error {
public:
    using Error::Error;
};

}  // namespace bifbm
