#pragma once

#include <stdexcept>
#include <string>

namespace discretediag
{

/// Input data violates a precondition (bad chain, bad file, bad parameters).
class DataError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// The pooled marginal is concentrated on one category, so the DAR(1)
/// estimator has a zero denominator.
class InsufficientVariationError : public DataError
{
public:
    using DataError::DataError;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace discretediag
