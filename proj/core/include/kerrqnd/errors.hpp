#pragma once

#include <stdexcept>
#include <string>

namespace kerrqnd {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid physical or numerical input. The CLI maps this to exit code 2.
class ParameterError : public Error {
public:
    using Error::Error;
};

/// A computation failed or left its validity domain. The CLI maps this to exit code 3.
class NumericError : public Error {
public:
    using Error::Error;
};

/// |K| <= sqrt(3) gamma3: the detector is monostable for every drive.
class NoBistabilityError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// The operating point has lambda0*lambda1 < 0, so no steady state exists.
class UnstableBranchError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Integrator step too large for the relaxation rates involved.
class StepSizeError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Oracle called outside the regime it can validate.
class ValidityDomainError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

/// Fock-space population leaked into the truncation edge.
class TruncationError : public NumericError {
public:
    using NumericError::NumericError;
};

/// Stochastic ensemble did not settle during burn-in.
class TimeoutError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace kerrqnd
