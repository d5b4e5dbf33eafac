#pragma once

#include <stdexcept>
#include <string>

namespace ncr {

// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A quantity is mathematically undefined for the given data, e.g. rho/phi
// estimates when one channel carries zero power.
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The structured covariance is singular (rho = 1 or a zero amplitude) where
// an inverse or log-determinant is required.
class SingularCovarianceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// The GLR statistic is unbounded because rho_hat == 1.
class InfiniteStatisticError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Result does not fit in a double.  Callers should switch to the log-domain
// or exponentially scaled variant.
class OverflowError : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

// A power series did not reach its stopping criterion within the term cap.
class SeriesDivergedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class QuadratureError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class RootFindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed IQ input file.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// File could not be opened, written or renamed.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace ncr
