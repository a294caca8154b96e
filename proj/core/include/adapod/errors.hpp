#pragma once

#include <stdexcept>
#include <string>

namespace adapod {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// A well segment or point lies outside the reservoir domain.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// The pressure matrix is singular (e.g. no pressure-controlled well).
class SingularSystem : public Error {
public:
    SingularSystem(const std::string& what, double condition_estimate)
        : Error(what), condition_estimate_(condition_estimate) {}
    double condition_estimate() const noexcept { return condition_estimate_; }

private:
    double condition_estimate_;
};

/// A linear solve finished but missed its residual target.
class SolverFailure : public Error {
public:
    SolverFailure(const std::string& what, double relative_residual)
        : Error(what), relative_residual_(relative_residual) {}
    double relative_residual() const noexcept { return relative_residual_; }

private:
    double relative_residual_;
};

/// Explicit saturation step requested with a time step above the CFL bound.
class StabilityError : public Error {
public:
    using Error::Error;
};

/// Requested number of modes exceeds the numerical rank of the data.
class RankDeficiency : public Error {
public:
    RankDeficiency(const std::string& what, int achievable_rank)
        : Error(what), achievable_rank_(achievable_rank) {}
    int achievable_rank() const noexcept { return achievable_rank_; }

private:
    int achievable_rank_;
};

class AugmentationError : public Error {
public:
    AugmentationError(const std::string& what, int component)
        : Error(what), component_(component) {}
    /// Index (in the augmented basis) of the column that lost rank.
    int component() const noexcept { return component_; }

private:
    int component_;
};

/// The reduced model cannot continue with the given basis.
class BasisInadequate : public Error {
public:
    using Error::Error;
};

class AlignmentError : public Error {
public:
    using Error::Error;
};

class UndefinedMetric : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    ParseError(const std::string& what, int line, std::string field)
        : Error(what), line_(line), field_(std::move(field)) {}
    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

}  // namespace adapod
