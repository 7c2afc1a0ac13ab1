#pragma once

#include <stdexcept>
#include <string>

namespace nsbm {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Shapes or lengths of inputs disagree.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// A value lies outside its admissible domain (probabilities above 1,
/// negative weights, K out of range, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or unusable input data (files, edge lists, configs).
class DataError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure could not produce a meaningful answer: empty
/// clusters, undefined moment estimates, rank collapse.
class NumericalError : public Error {
public:
    using Error::Error;
};

}  // namespace nsbm
