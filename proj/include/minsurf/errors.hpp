#pragma once

#include <stdexcept>
#include <string>

namespace minsurf {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parameter point or segment outside a chart's domain.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient Jacobian or near-singular pullback metric.
class DegeneracyError : public Error {
public:
    using Error::Error;
};

/// Radius outside the window where a discrete quantity is meaningful.
class RangeError : public Error {
public:
    using Error::Error;
};

class ArgumentError : public Error {
public:
    using Error::Error;
};

/// Vertex budget exceeded.
class ResourceError : public Error {
public:
    using Error::Error;
};

/// Malformed mesh file or config file.
class FormatError : public Error {
public:
    using Error::Error;
};

} // namespace minsurf
