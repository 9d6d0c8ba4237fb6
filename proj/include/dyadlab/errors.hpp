#pragma once

#include <stdexcept>
#include <string>

namespace dyadlab {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An exact operation would have to materialize a mantissa above the
/// configured exponent-span budget.
class GuardExceeded : public Error {
public:
    using Error::Error;
};

/// A quotient or interpolated value is not a dyadic rational. Raised where
/// a construction asserts integrality, so it usually signals a broken claim.
class NotExact : public Error {
public:
    using Error::Error;
};

class IndexOutOfRange : public Error {
public:
    using Error::Error;
};

/// A sample point violates the precondition of a check.
class OutOfInterval : public Error {
public:
    using Error::Error;
};

/// An inequality that the construction guarantees failed at runtime.
class Violation : public Error {
public:
    using Error::Error;
};

/// Brute-force work would exceed the configured enumeration budget.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class NoPredecessor : public Error {
public:
    using Error::Error;
};

/// A Λ prefix does not reach far enough for the requested query.
class PrefixTooShort : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

} // namespace dyadlab
