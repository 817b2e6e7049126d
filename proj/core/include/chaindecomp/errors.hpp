#ifndef CHAINDECOMP_ERRORS_HPP
#define CHAINDECOMP_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chaindecomp {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Model violates a structural requirement (not full-blocked, bad cardinality, ...).
class StructureError : public Error {
public:
    using Error::Error;
};

/// Enumeration exceeded a configured capacity (instance types, interleavings).
class CapacityError : public Error {
public:
    using Error::Error;
};

/// An instance-type valuation does not cover a decision reached during unrolling.
class InstanceMismatchError : public Error {
public:
    using Error::Error;
};

/// A transformation was invoked on a model that misses its prerequisites.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// A communication task survived the platform-specific lowering.
class UnresolvedCommunicationError : public Error {
public:
    using Error::Error;
};

/// A tracked task misses its start/end wrapper or sign task (pipeline-order violation).
class MissingWrapperError : public Error {
public:
    using Error::Error;
};

/// Malformed input document.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Input document references an unknown node, object, or actor.
class ReferenceError : public Error {
public:
    using Error::Error;
};

/// Composed replay reached a state where progress is impossible.
class DeadlockError : public Error {
public:
    using Error::Error;
};

} // namespace chaindecomp

#endif
