#pragma once

#include <stdexcept>
#include <string>

namespace volterra {

/// Shapes or spaces of two operands do not agree.
class StructuralError : public std::logic_error {
public:
    explicit StructuralError(const std::string& what) : std::logic_error(what) {}
};

/// A numeric argument lies outside the domain of the operation.
class InvalidParameter : public std::invalid_argument {
public:
    explicit InvalidParameter(const std::string& what) : std::invalid_argument(what) {}
};

/// A precondition of an algorithm does not hold for the given input.
class PreconditionError : public std::runtime_error {
public:
    explicit PreconditionError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace volterra
