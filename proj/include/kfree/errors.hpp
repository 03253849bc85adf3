// errors.hpp
// Exception types raised by the kfree library. Every failure mode named in
// the module contracts maps to one of these.

#pragma once

#include <stdexcept>
#include <string>

namespace kfree {

// Argument outside the representable or table range (n > limit, hi > 2^63-1).
class RangeError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Request exceeds the configured memory/range budget.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Two tables that must share a range do not.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Dirichlet inverse requested for a table with a(1) not a unit.
class NonInvertibleError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// No supported real non-principal character for the requested modulus.
class ConstructionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Object fails its own invariants (bad plan, bad split, bad parameters).
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Oracle asked for an argument beyond what it tabulated.
class MissingArgumentError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Regression is undefined (too few points, all-zero series).
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Config file does not match the expected schema. `line` is 1-based, 0 if unknown.
class SchemaError : public std::runtime_error {
public:
    SchemaError(const std::string& msg, int line)
        : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg)
        , line_(line)
    {}
    int line() const noexcept { return line_; }

private:
    int line_;
};

// Two independent computation paths disagreed. Always a bug.
class CorrectnessError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace kfree
