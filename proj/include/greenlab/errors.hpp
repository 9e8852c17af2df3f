#pragma once

#include <stdexcept>

namespace greenlab {

// Base of everything this library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user input: files, parameter domains, target semantics.
class InputError : public Error {
public:
    using Error::Error;
};

// A value outside its documented domain (alpha < 1, nonpositive density, ...).
class ParameterError : public InputError {
public:
    using InputError::InputError;
};

// Malformed text; messages carry line numbers where applicable.
class ParseError : public InputError {
public:
    using InputError::InputError;
};

// Structurally well-formed input that violates a semantic rule.
class ValidationError : public InputError {
public:
    using InputError::InputError;
};

// The dynamic system reached a state it cannot advance from.
class SimulationError : public Error {
public:
    using Error::Error;
};

// Development steps must be applied one growth cycle at a time.
class SequencingError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

// Biomass was produced but no sink can receive it.
class AllocationDeadlockError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

// The inverse problem could not produce a usable result.
class CalibrationError : public Error {
public:
    using Error::Error;
};

}  // namespace greenlab
