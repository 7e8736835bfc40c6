#pragma once

#include <stdexcept>
#include <string>

namespace subsurf {

// Malformed file contents (bad header, length mismatch, unparsable rows).
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

// Inputs that parse but violate a documented precondition.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Iterative solve exceeded its iteration cap; carries the last residual.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, double last_residual, int iterations)
        : std::runtime_error(what), last_residual(last_residual), iterations(iterations) {}

    double last_residual;
    int iterations;
};

// Non-finite value produced where the scheme guarantees finiteness.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace subsurf
