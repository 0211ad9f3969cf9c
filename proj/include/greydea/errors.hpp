#pragma once

#include <stdexcept>
#include <string>

namespace greydea {

// Bad caller input: dimension mismatches, non-finite entries, unknown keys,
// malformed files. Maps to exit code 2 in the CLI.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure inside a model fit (singular system, degenerate regression).
// Maps to exit code 3 in the CLI.
class FitError : public std::runtime_error {
public:
    explicit FitError(const std::string& what) : std::runtime_error(what) {}
};

// Internal solver failure. A well-formed efficiency program is always feasible,
// so this signals a bug or data that validation should have rejected.
class SolverError : public std::runtime_error {
public:
    explicit SolverError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace greydea
