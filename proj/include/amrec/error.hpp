#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace amrec {

// Bad input data or arguments. Maps to CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A line of an input file could not be tokenized.
class ParseError : public ValidationError {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : ValidationError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Solver breakdown: non-finite objective, singular system. Maps to CLI exit code 2.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Structures built from different inputs were mixed together.
class ConsistencyError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// A task (or method) has no latent vector because it never appeared in training.
class ColdStartError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

}  // namespace amrec
