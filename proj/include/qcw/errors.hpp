#pragma once

#include <stdexcept>
#include <string>

namespace qcw {

// Bad command-line usage or malformed input files.  CLI exit code 1.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

// A mathematical check that is expected to hold failed (inconsistent seed
// data, non-invertible element, certified identity violated, ...).
// CLI exit code 2.
class VerificationError : public std::runtime_error {
public:
    explicit VerificationError(const std::string& what) : std::runtime_error(what) {}
};

// A certificate search exhausted its budget without reaching a verdict.
// CLI exit code 3.
class InconclusiveError : public std::runtime_error {
public:
    explicit InconclusiveError(const std::string& what) : std::runtime_error(what) {}
};

// Internal precondition violation (wrong ring, nonlinear unknown product,
// access to an uncertified coefficient without permission, ...).
class AlgebraError : public std::logic_error {
public:
    explicit AlgebraError(const std::string& what) : std::logic_error(what) {}
};

} // namespace qcw
