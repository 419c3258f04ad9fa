#pragma once

#include <stdexcept>
#include <string>

namespace spx {

// Domain/runtime failure: bad input data, missing artifact, degenerate math.
// The CLI maps these to exit code 1.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller misuse of the command-line surface (unknown subcommand, bad flag
// value). The CLI maps these to exit code 2.
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spx
