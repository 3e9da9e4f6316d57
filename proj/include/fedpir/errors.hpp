#pragma once

#include <stdexcept>
#include <string>

namespace fedpir {

// Invalid or inconsistent configuration (bad parameters, malformed input files).
// The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// An exhaustive audit was asked to enumerate more states than the hard cap.
// The CLI maps this to exit code 3.
class GuardError : public std::runtime_error {
public:
    explicit GuardError(const std::string& what) : std::runtime_error(what) {}
};

// A runtime invariant of the protocol failed (e.g. a reconstruction matrix
// diagonal vanished). Maps to the generic failure exit code 1.
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fedpir
