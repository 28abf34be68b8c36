#pragma once

#include <stdexcept>
#include <string>

namespace rapid {

struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Bad parameter values, inconsistent rates, unknown keys.
struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

// Malformed or non-causal sensor streams: NaN/Inf fields, length
// mismatches, non-monotonic timestamps, out-of-band sample spacing.
struct StreamError : Error {
    explicit StreamError(const std::string& what) : Error(what) {}
};

// Wire-format violations: bad magic, version mismatch, truncation.
struct ProtocolError : Error {
    explicit ProtocolError(const std::string& what) : Error(what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(what) {}
};

}  // namespace rapid
