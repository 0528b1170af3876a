#pragma once

#include <stdexcept>
#include <string>

namespace domectl {

/// Fatal configuration problem: malformed config file, invalid membership
/// breakpoints, unresolved rule references. Maps to CLI exit code 3.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fatal data problem: missing required CSV column, empty input, unreadable
/// file. Row-level problems are reported as fault lists instead and never
/// throw. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace domectl
