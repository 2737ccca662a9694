#pragma once

#include <stdexcept>
#include <string>

namespace lstgrid {

/// Malformed or unsupported input data (files, metadata, wire frames).
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid command-line or pipeline configuration.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A distributed task could not be completed.
class TaskError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Peer spoke an incompatible or corrupt protocol.
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lstgrid
