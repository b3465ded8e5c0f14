#pragma once

#include <stdexcept>
#include <string>

namespace sweptnet {

// Thrown when a file cannot be opened, read or written.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when file contents do not match the expected layout (bad magic,
// inconsistent header fields, trailing garbage, unparseable text).
struct FormatError : std::runtime_error {
    explicit FormatError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a file ends before the byte count announced by its header.
struct TruncationError : std::runtime_error {
    explicit TruncationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown when a binary file declares a format version this build cannot read.
struct VersionError : std::runtime_error {
    explicit VersionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sweptnet
