// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace uavprop {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file or value (JSON syntax, schema, field validation).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Geometry that violates scene invariants (degenerate faces, bad references).
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Dataset records whose references do not resolve.
class IntegrityError : public Error {
public:
    using Error::Error;
};

} // namespace uavprop
