#pragma once

#include <stdexcept>
#include <string>

namespace cbar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A dimension or ReLU-count guard was exceeded; see caps().
class CapExceeded : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

class EmptyPolytope : public Error {
public:
    using Error::Error;
};

class UnboundedPolytope : public Error {
public:
    using Error::Error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace cbar
