#pragma once

#include <stdexcept>
#include <string>

namespace mrpoisson {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structural problems with a forest (level overflow, grading violations).
class GridError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

class SolverError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

} // namespace mrpoisson
