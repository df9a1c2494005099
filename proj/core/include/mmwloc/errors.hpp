#pragma once

#include <stdexcept>
#include <string>

namespace mmwloc {

/// Base class for every error raised by the library. `kind()` is a stable
/// machine-readable tag used in CLI error records.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class DegenerateGeometry : public Error {
public:
    explicit DegenerateGeometry(const std::string& what) : Error("DegenerateGeometry", what) {}
};

class UndefinedAngle : public Error {
public:
    explicit UndefinedAngle(const std::string& what) : Error("UndefinedAngle", what) {}
};

class SingularCovariance : public Error {
public:
    explicit SingularCovariance(const std::string& what) : Error("SingularCovariance", what) {}
};

class SingularFisher : public Error {
public:
    explicit SingularFisher(const std::string& what) : Error("SingularFisher", what) {}
};

class InsufficientPaths : public Error {
public:
    explicit InsufficientPaths(const std::string& what) : Error("InsufficientPaths", what) {}
};

class AllTrialsFailed : public Error {
public:
    explicit AllTrialsFailed(const std::string& what) : Error("AllTrialsFailed", what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("ConfigError", what) {}
};

class ExperimentError : public Error {
public:
    explicit ExperimentError(const std::string& what) : Error("ExperimentError", what) {}
};

}  // namespace mmwloc
