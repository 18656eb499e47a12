#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace econloop {

/// Base class for every error raised by the pipeline. `kind()` is a stable
/// machine-readable tag that ends up in halt events and API error bodies.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& message)
        : std::runtime_error(message), kind_(std::move(kind)) {}

    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

class PersistenceError : public Error {
public:
    PersistenceError(std::string path, const std::string& message)
        : Error("PersistenceError", message + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

class LoadError : public Error {
public:
    LoadError(std::string path, const std::string& message)
        : Error("LoadError", message + ": " + path), path_(std::move(path)) {}
    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// A RunState invariant does not hold. `invariant()` names it.
class IntegrityError : public Error {
public:
    IntegrityError(std::string invariant, const std::string& detail)
        : Error("IntegrityError", "invariant violated (" + invariant + "): " + detail),
          invariant_(std::move(invariant)) {}
    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

class GateStateError : public Error {
public:
    explicit GateStateError(const std::string& message) : Error("GateStateError", message) {}
};

class UnknownCandidateError : public Error {
public:
    explicit UnknownCandidateError(const std::string& id)
        : Error("UnknownCandidateError", "no candidate '" + id + "' in the current round") {}
};

}  // namespace econloop
