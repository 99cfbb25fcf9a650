#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace rtsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Errors that carry a FIRRTL source line (0 when unknown).
class SourceError : public Error {
public:
    SourceError(int line, const std::string& message)
        : Error(message), line_(line), message_(message) {}

    int line() const noexcept { return line_; }
    const std::string& message() const noexcept { return message_; }

private:
    int line_;
    std::string message_;
};

class SyntaxError : public SourceError {
public:
    using SourceError::SourceError;
};

class UnsupportedConstruct : public SourceError {
public:
    UnsupportedConstruct(int line, std::string construct)
        : SourceError(line, "unsupported construct: " + construct), construct_(std::move(construct)) {}

    const std::string& construct() const noexcept { return construct_; }

private:
    std::string construct_;
};

class ElaborationError : public SourceError {
public:
    using SourceError::SourceError;
};

class TypeError : public ElaborationError {
public:
    using ElaborationError::ElaborationError;
};

class MultipleDrivers : public ElaborationError {
public:
    MultipleDrivers(int line, const std::string& signal)
        : ElaborationError(line, "multiple drivers for '" + signal + "'"), signal_(signal) {}
    const std::string& signal() const noexcept { return signal_; }

private:
    std::string signal_;
};

class UndrivenSignal : public ElaborationError {
public:
    UndrivenSignal(int line, const std::string& signal)
        : ElaborationError(line, "signal '" + signal + "' is never driven"), signal_(signal) {}
    const std::string& signal() const noexcept { return signal_; }

private:
    std::string signal_;
};

class ClockDomainError : public ElaborationError {
public:
    using ElaborationError::ElaborationError;
};

class CombinationalLoop : public Error {
public:
    CombinationalLoop(std::vector<std::string> cycle, const std::string& message)
        : Error(message), cycle_(std::move(cycle)) {}
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    SchemaError(std::string field, const std::string& reason)
        : Error("schema error in '" + field + "': " + reason), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class VersionError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

class FormatMismatch : public Error {
public:
    using Error::Error;
};

class ArityMismatch : public Error {
public:
    using Error::Error;
};

class UnknownPort : public Error {
public:
    explicit UnknownPort(const std::string& port) : Error("unknown port '" + port + "'") {}
};

class NotPokeable : public Error {
public:
    explicit NotPokeable(const std::string& port)
        : Error("'" + port + "' is not an input port and cannot be poked") {}
};

class ValueOutOfRange : public Error {
public:
    using Error::Error;
};

}  // namespace rtsim
