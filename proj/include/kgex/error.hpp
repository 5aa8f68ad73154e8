#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace kgex {

// Base for all toolkit errors so the CLI can map them to categorized exits.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& what) : Error("io error: " + what) {}
};

// Malformed input record; carries the 1-based line number when known.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::uint64_t line)
        : Error("parse error: " + what + " (line " + std::to_string(line) + ")"), line_(line) {}
    explicit ParseError(const std::string& what) : Error("parse error: " + what), line_(0) {}

    std::uint64_t line() const { return line_; }

private:
    std::uint64_t line_;
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error("config error: " + what) {}
};

class TrainingError : public Error {
public:
    explicit TrainingError(const std::string& what) : Error("training error: " + what) {}
};

// Model endpoint could not be reached or answered with a transport-level failure.
class TransportError : public Error {
public:
    explicit TransportError(const std::string& what) : Error("transport error: " + what) {}
};

// A pipeline subject lacks the context (description/image) its mode requires.
class MissingContextError : public Error {
public:
    explicit MissingContextError(const std::string& what) : Error("missing context: " + what) {}
};

}  // namespace kgex
