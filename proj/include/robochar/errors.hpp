#pragma once

#include <stdexcept>
#include <string>

namespace robochar {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (empty description, bad record, ...).
class PreconditionError : public Error {
public:
    using Error::Error;
};

// A document or LLM payload does not match its schema. `what()` names the
// violated key or bound.
class ParseError : public Error {
public:
    using Error::Error;
};

// A config, script or space document failed validation. `field()` is the
// dotted path of the offending field.
class ValidationError : public ParseError {
public:
    ValidationError(std::string field, const std::string& message)
        : ParseError(field + ": " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

enum class BackendFailure { Timeout, Transport, RateLimited, Http, Exhausted };

// Completion backend failed. Retryable kinds are retried inside the backend;
// once the budget is spent the caller sees kind Exhausted.
class BackendError : public Error {
public:
    BackendError(BackendFailure kind, const std::string& message)
        : Error(message), kind_(kind) {}

    BackendFailure kind() const noexcept { return kind_; }
    bool retryable() const noexcept {
        return kind_ == BackendFailure::Timeout || kind_ == BackendFailure::Transport ||
               kind_ == BackendFailure::RateLimited;
    }

private:
    BackendFailure kind_;
};

class OrderViolation : public Error {
public:
    using Error::Error;
};

class UnknownSpace : public Error {
public:
    using Error::Error;
};

}  // namespace robochar
