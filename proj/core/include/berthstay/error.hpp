#pragma once

#include <stdexcept>
#include <string>

namespace berthstay {

// Base of every error the library raises. Data and model problems derive
// from here so callers can separate them from programming errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Invalid configuration: unknown cargo group in a prewash policy, alias map
// pointing at a non-existent target, malformed profile.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Argument outside an operation's domain (empty sample, negative size, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Structural input problem that aborts a whole parse (missing CSV header).
class FormatError : public Error {
public:
    using Error::Error;
};

class InsufficientData : public Error {
public:
    using Error::Error;
};

class SingularDesign : public Error {
public:
    using Error::Error;
};

// Mixture has (almost) no probability mass inside its truncation bounds.
class DegenerateTruncation : public Error {
public:
    using Error::Error;
};

class ModelUnavailable : public Error {
public:
    using Error::Error;
};

// Scenario cannot be evaluated for this job/terminal (e.g. no sampling events).
class NotApplicable : public Error {
public:
    using Error::Error;
};

class DiscardBudgetExceeded : public Error {
public:
    DiscardBudgetExceeded(std::string what, double fraction)
        : Error(std::move(what)), fraction_(fraction) {}

    double fraction() const noexcept { return fraction_; }

private:
    double fraction_;
};

}  // namespace berthstay
