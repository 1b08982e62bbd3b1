#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ewave {

// Root of every error the library raises. Callers that only care about
// "something in the model was wrong" can catch this one type.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
public:
    using Error::Error;
};

// channel
class NearFieldError : public Error {
public:
    using Error::Error;
};
class EmptyInput : public Error {
public:
    using Error::Error;
};
class EmptyCurve : public Error {
public:
    using Error::Error;
};

// waveform
class PayloadTooLarge : public Error {
public:
    using Error::Error;
};
class EmptyPayload : public Error {
public:
    using Error::Error;
};
class BitRateTooHigh : public Error {
public:
    using Error::Error;
};
class UndersampledError : public Error {
public:
    using Error::Error;
};
class InvertedLevels : public Error {
public:
    using Error::Error;
};
class TraceFormatError : public Error {
public:
    using Error::Error;
};

// monitor
class EmptyTrace : public Error {
public:
    using Error::Error;
};
class NoSync : public Error {
public:
    using Error::Error;
};

// protocol
class TableExhausted : public Error {
public:
    using Error::Error;
};
class CapacityError : public Error {
public:
    using Error::Error;
};

// config
class ParseError : public Error {
public:
    ParseError(int line, std::string field, const std::string& what)
        : Error("line " + std::to_string(line) + (field.empty() ? "" : " [" + field + "]") + ": " + what),
          line_(line),
          field_(std::move(field))
    {
    }

    int line() const noexcept { return line_; }
    const std::string& field() const noexcept { return field_; }

private:
    int line_;
    std::string field_;
};

class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> violations)
        : Error(join(violations)), violations_(std::move(violations))
    {
    }

    const std::vector<std::string>& violations() const noexcept { return violations_; }

private:
    static std::string join(const std::vector<std::string>& v)
    {
        std::string out = "invalid configuration:";
        for (const auto& s : v) {
            out += "\n  - ";
            out += s;
        }
        return out;
    }

    std::vector<std::string> violations_;
};

} // namespace ewave
