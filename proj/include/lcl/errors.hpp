#pragma once

#include <stdexcept>
#include <string>

namespace lcl {

// Bad user-supplied configuration (missing vocab file, empty corpus partition, ...).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated call contract (out-of-range slice, mismatched dims, ...).
class ArgumentError : public std::invalid_argument {
public:
    explicit ArgumentError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Input data cannot satisfy the request (not enough filler tokens, ...).
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// HTTP-level failure after retries; carries the last status code (0 = no response).
class TransportError : public std::runtime_error {
public:
    TransportError(const std::string& msg, int status)
        : std::runtime_error(msg), status_(status) {}
    int status() const { return status_; }

private:
    int status_;
};

// Response arrived but did not match the expected JSON shape.
class ProtocolError : public std::runtime_error {
public:
    explicit ProtocolError(const std::string& msg) : std::runtime_error(msg) {}
};

// Prompt does not fit the window and the policy forbids truncation.
class WindowOverflowError : public std::runtime_error {
public:
    WindowOverflowError(const std::string& msg, std::size_t have, std::size_t window)
        : std::runtime_error(msg), have_(have), window_(window) {}
    std::size_t have_tokens() const { return have_; }
    std::size_t window_tokens() const { return window_; }

private:
    std::size_t have_;
    std::size_t window_;
};

}  // namespace lcl
