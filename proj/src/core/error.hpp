// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace partoram {

enum class ErrorCode : int {
    Ok = 0,
    Domain = 1,
    Config = 2,
    Protocol = 3,
    Integrity = 4,
    Transport = 5,
    Capacity = 6,
    Io = 7,
    Internal = 8,
};

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

class DomainError : public Error {
public:
    explicit DomainError(const std::string& w) : Error(ErrorCode::Domain, w) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& w) : Error(ErrorCode::Config, w) {}
};

// Wire and contract errors carry the code sent in an error frame.
class ProtocolError : public Error {
public:
    enum Reason : std::uint8_t {
        Malformed = 1,
        UnfilledLevel = 2,
        BadOffset = 3,
        EpochMismatch = 4,
        VersionMismatch = 5,
        NotSetUp = 6,
        FilledLevel = 7,
        Internal = 8,
    };
    ProtocolError(Reason r, const std::string& w) : Error(ErrorCode::Protocol, w), reason_(r) {}
    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

class IntegrityViolation : public Error {
public:
    explicit IntegrityViolation(const std::string& w) : Error(ErrorCode::Integrity, w) {}
};

class TransportError : public Error {
public:
    explicit TransportError(const std::string& w) : Error(ErrorCode::Transport, w) {}
};

class CapacityViolation : public Error {
public:
    explicit CapacityViolation(const std::string& w) : Error(ErrorCode::Capacity, w) {}
};

class IoError : public Error {
public:
    explicit IoError(const std::string& w) : Error(ErrorCode::Io, w) {}
};

class InternalError : public Error {
public:
    explicit InternalError(const std::string& w) : Error(ErrorCode::Internal, w) {}
};

#define PARTORAM_CHECK(cond, msg)                                                   \
    do {                                                                            \
        if (!(cond)) throw ::partoram::InternalError(std::string("check failed: ") + \
                                                     (msg));                        \
    } while (0)

}  // namespace partoram
