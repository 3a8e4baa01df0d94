#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace normforge {

enum class ErrorKind {
    Io,
    Syntax,
    Schema,            // unknown element / attribute / key, missing field
    DuplicateId,
    DanglingReference,
    UnsafeRule,
    DanglingOverride,
    InvalidDate,
    Cycle,
    Stratification,
    Validation,
    UnknownLiteral,
    NotProvable,
    UnknownTarget,
    PostValidation,
    UnknownVersion,
    UnknownNorm,
    Precondition,
    ReadOnly,
};

std::string_view to_string(ErrorKind kind) noexcept;

// Every failure raised by the library. `token` names the offending identifier,
// literal, or file when there is one.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string message, std::string token = {})
        : std::runtime_error(std::move(message)), kind_(kind), token_(std::move(token)) {}

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& token() const noexcept { return token_; }

private:
    ErrorKind kind_;
    std::string token_;
};

} // namespace normforge
