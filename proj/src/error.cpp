#include "normforge/error.hpp"

namespace normforge {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Io: return "io";
    case ErrorKind::Syntax: return "syntax";
    case ErrorKind::Schema: return "schema";
    case ErrorKind::DuplicateId: return "duplicate-id";
    case ErrorKind::DanglingReference: return "dangling-reference";
    case ErrorKind::UnsafeRule: return "unsafe-rule";
    case ErrorKind::DanglingOverride: return "dangling-override";
    case ErrorKind::InvalidDate: return "invalid-date";
    case ErrorKind::Cycle: return "cycle";
    case ErrorKind::Stratification: return "stratification";
    case ErrorKind::Validation: return "validation";
    case ErrorKind::UnknownLiteral: return "unknown-literal";
    case ErrorKind::NotProvable: return "not-provable";
    case ErrorKind::UnknownTarget: return "unknown-target";
    case ErrorKind::PostValidation: return "post-validation";
    case ErrorKind::UnknownVersion: return "unknown-version";
    case ErrorKind::UnknownNorm: return "unknown-norm";
    case ErrorKind::Precondition: return "precondition";
    case ErrorKind::ReadOnly: return "read-only";
    }
    return "unknown";
}

} // namespace normforge
