// Copyright 2026 The PQLedger Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
///////////////////////////////////////////////////////////////////////////////

#ifndef PQLEDGER_ERRORS_HPP
#define PQLEDGER_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pqledger {

// Structured error names. These are part of the CLI contract: a failing
// subcommand prints the name of the error it exits with.
enum class Errc {
    DuplicateScheme,
    UnknownScheme,
    KeyMismatch,
    SchemeMismatch,
    MalformedEncoding,
    InvalidTransfer,
    BadClientSignature,
    InsufficientFunds,
    PayloadTooLarge,
    BadEndorsement,
    EmptyBatch,
    BadOrdererSignature,
    ChainBreak,
    PreconditionViolated,
    RollbackForbidden,
    ConfigInvalid,
    ShapeMismatch,
    IoFailure,
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::DuplicateScheme: return "DuplicateScheme";
        case Errc::UnknownScheme: return "UnknownScheme";
        case Errc::KeyMismatch: return "KeyMismatch";
        case Errc::SchemeMismatch: return "SchemeMismatch";
        case Errc::MalformedEncoding: return "MalformedEncoding";
        case Errc::InvalidTransfer: return "InvalidTransfer";
        case Errc::BadClientSignature: return "BadClientSignature";
        case Errc::InsufficientFunds: return "InsufficientFunds";
        case Errc::PayloadTooLarge: return "PayloadTooLarge";
        case Errc::BadEndorsement: return "BadEndorsement";
        case Errc::EmptyBatch: return "EmptyBatch";
        case Errc::BadOrdererSignature: return "BadOrdererSignature";
        case Errc::ChainBreak: return "ChainBreak";
        case Errc::PreconditionViolated: return "PreconditionViolated";
        case Errc::RollbackForbidden: return "RollbackForbidden";
        case Errc::ConfigInvalid: return "ConfigInvalid";
        case Errc::ShapeMismatch: return "ShapeMismatch";
        case Errc::IoFailure: return "IoFailure";
    }
    return "UnknownError";
}

class Error : public std::runtime_error {
public:
    static constexpr std::size_t kNoOffset = static_cast<std::size_t>(-1);

    Error(Errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what),
          code_(code) {}

    // MalformedEncoding carries the byte offset of the first violation.
    Error(Errc code, const std::string& what, std::size_t offset)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what +
                             " (offset " + std::to_string(offset) + ")"),
          code_(code),
          offset_(offset) {}

    Errc code() const { return code_; }
    const char* name() const { return errc_name(code_); }
    std::size_t offset() const { return offset_; }

private:
    Errc code_;
    std::size_t offset_ = kNoOffset;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) {
    throw Error(code, what);
}

[[noreturn]] inline void fail_malformed(std::size_t offset, const std::string& what) {
    throw Error(Errc::MalformedEncoding, what, offset);
}

} // namespace pqledger

#endif // PQLEDGER_ERRORS_HPP
