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
//
// Canonical TLV wire format used by every on-the-wire structure in this
// library: 1-byte tag, 4-byte big-endian length, value. Lengths are fixed
// width, so a value has exactly one encoding and byte-identical round trips
// fall out of the representation. Tag assignments live with the structures
// that own them (hybrid.hpp, identity.hpp, ledger.hpp) and are listed in
// docs/FORMATS.md.

#ifndef PQLEDGER_TLV_HPP
#define PQLEDGER_TLV_HPP

#include <cstdint>
#include <string>

#include "pqledger/bytes.hpp"
#include "pqledger/errors.hpp"

namespace pqledger::tlv {

inline constexpr std::size_t kHeaderSize = 5;

struct Record {
    std::uint8_t tag = 0;
    ByteView value;
    std::size_t offset = 0; // record start within the buffer being parsed
};

class Writer {
public:
    void record(std::uint8_t tag, ByteView value) {
        buf_.push_back(tag);
        put_u32be(buf_, static_cast<std::uint32_t>(value.size()));
        append(buf_, value);
    }

    void record(std::uint8_t tag, std::string_view value) { record(tag, view(value)); }

    void record_u64(std::uint8_t tag, std::uint64_t v) { record(tag, u64be(v)); }

    // Splices already-encoded records in verbatim.
    void raw(ByteView encoded) { append(buf_, encoded); }

    // Opens a nested record whose value is everything written until the
    // matching end(); the length field is patched on close.
    std::size_t begin(std::uint8_t tag) {
        buf_.push_back(tag);
        std::size_t at = buf_.size();
        put_u32be(buf_, 0);
        return at;
    }

    void end(std::size_t at) {
        std::uint32_t len = static_cast<std::uint32_t>(buf_.size() - at - 4);
        buf_[at] = static_cast<std::uint8_t>(len >> 24);
        buf_[at + 1] = static_cast<std::uint8_t>(len >> 16);
        buf_[at + 2] = static_cast<std::uint8_t>(len >> 8);
        buf_[at + 3] = static_cast<std::uint8_t>(len);
    }

    std::size_t size() const { return buf_.size(); }
    Bytes take() { return std::move(buf_); }
    const Bytes& bytes() const { return buf_; }

private:
    Bytes buf_;
};

class Reader {
public:
    explicit Reader(ByteView buf, std::size_t base_offset = 0)
        : buf_(buf), base_(base_offset) {}

    bool done() const { return pos_ >= buf_.size(); }
    std::size_t offset() const { return base_ + pos_; }

    std::uint8_t peek_tag() const {
        if (done()) fail_malformed(offset(), "record expected, input exhausted");
        return buf_[pos_];
    }

    Record next() {
        std::size_t at = pos_;
        if (buf_.size() - pos_ < kHeaderSize)
            fail_malformed(base_ + at, "truncated record header");
        std::uint8_t tag = buf_[pos_];
        std::uint32_t len = get_u32be(buf_.subspan(pos_ + 1, 4));
        pos_ += kHeaderSize;
        if (buf_.size() - pos_ < len)
            fail_malformed(base_ + at, "record length exceeds input");
        Record r{tag, buf_.subspan(pos_, len), base_ + at};
        pos_ += len;
        return r;
    }

    Record expect(std::uint8_t tag, const char* what) {
        std::size_t at = offset();
        Record r = next();
        if (r.tag != tag)
            fail_malformed(at, std::string("expected ") + what);
        return r;
    }

    // Sub-reader over a nested record's value, offsets preserved.
    static Reader over(const Record& r) {
        return Reader(r.value, r.offset + kHeaderSize);
    }

    void require_done(const char* what) const {
        if (!done())
            fail_malformed(offset(), std::string("trailing bytes after ") + what);
    }

private:
    ByteView buf_;
    std::size_t base_ = 0;
    std::size_t pos_ = 0;
};

// Fixed-size value accessors; anything off spec is a malformed encoding.

inline std::uint64_t value_u64(const Record& r, const char* what) {
    if (r.value.size() != 8)
        fail_malformed(r.offset, std::string(what) + " must be 8 bytes");
    return get_u64be(r.value);
}

inline std::string value_string(const Record& r) { return string_of(r.value); }

} // namespace pqledger::tlv

#endif // PQLEDGER_TLV_HPP
