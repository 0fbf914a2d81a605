// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blockstore/contract.hpp"

namespace partoram::remote {

using store::Bytes;

// Frame: u32 body length (big-endian), u8 opcode, body. All body integers are
// big-endian and fixed width.
enum Opcode : std::uint8_t {
    kFetchBlocks = 0x01,
    kStoreLevel = 0x02,
    kFetchMeta = 0x03,
    kMarkUnfilled = 0x04,
    kStats = 0x05,
    kSetup = 0x06,
    kReplyBit = 0x80,
    kError = 0xFF,
};

inline constexpr std::uint8_t kProtocolVersion = 1;
inline constexpr std::uint32_t kMaxBody = 1u << 30;
inline constexpr std::size_t kHeaderBytes = 5;
// STORE_LEVEL flags.
inline constexpr std::uint8_t kFlagCompressed = 1;
inline constexpr std::uint8_t kFlagMeta = 2;
// Error codes above the protocol reasons carry a library error code.
inline constexpr std::uint8_t kErrorCodeBase = 0x40;

struct Frame {
    std::uint8_t opcode = 0;
    Bytes body;
};

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void bytes(std::span<const std::uint8_t> b) { buf_.insert(buf_.end(), b.begin(), b.end()); }
    Bytes take() { return std::move(buf_); }

private:
    Bytes buf_;
};

// Throws ProtocolError(Malformed) on short or oversized input.
class Reader {
public:
    explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
    std::uint8_t u8();
    std::uint16_t u16();
    std::uint32_t u32();
    std::uint64_t u64();
    Bytes bytes(std::size_t n);
    std::size_t left() const { return b_.size() - at_; }
    void finish() const;

private:
    void need(std::size_t n) const;
    std::span<const std::uint8_t> b_;
    std::size_t at_ = 0;
};

Bytes encode_frame(const Frame& f);
// Blocking socket helpers; TransportError on I/O failure or EOF.
void send_frame(int fd, const Frame& f);
Frame recv_frame(int fd);

Bytes encode_setup(const store::StoreSetup& s);
store::StoreSetup decode_setup(std::span<const std::uint8_t> body);
Bytes encode_fetch(const std::vector<store::FetchRequest>& reqs);
std::vector<store::FetchRequest> decode_fetch(std::span<const std::uint8_t> body);
Bytes encode_blocks(const std::vector<store::CipherBlock>& blocks);
std::vector<store::CipherBlock> decode_blocks(std::span<const std::uint8_t> body);
Bytes encode_store(const store::LevelUpload& up);
store::LevelUpload decode_store(std::span<const std::uint8_t> body);
Bytes encode_ref(const store::LevelRef& r);
store::LevelRef decode_ref(std::span<const std::uint8_t> body);
Bytes encode_meta(const Bytes& meta);
Bytes decode_meta(std::span<const std::uint8_t> body);
Bytes encode_stats(const store::TransferStats& s);
store::TransferStats decode_stats(std::span<const std::uint8_t> body);

Frame error_frame(std::uint8_t code, const std::string& message);
// Rethrows the library error an error frame describes.
[[noreturn]] void raise_error_frame(const Frame& f);

// "host:port"; host may be a name or numeric address.
struct Endpoint {
    std::string host;
    std::uint16_t port = 0;
};
Endpoint parse_endpoint(const std::string& addr);

}  // namespace partoram::remote
