// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "remote/frame.hpp"

#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "core/error.hpp"

namespace partoram::remote {

void Writer::u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v >> 8));
    u8(static_cast<std::uint8_t>(v));
}

void Writer::u32(std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) u8(static_cast<std::uint8_t>(v >> s));
}

void Writer::u64(std::uint64_t v) {
    for (int s = 56; s >= 0; s -= 8) u8(static_cast<std::uint8_t>(v >> s));
}

void Reader::need(std::size_t n) const {
    if (left() < n) throw ProtocolError(ProtocolError::Malformed, "truncated frame body");
}

std::uint8_t Reader::u8() {
    need(1);
    return b_[at_++];
}

std::uint16_t Reader::u16() {
    need(2);
    std::uint16_t v = static_cast<std::uint16_t>((b_[at_] << 8) | b_[at_ + 1]);
    at_ += 2;
    return v;
}

std::uint32_t Reader::u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | b_[at_ + i];
    at_ += 4;
    return v;
}

std::uint64_t Reader::u64() {
    need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v = (v << 8) | b_[at_ + i];
    at_ += 8;
    return v;
}

Bytes Reader::bytes(std::size_t n) {
    need(n);
    Bytes out(b_.begin() + static_cast<std::ptrdiff_t>(at_),
              b_.begin() + static_cast<std::ptrdiff_t>(at_ + n));
    at_ += n;
    return out;
}

void Reader::finish() const {
    if (left() != 0) throw ProtocolError(ProtocolError::Malformed, "trailing bytes in frame body");
}

Bytes encode_frame(const Frame& f) {
    if (f.body.size() > kMaxBody) throw ProtocolError(ProtocolError::Malformed, "frame too large");
    Writer w;
    w.u32(static_cast<std::uint32_t>(f.body.size()));
    w.u8(f.opcode);
    w.bytes(f.body);
    return w.take();
}

namespace {

void write_all(int fd, const std::uint8_t* p, std::size_t n) {
    while (n > 0) {
        ssize_t k = ::send(fd, p, n, MSG_NOSIGNAL);
        if (k < 0 && errno == EINTR) continue;
        if (k <= 0) throw TransportError(std::string("send failed: ") + std::strerror(errno));
        p += k;
        n -= static_cast<std::size_t>(k);
    }
}

void read_all(int fd, std::uint8_t* p, std::size_t n) {
    while (n > 0) {
        ssize_t k = ::recv(fd, p, n, 0);
        if (k < 0 && errno == EINTR) continue;
        if (k == 0) throw TransportError("connection closed");
        if (k < 0) throw TransportError(std::string("recv failed: ") + std::strerror(errno));
        p += k;
        n -= static_cast<std::size_t>(k);
    }
}

}  // namespace

void send_frame(int fd, const Frame& f) {
    Bytes b = encode_frame(f);
    write_all(fd, b.data(), b.size());
}

Frame recv_frame(int fd) {
    std::uint8_t hdr[kHeaderBytes];
    read_all(fd, hdr, sizeof hdr);
    std::uint32_t len = (std::uint32_t{hdr[0]} << 24) | (std::uint32_t{hdr[1]} << 16) |
                        (std::uint32_t{hdr[2]} << 8) | hdr[3];
    if (len > kMaxBody) throw TransportError("frame length exceeds limit");
    Frame f;
    f.opcode = hdr[4];
    f.body.resize(len);
    if (len) read_all(fd, f.body.data(), len);
    return f;
}

Bytes encode_setup(const store::StoreSetup& s) {
    Writer w;
    w.u8(kProtocolVersion);
    w.u32(s.partitions);
    w.u8(static_cast<std::uint8_t>(s.level_sizes.size()));
    for (auto v : s.level_sizes) w.u32(v);
    w.u32(s.sealed_bytes);
    w.u32(s.stored_bytes);
    w.u32(s.compressed_elems);
    w.u8(s.delete_on_read ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(s.initial_fill.size()));
    for (auto v : s.initial_fill) w.u64(v);
    return w.take();
}

store::StoreSetup decode_setup(std::span<const std::uint8_t> body) {
    Reader r(body);
    if (r.u8() != kProtocolVersion)
        throw ProtocolError(ProtocolError::VersionMismatch, "unsupported protocol version");
    store::StoreSetup s;
    s.partitions = r.u32();
    std::uint8_t levels = r.u8();
    for (std::uint8_t i = 0; i < levels; ++i) s.level_sizes.push_back(r.u32());
    s.sealed_bytes = r.u32();
    s.stored_bytes = r.u32();
    s.compressed_elems = r.u32();
    s.delete_on_read = r.u8() != 0;
    std::uint32_t fills = r.u32();
    if (fills > r.left() / 8) throw ProtocolError(ProtocolError::Malformed, "bad fill count");
    for (std::uint32_t i = 0; i < fills; ++i) s.initial_fill.push_back(r.u64());
    r.finish();
    return s;
}

namespace {

void put_ref(Writer& w, const store::LevelRef& r) {
    w.u32(r.p);
    w.u8(r.level);
    w.u32(r.epoch);
}

store::LevelRef get_ref(Reader& r) {
    store::LevelRef ref;
    ref.p = r.u32();
    ref.level = r.u8();
    ref.epoch = r.u32();
    return ref;
}

}  // namespace

Bytes encode_fetch(const std::vector<store::FetchRequest>& reqs) {
    Writer w;
    w.u32(static_cast<std::uint32_t>(reqs.size()));
    for (const auto& q : reqs) {
        put_ref(w, q.ref);
        w.u32(q.offset);
    }
    return w.take();
}

std::vector<store::FetchRequest> decode_fetch(std::span<const std::uint8_t> body) {
    Reader r(body);
    std::uint32_t n = r.u32();
    if (n > r.left() / 13) throw ProtocolError(ProtocolError::Malformed, "bad request count");
    std::vector<store::FetchRequest> out(n);
    for (auto& q : out) {
        q.ref = get_ref(r);
        q.offset = r.u32();
    }
    r.finish();
    return out;
}

namespace {

// count u32, item size u32, then count equal-size items.
void put_items(Writer& w, const std::vector<Bytes>& items) {
    std::uint32_t size = items.empty() ? 0 : static_cast<std::uint32_t>(items.front().size());
    for (const auto& it : items)
        if (it.size() != size)
            throw ProtocolError(ProtocolError::Malformed, "items in one frame differ in size");
    w.u32(static_cast<std::uint32_t>(items.size()));
    w.u32(size);
    for (const auto& it : items) w.bytes(it);
}

std::vector<Bytes> get_items(Reader& r) {
    std::uint32_t n = r.u32();
    std::uint32_t size = r.u32();
    if (size > 0 && n > r.left() / size)
        throw ProtocolError(ProtocolError::Malformed, "bad item count");
    if (size == 0 && n > kMaxBody) throw ProtocolError(ProtocolError::Malformed, "bad item count");
    std::vector<Bytes> out;
    out.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) out.push_back(r.bytes(size));
    return out;
}

}  // namespace

Bytes encode_blocks(const std::vector<store::CipherBlock>& blocks) {
    Writer w;
    put_items(w, blocks);
    return w.take();
}

std::vector<store::CipherBlock> decode_blocks(std::span<const std::uint8_t> body) {
    Reader r(body);
    auto out = get_items(r);
    r.finish();
    return out;
}

Bytes encode_store(const store::LevelUpload& up) {
    Writer w;
    put_ref(w, up.ref);
    w.u32(up.level_size);
    w.u32(up.first);
    w.u32(up.total);
    std::uint8_t flags = (up.compressed ? kFlagCompressed : 0) | (up.meta ? kFlagMeta : 0);
    w.u8(flags);
    put_items(w, up.items);
    if (up.meta) {
        w.u32(static_cast<std::uint32_t>(up.meta->size()));
        w.bytes(*up.meta);
    }
    return w.take();
}

store::LevelUpload decode_store(std::span<const std::uint8_t> body) {
    Reader r(body);
    store::LevelUpload up;
    up.ref = get_ref(r);
    up.level_size = r.u32();
    up.first = r.u32();
    up.total = r.u32();
    std::uint8_t flags = r.u8();
    if (flags & ~(kFlagCompressed | kFlagMeta))
        throw ProtocolError(ProtocolError::Malformed, "unknown store flags");
    up.compressed = flags & kFlagCompressed;
    up.items = get_items(r);
    if (flags & kFlagMeta) {
        std::uint32_t n = r.u32();
        up.meta = r.bytes(n);
    }
    r.finish();
    return up;
}

Bytes encode_ref(const store::LevelRef& ref) {
    Writer w;
    put_ref(w, ref);
    return w.take();
}

store::LevelRef decode_ref(std::span<const std::uint8_t> body) {
    Reader r(body);
    auto ref = get_ref(r);
    r.finish();
    return ref;
}

Bytes encode_meta(const Bytes& meta) {
    Writer w;
    w.u32(static_cast<std::uint32_t>(meta.size()));
    w.bytes(meta);
    return w.take();
}

Bytes decode_meta(std::span<const std::uint8_t> body) {
    Reader r(body);
    std::uint32_t n = r.u32();
    Bytes out = r.bytes(n);
    r.finish();
    return out;
}

Bytes encode_stats(const store::TransferStats& s) {
    Writer w;
    for (auto v : {s.blocks_up, s.blocks_down, s.bytes_up, s.bytes_down, s.meta_bytes,
                   s.peak_server_blocks, s.resident_blocks, s.fetch_batches})
        w.u64(v);
    return w.take();
}

store::TransferStats decode_stats(std::span<const std::uint8_t> body) {
    Reader r(body);
    store::TransferStats s;
    for (auto* v : {&s.blocks_up, &s.blocks_down, &s.bytes_up, &s.bytes_down, &s.meta_bytes,
                    &s.peak_server_blocks, &s.resident_blocks, &s.fetch_batches})
        *v = r.u64();
    r.finish();
    return s;
}

Frame error_frame(std::uint8_t code, const std::string& message) {
    Writer w;
    w.u8(code);
    std::string m = message.substr(0, 0xFFFF);
    w.u16(static_cast<std::uint16_t>(m.size()));
    w.bytes(std::span(reinterpret_cast<const std::uint8_t*>(m.data()), m.size()));
    return Frame{kError, w.take()};
}

void raise_error_frame(const Frame& f) {
    Reader r(f.body);
    std::uint8_t code = r.u8();
    std::uint16_t n = r.u16();
    Bytes m = r.bytes(n);
    std::string msg(m.begin(), m.end());
    if (code >= ProtocolError::Malformed && code <= ProtocolError::Internal)
        throw ProtocolError(static_cast<ProtocolError::Reason>(code), "server: " + msg);
    switch (static_cast<ErrorCode>(code - kErrorCodeBase)) {
        case ErrorCode::Integrity: throw IntegrityViolation("server: " + msg);
        case ErrorCode::Io: throw IoError("server: " + msg);
        case ErrorCode::Capacity: throw CapacityViolation("server: " + msg);
        case ErrorCode::Domain: throw DomainError("server: " + msg);
        case ErrorCode::Config: throw ConfigError("server: " + msg);
        default: throw ProtocolError(ProtocolError::Internal, "server: " + msg);
    }
}

Endpoint parse_endpoint(const std::string& addr) {
    auto colon = addr.rfind(':');
    if (colon == std::string::npos || colon + 1 == addr.size())
        throw ConfigError("address must be host:port");
    Endpoint e;
    e.host = addr.substr(0, colon);
    if (e.host.size() >= 2 && e.host.front() == '[' && e.host.back() == ']')
        e.host = e.host.substr(1, e.host.size() - 2);
    if (e.host.empty()) e.host = "0.0.0.0";
    unsigned long port = 0;
    try {
        std::size_t used = 0;
        port = std::stoul(addr.substr(colon + 1), &used);
        if (used != addr.size() - colon - 1) throw std::invalid_argument("port");
    } catch (const std::exception&) {
        throw ConfigError("bad port in address " + addr);
    }
    if (port > 65535) throw ConfigError("port out of range");
    e.port = static_cast<std::uint16_t>(port);
    return e;
}

}  // namespace partoram::remote
