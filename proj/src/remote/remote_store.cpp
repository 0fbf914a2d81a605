// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "core/error.hpp"
#include "remote/server.hpp"

namespace partoram::remote {

RemoteStore::RemoteStore(const std::string& addr) {
    Endpoint ep = parse_endpoint(addr);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    std::string port = std::to_string(ep.port);
    if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw TransportError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
    std::string why = "no usable address";
    for (addrinfo* a = res; a; a = a->ai_next) {
        int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
        if (fd < 0) continue;
        if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        why = std::strerror(errno);
        ::close(fd);
    }
    ::freeaddrinfo(res);
    if (fd_ < 0) throw TransportError("cannot connect to " + addr + ": " + why);
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

RemoteStore::~RemoteStore() {
    if (fd_ >= 0) ::close(fd_);
}

Frame RemoteStore::call(std::uint8_t opcode, Bytes body) {
    std::lock_guard lock(mu_);
    Frame req{opcode, std::move(body)};
    sent_.push_back(FrameRecord{opcode, kHeaderBytes + req.body.size()});
    send_frame(fd_, req);
    Frame rep = recv_frame(fd_);
    if (rep.opcode == kError) raise_error_frame(rep);
    if (rep.opcode != (opcode | kReplyBit))
        throw ProtocolError(ProtocolError::Malformed, "reply opcode does not match the request");
    return rep;
}

void RemoteStore::setup(const store::StoreSetup& s) { call(kSetup, encode_setup(s)); }

std::vector<store::CipherBlock> RemoteStore::fetch_blocks(
    const std::vector<store::FetchRequest>& requests) {
    auto rep = call(kFetchBlocks, encode_fetch(requests));
    auto blocks = decode_blocks(rep.body);
    if (blocks.size() != requests.size())
        throw ProtocolError(ProtocolError::Malformed, "reply block count mismatch");
    return blocks;
}

void RemoteStore::store_level(const store::LevelUpload& up) { call(kStoreLevel, encode_store(up)); }

Bytes RemoteStore::fetch_meta(const store::LevelRef& ref) {
    return decode_meta(call(kFetchMeta, encode_ref(ref)).body);
}

void RemoteStore::mark_unfilled(const store::LevelRef& ref) { call(kMarkUnfilled, encode_ref(ref)); }

store::TransferStats RemoteStore::stats() { return decode_stats(call(kStats, {}).body); }

std::shared_ptr<store::BlockStore> connect_store(const std::string& addr) {
    return std::make_shared<RemoteStore>(addr);
}

}  // namespace partoram::remote
