// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "remote/server.hpp"

#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "core/error.hpp"

namespace partoram::remote {

Server::Server(std::shared_ptr<store::BlockStore> backend) : backend_(std::move(backend)) {
    if (!backend_) throw ConfigError("server needs a backend");
}

Server::~Server() { stop(); }

void Server::bind(const std::string& addr) {
    Endpoint ep = parse_endpoint(addr);
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = AI_PASSIVE;
    addrinfo* res = nullptr;
    std::string port = std::to_string(ep.port);
    if (int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0)
        throw TransportError("cannot resolve " + ep.host + ": " + ::gai_strerror(rc));
    int fd = -1;
    std::string why = "no usable address";
    for (addrinfo* a = res; a; a = a->ai_next) {
        fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
        if (fd < 0) continue;
        int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 64) == 0) break;
        why = std::strerror(errno);
        ::close(fd);
        fd = -1;
    }
    ::freeaddrinfo(res);
    if (fd < 0) throw TransportError("cannot bind " + addr + ": " + why);
    sockaddr_storage ss{};
    socklen_t len = sizeof ss;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&ss), &len);
    port_ = ss.ss_family == AF_INET6 ? ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port)
                                     : ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
    listen_fd_ = fd;
}

void Server::serve() {
    if (listen_fd_ < 0) throw TransportError("server is not bound");
    while (!stopping_) {
        int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            if (stopping_) break;
            throw TransportError(std::string("accept failed: ") + std::strerror(errno));
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(mu_);
        if (stopping_) {
            ::close(fd);
            break;
        }
        conn_fds_.push_back(fd);
        conns_.emplace_back([this, fd] { run_connection(fd); });
    }
}

void Server::start() {
    acceptor_ = std::thread([this] {
        try {
            serve();
        } catch (const TransportError&) {
        }
    });
}

void Server::stop() {
    if (stopping_.exchange(true)) return;
    if (listen_fd_ >= 0) {
        ::shutdown(listen_fd_, SHUT_RDWR);
        ::close(listen_fd_);
    }
    if (acceptor_.joinable()) acceptor_.join();
    std::vector<std::thread> conns;
    {
        std::lock_guard lock(mu_);
        for (int fd : conn_fds_) ::shutdown(fd, SHUT_RDWR);
        conns.swap(conns_);
    }
    for (auto& t : conns) t.join();
    std::lock_guard lock(mu_);
    for (int fd : conn_fds_) ::close(fd);
    conn_fds_.clear();
}

void Server::run_connection(int fd) {
    try {
        while (true) {
            Frame req = recv_frame(fd);
            send_frame(fd, handle(req));
        }
    } catch (const TransportError&) {
    }
}

Frame Server::handle(const Frame& req) {
    try {
        Frame out;
        out.opcode = static_cast<std::uint8_t>(req.opcode | kReplyBit);
        switch (req.opcode) {
            case kSetup: backend_->setup(decode_setup(req.body)); break;
            case kFetchBlocks:
                out.body = encode_blocks(backend_->fetch_blocks(decode_fetch(req.body)));
                break;
            case kStoreLevel: backend_->store_level(decode_store(req.body)); break;
            case kFetchMeta: out.body = encode_meta(backend_->fetch_meta(decode_ref(req.body))); break;
            case kMarkUnfilled: backend_->mark_unfilled(decode_ref(req.body)); break;
            case kStats:
                if (!req.body.empty())
                    throw ProtocolError(ProtocolError::Malformed, "stats request has a body");
                out.body = encode_stats(backend_->stats());
                break;
            default: throw ProtocolError(ProtocolError::Malformed, "unknown opcode");
        }
        return out;
    } catch (const ProtocolError& e) {
        return error_frame(e.reason(), e.what());
    } catch (const Error& e) {
        return error_frame(static_cast<std::uint8_t>(kErrorCodeBase + static_cast<int>(e.code())),
                           e.what());
    } catch (const std::exception& e) {
        return error_frame(ProtocolError::Internal, e.what());
    }
}

}  // namespace partoram::remote
