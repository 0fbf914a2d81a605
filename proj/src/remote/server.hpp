// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "blockstore/contract.hpp"
#include "remote/frame.hpp"

namespace partoram::remote {

// Serves the blockstore contract over TCP, one thread per connection.
class Server {
public:
    explicit Server(std::shared_ptr<store::BlockStore> backend);
    ~Server();

    // Throws TransportError if the address cannot be bound.
    void bind(const std::string& addr);
    std::uint16_t port() const { return port_; }

    // Accepts connections until stop() is called.
    void serve();
    // serve() on a background thread.
    void start();
    void stop();

    // Dispatches one request frame; contract errors become error frames.
    Frame handle(const Frame& request);

private:
    void run_connection(int fd);

    std::shared_ptr<store::BlockStore> backend_;
    int listen_fd_ = -1;
    std::uint16_t port_ = 0;
    std::atomic<bool> stopping_{false};
    std::thread acceptor_;
    std::mutex mu_;
    std::vector<int> conn_fds_;
    std::vector<std::thread> conns_;
};

// Blockstore handle backed by a remote server. Each call is one frame
// exchange; a fetch batch is a single FETCH_BLOCKS frame.
class RemoteStore final : public store::BlockStore {
public:
    explicit RemoteStore(const std::string& addr);
    ~RemoteStore() override;

    void setup(const store::StoreSetup& setup) override;
    std::vector<store::CipherBlock> fetch_blocks(
        const std::vector<store::FetchRequest>& requests) override;
    void store_level(const store::LevelUpload& upload) override;
    Bytes fetch_meta(const store::LevelRef& ref) override;
    void mark_unfilled(const store::LevelRef& ref) override;
    store::TransferStats stats() override;

    struct FrameRecord {
        std::uint8_t opcode;
        std::size_t wire_bytes;
    };
    // Requests sent so far (opcode and full encoded size).
    const std::vector<FrameRecord>& sent() const { return sent_; }
    void clear_log() { sent_.clear(); }

private:
    Frame call(std::uint8_t opcode, Bytes body);

    int fd_ = -1;
    std::mutex mu_;
    std::vector<FrameRecord> sent_;
};

std::shared_ptr<store::BlockStore> connect_store(const std::string& addr);

}  // namespace partoram::remote
