// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "framework/client.hpp"

#include <algorithm>

#include "core/error.hpp"

namespace partoram::framework {

CacheSlots::CacheSlots(std::uint32_t slots) : slots_(slots) {}

void CacheSlots::push(std::uint32_t s, Block b) {
    slots_.at(s).push_back(std::move(b));
    ++total_;
    peak_ = std::max(peak_, total_);
}

std::optional<Payload> CacheSlots::take(std::uint32_t s, BlockId id) {
    auto& q = slots_.at(s);
    auto it = std::find_if(q.begin(), q.end(), [id](const Block& b) { return b.id == id; });
    if (it == q.end()) return std::nullopt;
    Payload out = std::move(it->payload);
    q.erase(it);
    --total_;
    return out;
}

std::optional<Block> CacheSlots::pop(std::uint32_t s) {
    auto& q = slots_.at(s);
    if (q.empty()) return std::nullopt;
    Block b = std::move(q.front());
    q.pop_front();
    --total_;
    return b;
}

bool CacheSlots::contains(std::uint32_t s, BlockId id) const {
    const auto& q = slots_.at(s);
    return std::any_of(q.begin(), q.end(), [id](const Block& b) { return b.id == id; });
}

crypto::Key128 derive_key(std::uint64_t seed, std::uint64_t stream) {
    Rng rng = derive_rng(seed, stream);
    crypto::Key128 k{};
    for (std::size_t i = 0; i < k.size(); i += 8) {
        std::uint64_t v = rng();
        for (std::size_t b = 0; b < 8; ++b) k[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    return k;
}

OramClient::OramClient(const OramConfig& cfg, std::shared_ptr<store::BlockStore> store,
                       ClientOptions opts)
    : cfg_(cfg),
      geo_((cfg.validate(), Geometry::derive(cfg))),
      store_(std::move(store)),
      cache_(geo_.partitions),
      evictor_(cfg.evict_algo, cfg.nu, geo_.partitions, derive_rng(cfg.seed, streams::kEviction)),
      slot_rng_(derive_rng(cfg.seed, streams::kSlots)) {
    if (!store_) throw ConfigError("client needs a block store");
    payload_bytes_ = cfg_.payload_mode == PayloadMode::Full
                         ? (opts.stored_payload ? opts.stored_payload : cfg_.block_size)
                         : 0;
    dir_ = opts.directory ? std::move(opts.directory)
                          : std::make_unique<LocalDirectory>(cfg_.posmap, cfg_.n, geo_.partitions,
                                                             derive_key(cfg_.seed, streams::kPrfKeys));
    if (auto* local = dynamic_cast<LocalDirectory*>(dir_.get()))
        local->map().set_level_sizes(geo_.level_sizes);
    partition::EngineParams ep;
    ep.geo = geo_;
    ep.payload_mode = cfg_.payload_mode;
    ep.payload_bytes = payload_bytes_;
    ep.accounted_payload = cfg_.block_size;
    ep.cipher = cfg_.cipher;
    ep.compression = cfg_.compression;
    ep.delete_on_read = cfg_.delete_on_read;
    ep.fetch_metadata = !cfg_.concurrent;
    ep.eager_exhaustion_check = !cfg_.piggyback;
    ep.seed = cfg_.seed;
    engine_ = std::make_unique<partition::Engine>(ep, *store_, *dir_);
    Rng setup_rng = derive_rng(cfg_.seed, streams::kSetup);
    engine_->setup(setup_rng);
    if (cfg_.concurrent)
        amort_ = std::make_unique<amortizer::Amortizer>(*engine_, cfg_.budget_w, !cfg_.piggyback,
                                                        opts.record_steps,
                                                        derive_rng(cfg_.seed, streams::kShuffle));
}

OramClient::~OramClient() = default;

Payload OramClient::read_partition(std::uint32_t p, const Position& old, BlockId id) {
    if (trace_) trace_->push_back(TraceEvent{TraceEvent::Kind::Read, p});
    if (amort_) return amort_->read(p, old, id);
    if (old.kind == PositionKind::Server) {
        partition::ReadTarget t{id, old.level, old.index};
        return engine_->read(p, &t);
    }
    if (old.kind == PositionKind::Pending) throw InternalError("pending block outside concurrent mode");
    return engine_->read(p, nullptr);
}

void OramClient::write_partition(std::uint32_t p, partition::Entry e) {
    if (trace_) trace_->push_back(TraceEvent{TraceEvent::Kind::Write, p});
    if (amort_)
        amort_->write(p, std::move(e));
    else
        engine_->write(p, std::move(e));
}

void OramClient::evict(std::uint32_t p) {
    auto b = cache_.pop(p);
    if (b)
        write_partition(p, partition::Entry{b->id, std::move(b->payload)});
    else
        write_partition(p, partition::Entry{kDummy, {}});
}

Payload OramClient::run(Op op, BlockId id, const Payload* data,
                        const std::function<void(Payload&)>* fn) {
    if (id >= cfg_.n) throw DomainError("block id out of range");
    if (op == Op::Write && payload_bytes_ > 0 && (!data || data->size() != payload_bytes_))
        throw DomainError("write payload must be exactly the block size");
    const std::uint32_t r = dir_->choose_slot(id, slot_rng_);
    const Position old = dir_->exchange(id, r);
    const std::uint32_t p = old.part;
    Payload payload;
    switch (old.kind) {
        case PositionKind::CacheSlot: {
            auto held = cache_.take(p, id);
            if (!held) throw InternalError("position map names a cache slot without the block");
            payload = std::move(*held);
            read_partition(p, old, kDummy);
            break;
        }
        case PositionKind::Zeroed:
            payload.assign(payload_bytes_, 0);
            read_partition(p, old, kDummy);
            break;
        case PositionKind::Server:
        case PositionKind::Pending:
            payload = read_partition(p, old, id);
            break;
    }
    if (payload_bytes_ > 0) payload.resize(payload_bytes_, 0);
    Payload result = payload;
    if (op == Op::Write) payload = payload_bytes_ > 0 ? *data : Payload{};
    if (fn) (*fn)(payload);
    cache_.push(r, Block{id, std::move(payload)});
    note_client_blocks();
    if (cfg_.piggyback) evict(p);
    evict_targets_.clear();
    evictor_.next(evict_targets_);
    for (auto t : evict_targets_) evict(t);
    ++ops_;
    note_client_blocks();
    return result;
}

void OramClient::note_client_blocks() {
    std::uint64_t held = cache_.total() + (amort_ ? amort_->pending_blocks() : 0);
    client_peak_ = std::max(client_peak_, held);
}

Payload OramClient::access(Op op, BlockId id, const Payload* data) {
    return run(op, id, data, nullptr);
}

Payload OramClient::update(BlockId id, const std::function<void(Payload&)>& fn) {
    return run(Op::Read, id, nullptr, &fn);
}

void OramClient::drain() {
    if (amort_) amort_->drain();
}

ClientStats OramClient::stats() {
    ClientStats s;
    s.ops = ops_;
    s.cache_blocks = cache_.total();
    s.cache_peak = cache_.peak();
    s.pending_blocks = amort_ ? amort_->pending_blocks() : 0;
    s.client_blocks_peak = client_peak_;
    s.posmap_bytes = dir_->resident_bytes();
    s.posmap_model_bytes = dir_->model_bytes();
    s.engine = engine_->counters();
    if (amort_) s.amortizer = amort_->stats();
    s.transfer = store_->stats();
    if (amort_) s.transfer.per_step_work = amort_->stats().per_step_work;
    return s;
}

}  // namespace partoram::framework
