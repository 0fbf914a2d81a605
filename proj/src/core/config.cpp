// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include "core/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "core/error.hpp"

namespace partoram {

namespace {

std::string trim(const std::string& s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        if (!v.empty() && v[0] == '-') throw std::invalid_argument("negative");
        auto x = std::stoull(v, &pos, 0);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid integer for " + key + ": '" + v + "'");
    }
}

double parse_double(const std::string& key, const std::string& v) {
    try {
        std::size_t pos = 0;
        auto x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("invalid number for " + key + ": '" + v + "'");
    }
}

std::uint32_t parse_u32(const std::string& key, const std::string& v) {
    auto x = parse_u64(key, v);
    if (x > 0xFFFFFFFFull) throw ConfigError(key + " out of range");
    return static_cast<std::uint32_t>(x);
}

// Accepts "1024", "2^10" and "64KB"-style sizes.
std::uint64_t parse_size(const std::string& key, const std::string& v) {
    auto s = lower(v);
    auto caret = s.find('^');
    if (caret != std::string::npos) {
        auto base = parse_u64(key, s.substr(0, caret));
        auto exp = parse_u64(key, s.substr(caret + 1));
        if (exp > 63) throw ConfigError(key + " exponent too large");
        std::uint64_t r = 1;
        for (std::uint64_t i = 0; i < exp; ++i) r *= base;
        return r;
    }
    std::uint64_t mult = 1;
    for (auto [suffix, m] : {std::pair{"kb", 1024ull}, {"mb", 1024ull * 1024}, {"k", 1024ull},
                             {"m", 1024ull * 1024}}) {
        std::string suf = suffix;
        if (s.size() > suf.size() && s.compare(s.size() - suf.size(), suf.size(), suf) == 0) {
            s = s.substr(0, s.size() - suf.size());
            mult = m;
            break;
        }
    }
    return parse_u64(key, s) * mult;
}

}  // namespace

bool parse_bool(const std::string& v) {
    auto s = lower(trim(v));
    if (s == "1" || s == "true" || s == "on" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "off" || s == "no") return false;
    throw ConfigError("invalid boolean: '" + v + "'");
}

std::string to_string(EvictAlgo a) { return a == EvictAlgo::Sequential ? "seq" : "rand"; }
std::string to_string(PayloadMode m) { return m == PayloadMode::Full ? "full" : "metadata"; }
std::string to_string(CipherMode m) { return m == CipherMode::Aead ? "aead" : "test"; }
std::string to_string(CapacityMode m) {
    return m == CapacityMode::Empirical ? "empirical" : "analytic";
}
std::string to_string(PosMapMode m) { return m == PosMapMode::Plain ? "plain" : "counter"; }

void OramConfig::set(const std::string& key_in, const std::string& value_in) {
    auto key = lower(trim(key_in));
    std::replace(key.begin(), key.end(), '-', '_');
    auto value = trim(value_in);
    auto lv = lower(value);
    if (key == "n") {
        n = parse_size(key, value);
    } else if (key == "b" || key == "block_size") {
        block_size = static_cast<std::uint32_t>(parse_size(key, value));
    } else if (key == "p" || key == "partitions") {
        partitions = parse_u32(key, value);
    } else if (key == "nu") {
        nu = parse_double(key, value);
    } else if (key == "evict_algo" || key == "evict") {
        if (lv == "seq" || lv == "sequential") {
            evict_algo = EvictAlgo::Sequential;
        } else if (lv == "rand" || lv == "random") {
            evict_algo = EvictAlgo::Random;
        } else {
            throw ConfigError("evict_algo must be seq or rand");
        }
    } else if (key == "piggyback") {
        piggyback = parse_bool(value);
    } else if (key == "concurrent") {
        concurrent = parse_bool(value);
    } else if (key == "delete_on_read") {
        delete_on_read = parse_bool(value);
    } else if (key == "compression" || key == "compress") {
        compression = parse_bool(value);
    } else if (key == "recursive" || key == "recursion") {
        recursive = parse_bool(value);
    } else if (key == "recursion_threshold") {
        recursion_threshold = parse_size(key, value);
    } else if (key == "alpha") {
        alpha = parse_u32(key, value);
    } else if (key == "seed") {
        seed = parse_u64(key, value);
    } else if (key == "payload_mode") {
        if (lv == "full") {
            payload_mode = PayloadMode::Full;
        } else if (lv == "metadata" || lv == "metadataonly" || lv == "metadata_only") {
            payload_mode = PayloadMode::MetadataOnly;
        } else {
            throw ConfigError("payload_mode must be full or metadata");
        }
    } else if (key == "cipher") {
        if (lv == "aead") {
            cipher = CipherMode::Aead;
        } else if (lv == "test") {
            cipher = CipherMode::Test;
        } else {
            throw ConfigError("cipher must be aead or test");
        }
    } else if (key == "capacity_mode") {
        if (lv == "empirical") {
            capacity_mode = CapacityMode::Empirical;
        } else if (lv == "analytic") {
            capacity_mode = CapacityMode::Analytic;
        } else {
            throw ConfigError("capacity_mode must be empirical or analytic");
        }
    } else if (key == "capacity") {
        capacity = parse_u32(key, value);
    } else if (key == "bound_k" || key == "k") {
        bound_k = parse_double(key, value);
    } else if (key == "bound_c" || key == "c") {
        bound_c = parse_double(key, value);
    } else if (key == "posmap") {
        if (lv == "plain") {
            posmap = PosMapMode::Plain;
        } else if (lv == "counter" || lv == "countercompressed" || lv == "compressed") {
            posmap = PosMapMode::CounterCompressed;
        } else {
            throw ConfigError("posmap must be plain or counter");
        }
    } else if (key == "budget_w" || key == "w") {
        budget_w = parse_double(key, value);
    } else {
        throw ConfigError("unknown config key: " + key_in);
    }
}

void OramConfig::validate() const {
    if (n == 0) throw ConfigError("n must be positive");
    if (n > (std::uint64_t{1} << 40)) throw ConfigError("n too large");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw ConfigError("nu must be a finite value >= 0");
    if (evict_algo == EvictAlgo::Random && std::floor(nu) != nu)
        throw ConfigError("random eviction needs an integer nu");
    if (payload_mode == PayloadMode::Full && block_size < 1)
        throw ConfigError("block_size must be >= 1 in full payload mode");
    if (recursive && posmap == PosMapMode::CounterCompressed)
        throw ConfigError("recursion is not available with the counter position map");
    if (recursive && recursion_threshold == 0) throw ConfigError("recursion_threshold must be > 0");
    if (budget_w <= 0) throw ConfigError("budget_w must be positive");
    if (bound_k <= 0 || bound_c <= 0) throw ConfigError("bound_k and bound_c must be positive");
    if (alpha == 1) throw ConfigError("alpha must be >= 2");
    if (partitions != 0 && partitions > n) throw ConfigError("more partitions than blocks");
}

std::map<std::string, std::string> OramConfig::to_map() const {
    std::map<std::string, std::string> m;
    auto num = [](double v) {
        std::ostringstream o;
        o << v;
        return o.str();
    };
    m["n"] = std::to_string(n);
    m["block_size"] = std::to_string(block_size);
    m["partitions"] = std::to_string(partitions);
    m["nu"] = num(nu);
    m["evict_algo"] = to_string(evict_algo);
    m["piggyback"] = piggyback ? "true" : "false";
    m["concurrent"] = concurrent ? "true" : "false";
    m["delete_on_read"] = delete_on_read ? "true" : "false";
    m["compression"] = compression ? "true" : "false";
    m["recursive"] = recursive ? "true" : "false";
    m["recursion_threshold"] = std::to_string(recursion_threshold);
    m["alpha"] = std::to_string(alpha);
    m["seed"] = std::to_string(seed);
    m["payload_mode"] = to_string(payload_mode);
    m["cipher"] = to_string(cipher);
    m["capacity_mode"] = to_string(capacity_mode);
    m["capacity"] = std::to_string(capacity);
    m["posmap"] = to_string(posmap);
    m["bound_k"] = num(bound_k);
    m["bound_c"] = num(bound_c);
    m["budget_w"] = num(budget_w);
    return m;
}

std::vector<std::pair<std::string, std::string>> parse_kv_text(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        auto k = trim(line.substr(0, eq));
        auto v = trim(line.substr(eq + 1));
        if (k.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        out.emplace_back(k, v);
    }
    return out;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::uint32_t ceil_sqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r < n) ++r;
    while (r > 0 && (r - 1) * (r - 1) >= n) --r;
    return static_cast<std::uint32_t>(r);
}

std::uint32_t ceil_log2(std::uint64_t n) {
    std::uint32_t b = 0;
    while ((std::uint64_t{1} << b) < n) ++b;
    return b;
}

std::uint32_t empirical_capacity(std::uint64_t n) {
    double s = std::sqrt(static_cast<double>(n));
    double q = std::sqrt(s);
    auto a = static_cast<std::uint32_t>(std::ceil(1.15 * s));
    auto b = static_cast<std::uint32_t>(std::ceil(s + 6.0 * q));
    return std::max(a, b);
}

std::uint32_t analytic_capacity(std::uint64_t n, double k, double c) {
    double s = std::sqrt(static_cast<double>(n));
    double ln = n > 1 ? std::log(static_cast<double>(n)) : 0.0;
    return static_cast<std::uint32_t>(std::ceil(s + (k + c) * ln));
}

Geometry Geometry::derive(std::uint64_t n, std::uint32_t partitions, std::uint32_t capacity) {
    Geometry g;
    g.n = n;
    g.partitions = partitions == 0 ? std::max<std::uint32_t>(1, ceil_sqrt(n)) : partitions;
    g.levels = ceil_log2(ceil_sqrt(n)) + 1;
    g.capacity = capacity;
    std::uint32_t top_nominal = 1u << (g.levels - 1);
    if (g.capacity < top_nominal) g.capacity = top_nominal;
    for (std::uint32_t l = 0; l + 1 < g.levels; ++l) g.level_sizes.push_back(2u << l);
    g.level_sizes.push_back(2 * g.capacity);
    return g;
}

Geometry Geometry::derive(const OramConfig& cfg) {
    std::uint32_t cap = cfg.capacity;
    if (cap == 0) {
        cap = cfg.capacity_mode == CapacityMode::Empirical
                  ? empirical_capacity(cfg.n)
                  : analytic_capacity(cfg.n, cfg.bound_k, cfg.bound_c);
    }
    return derive(cfg.n, cfg.partitions, cap);
}

}  // namespace partoram
