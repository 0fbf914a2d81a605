// Copyright 2026 The partoram Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "partoram/partoram.h"

namespace {

struct Cfg {
    Cfg() { REQUIRE(po_config_new(&c) == PO_OK); }
    ~Cfg() { po_config_free(c); }
    po_config* c = nullptr;
};

std::string take(char* s) {
    std::string out = s ? s : "";
    po_string_free(s);
    return out;
}

std::filesystem::path temp_dir(const char* name) {
    auto d = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(d);
    std::filesystem::create_directories(d);
    return d;
}

}  // namespace

TEST_CASE("config keys and errors") {
    Cfg cfg;
    CHECK(po_config_set(cfg.c, "n", "2^12") == PO_OK);
    CHECK(po_config_set(cfg.c, "block_size", "1KB") == PO_OK);
    CHECK(po_config_set(cfg.c, "evict", "rand") == PO_OK);
    CHECK(po_config_set(cfg.c, "nu", "2") == PO_OK);
    CHECK(po_config_validate(cfg.c) == PO_OK);
    char* js = nullptr;
    REQUIRE(po_config_to_json(cfg.c, &js) == PO_OK);
    auto j = nlohmann::json::parse(take(js));
    CHECK(j["n"] == "4096");
    CHECK(j["block_size"] == "1024");

    CHECK(po_config_set(cfg.c, "colour", "blue") == PO_ERR_CONFIG);
    CHECK(std::string(po_last_error()).find("colour") != std::string::npos);
    CHECK(po_config_set(cfg.c, "n", "lots") == PO_ERR_CONFIG);
    CHECK(po_config_set(nullptr, "n", "4") == PO_ERR_ARGUMENT);
    CHECK(po_config_set(cfg.c, "n", "0") == PO_OK);
    CHECK(po_config_validate(cfg.c) == PO_ERR_CONFIG);
    CHECK(std::string(po_status_name(PO_ERR_INTEGRITY)) == "integrity violation");
}

TEST_CASE("config files") {
    auto dir = temp_dir("partoram_capi_cfg");
    auto path = (dir / "run.conf").string();
    std::ofstream(path) << "# small run\nn = 512\nblock_size = 64\nconcurrent = true\n";
    Cfg cfg;
    REQUIRE(po_config_load_file(cfg.c, path.c_str()) == PO_OK);
    char* js = nullptr;
    REQUIRE(po_config_to_json(cfg.c, &js) == PO_OK);
    auto j = nlohmann::json::parse(take(js));
    CHECK(j["n"] == "512");
    CHECK(j["concurrent"] == "true");
    CHECK(po_config_load_file(cfg.c, (dir / "missing.conf").string().c_str()) != PO_OK);
}

TEST_CASE("oram handle reads its writes on every backend") {
    auto dir = temp_dir("partoram_capi_file");
    po_server* server = nullptr;
    std::uint16_t port = 0;
    REQUIRE(po_server_start("127.0.0.1:0", "mem", &server, &port) == PO_OK);
    REQUIRE(port != 0);
    const std::vector<std::string> backends = {"mem", "file:" + dir.string(),
                                               "remote:127.0.0.1:" + std::to_string(port)};
    for (const auto& backend : backends) {
        CAPTURE(backend);
        Cfg cfg;
        po_config_set(cfg.c, "n", "256");
        po_config_set(cfg.c, "block_size", "48");
        po_oram* o = nullptr;
        REQUIRE(po_oram_open(cfg.c, backend.c_str(), &o) == PO_OK);
        REQUIRE(po_oram_block_size(o) == 48);
        std::vector<std::uint8_t> buf(48), got(48);
        for (std::uint64_t id = 0; id < 256; ++id) {
            std::fill(buf.begin(), buf.end(), static_cast<std::uint8_t>(id));
            REQUIRE(po_oram_write(o, id, buf.data(), buf.size()) == PO_OK);
        }
        for (std::uint64_t id = 0; id < 256; id += 5) {
            REQUIRE(po_oram_read(o, id, got.data(), got.size()) == PO_OK);
            CHECK(got == std::vector<std::uint8_t>(48, static_cast<std::uint8_t>(id)));
        }
        CHECK(po_oram_read(o, 256, got.data(), got.size()) == PO_ERR_DOMAIN);
        CHECK(po_oram_read(o, 1, got.data(), 47) == PO_ERR_ARGUMENT);
        char* js = nullptr;
        REQUIRE(po_oram_stats_json(o, &js) == PO_OK);
        auto j = nlohmann::json::parse(take(js));
        CHECK(j["ops"] == 256 + 52);
        po_oram_close(o);
    }
    po_server_stop(server);
    Cfg cfg;
    po_oram* o = nullptr;
    CHECK(po_oram_open(cfg.c, "tape", &o) == PO_ERR_CONFIG);
    CHECK(o == nullptr);
}

TEST_CASE("simulate, sweep, oracle and bounds through the C interface") {
    Cfg cfg;
    po_config_set(cfg.c, "n", "1024");
    po_config_set(cfg.c, "payload_mode", "metadata");
    char *csv = nullptr, *js = nullptr;
    REQUIRE(po_simulate(cfg.c, "uniform", 0, 0, "mem", &csv, &js) == PO_OK);
    auto row = take(csv);
    auto j = nlohmann::json::parse(take(js));
    CHECK(j["ops"] == 3072);
    CHECK(j["overhead"].get<double>() > 0);
    CHECK(row.rfind("n,block_size,", 0) == 0);

    int mono = 0;
    REQUIRE(po_sweep(cfg.c, "roundrobin", 0, "eviction-rate", "1,2", 0, &csv, &mono) == PO_OK);
    CHECK(take(csv).find('\n') != std::string::npos);
    CHECK(po_sweep(cfg.c, "roundrobin", 0, "colour", "1", 0, &csv, &mono) == PO_ERR_CONFIG);

    int ok = 0;
    Cfg small;
    po_config_set(small.c, "n", "128");
    po_config_set(small.c, "block_size", "32");
    REQUIRE(po_oracle(small.c, "uniform", 2000, -1, &js, &ok) == PO_OK);
    CHECK(ok == 1);
    CHECK(nlohmann::json::parse(take(js))["ok"] == true);
    REQUIRE(po_oracle(small.c, "singlehot:3", 2000, 10, &js, &ok) == PO_OK);
    CHECK(ok == 0);
    take(js);

    po_config_set(cfg.c, "evict", "rand");
    po_config_set(cfg.c, "nu", "2");
    REQUIRE(po_validate_bounds(cfg.c, 1, 2, "roundrobin", 0, 100000, &js, &ok) == PO_OK);
    auto b = nlohmann::json::parse(take(js));
    CHECK(b.contains("markov"));
    CHECK(po_validate_bounds(cfg.c, 0, 2, "roundrobin", 0, 10, &js, &ok) == PO_ERR_CONFIG);
}
