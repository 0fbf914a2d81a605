/* Copyright 2026 The partoram Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef PARTORAM_PARTORAM_H
#define PARTORAM_PARTORAM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define PO_API __attribute__((visibility("default")))
#else
#define PO_API
#endif

/* Status codes. Every call returning po_status leaves a message for
 * po_last_error() on failure. */
typedef enum po_status {
    PO_OK = 0,
    PO_ERR_DOMAIN = 1,
    PO_ERR_CONFIG = 2,
    PO_ERR_PROTOCOL = 3,
    PO_ERR_INTEGRITY = 4,
    PO_ERR_TRANSPORT = 5,
    PO_ERR_CAPACITY = 6,
    PO_ERR_IO = 7,
    PO_ERR_INTERNAL = 8,
    PO_ERR_ARGUMENT = 9
} po_status;

typedef struct po_config po_config;
typedef struct po_oram po_oram;
typedef struct po_server po_server;

/* Message of the last failed call on this thread; never NULL. */
PO_API const char* po_last_error(void);
PO_API const char* po_status_name(po_status s);
PO_API void po_string_free(char* s);

PO_API po_status po_config_new(po_config** out);
PO_API void po_config_free(po_config* cfg);
/* Keys: n, block_size, partitions, nu, evict (seq|rand), piggyback, concurrent,
 * delete_on_read, compression, recursive, recursion_threshold, alpha, seed,
 * payload_mode (full|metadata), cipher (aead|test), capacity_mode
 * (empirical|analytic), capacity, bound_k, bound_c, posmap (plain|counter),
 * budget_w. Sizes accept forms like "2^16" and "64KB". */
PO_API po_status po_config_set(po_config* cfg, const char* key, const char* value);
/* Flat "key = value" lines; '#' starts a comment. */
PO_API po_status po_config_load_file(po_config* cfg, const char* path);
PO_API po_status po_config_validate(const po_config* cfg);
PO_API po_status po_config_to_json(const po_config* cfg, char** out);
/* Non-fatal issues, one per line; empty when there are none. */
PO_API po_status po_config_warnings(const po_config* cfg, char** out);

/* Backends: "mem", "file:<dir>", "remote:<host:port>". */
PO_API po_status po_oram_open(const po_config* cfg, const char* backend, po_oram** out);
PO_API void po_oram_close(po_oram* oram);
PO_API size_t po_oram_block_size(const po_oram* oram);
/* `out_len` and `len` must equal the block size. */
PO_API po_status po_oram_read(po_oram* oram, uint64_t id, uint8_t* out, size_t out_len);
PO_API po_status po_oram_write(po_oram* oram, uint64_t id, const uint8_t* data, size_t len);
PO_API po_status po_oram_stats_json(po_oram* oram, char** out);

/* Simulator. Workloads: roundrobin, uniform, zipf[:s], singlehot[:id];
 * ops = 0 runs 3N operations. Output strings are freed with po_string_free. */
PO_API po_status po_simulate(const po_config* cfg, const char* workload, uint64_t ops,
                             int timing, const char* backend, char** csv_out, char** json_out);
/* axis: eviction-rate | client-storage-k; range: "0.5,1,2" or "a:b:step". */
PO_API po_status po_sweep(const po_config* cfg, const char* workload, uint64_t ops,
                          const char* axis, const char* range, int timing, char** csv_out,
                          int* monotone);
PO_API po_status po_validate_bounds(const po_config* cfg, double k, double c,
                                    const char* workload, uint64_t ops, uint64_t markov_steps,
                                    char** json_out, int* ok);
/* fault_at >= 0 drops one position-map update (harness self-test). */
PO_API po_status po_oracle(const po_config* cfg, const char* workload, uint64_t ops,
                           int64_t fault_at, char** json_out, int* ok);

/* Storage server. backend: "mem" or "file:<dir>". Runs on background threads. */
PO_API po_status po_server_start(const char* bind_addr, const char* backend, po_server** out,
                                 uint16_t* port);
PO_API void po_server_stop(po_server* server);

#ifdef __cplusplus
}
#endif

#endif /* PARTORAM_PARTORAM_H */
