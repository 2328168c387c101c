#ifndef ZIPSTRATA_H
#define ZIPSTRATA_H

/* Generated by cbindgen; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ZsStatus {
  ZS_STATUS_OK = 0,
  ZS_STATUS_INVALID_ARGUMENT = 1,
  ZS_STATUS_INVALID_CONFIG = 2,
  ZS_STATUS_INFEASIBLE = 3,
  ZS_STATUS_INTERNAL = 4,
  ZS_STATUS_NULL_POINTER = 5,
} ZsStatus;

// Opaque datum handle.
typedef struct ZsDatum ZsDatum;

// Parses a config document and builds a datum handle.
//
// # Safety
// `config_json` must be a NUL-terminated string; `out` must be writable.
enum ZsStatus zs_datum_from_json(const char *config_json, struct ZsDatum **out);

// Releases a handle; null is accepted.
//
// # Safety
// `d` must come from `zs_datum_from_json` and not be used afterwards.
void zs_datum_free(struct ZsDatum *d);

// Runs a subcommand (`describe`, `strata`, `hasse`, `cone`, `purity`, ...)
// and returns the JSON report. `cone` returns `Infeasible` together with
// the report when a cone is empty.
//
// # Safety
// `d` must be a live handle, `subcommand` NUL-terminated, `out_json` writable.
enum ZsStatus zs_run(const struct ZsDatum *d, const char *subcommand, char **out_json);

// Multiplicities n_α for the stratum `label` and the character `chi[0..len]`,
// as a JSON object `{"verdict": bool, "multiplicities": [{"root": [...], "n": "..."}]}`.
//
// # Safety
// `d` must be a live handle, `label` NUL-terminated, `chi` valid for `len`
// reads, `out_json` writable.
enum ZsStatus zs_n_alpha(const struct ZsDatum *d,
                         const char *label,
                         const int64_t *chi,
                         size_t len,
                         char **out_json);

// Releases a string returned by this library; null is accepted.
//
// # Safety
// `s` must come from this library and not be used afterwards.
void zs_string_free(char *s);

// Message for the last failure on this thread; valid until the next call.
const char *zs_last_error(void);

const char *zs_version(void);

#endif  /* ZIPSTRATA_H */
