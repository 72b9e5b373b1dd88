#ifndef SOCSIM_H
#define SOCSIM_H

/* C interface to the stochastic porous-media simulator. All entry points are
 * thread-compatible: distinct handles may be used from distinct threads, a
 * single handle must not be shared without external synchronization.
 *
 * Functions that can fail return a socsim_status and, when errbuf is
 * non-NULL, write a NUL-terminated description (truncated to errbuf_len)
 * into it. Strings returned as char* are heap-allocated and must be released
 * with socsim_string_free.
 */

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum socsim_status {
  SOCSIM_OK = 0,
  SOCSIM_ERR_CONFIG = 1,    /* configuration failed to parse or validate */
  SOCSIM_ERR_NUMERICAL = 2, /* a solve diverged or a state left the finite range */
  SOCSIM_ERR_IO = 3,        /* file or directory could not be read/written */
  SOCSIM_ERR_INVALID = 4    /* invalid argument at the API boundary */
} socsim_status;

/* Opaque run configuration. */
typedef struct socsim_config socsim_config;

/* Library version, e.g. "0.1.0". Static storage; do not free. */
const char* socsim_version(void);

/* Parses configuration text. On success *out owns a new handle. On failure
 * *out is NULL and errbuf holds every violation, one per line. */
socsim_status socsim_config_parse(const char* text, socsim_config** out,
                                  char* errbuf, size_t errbuf_len);

/* Reads and parses a configuration file. */
socsim_status socsim_config_load(const char* path, socsim_config** out,
                                 char* errbuf, size_t errbuf_len);

/* Overrides one key using the dotted form of the file grammar, e.g. "dt",
 * "seed", "noise.mu", "x0.amplitude". The value uses the file syntax. The
 * combined configuration is re-validated. */
socsim_status socsim_config_set(socsim_config* cfg, const char* key,
                                const char* value, char* errbuf,
                                size_t errbuf_len);

/* Re-checks all invariants of the current configuration. */
socsim_status socsim_config_validate(const socsim_config* cfg, char* errbuf,
                                     size_t errbuf_len);

/* Canonical text form; parsing it reproduces the configuration exactly. */
char* socsim_config_serialize(const socsim_config* cfg);

/* 16-hex-digit hash of the canonical form. */
char* socsim_config_hash(const socsim_config* cfg);

void socsim_config_free(socsim_config* cfg);

/* Runs the configured number of independent trajectories, writing one CSV
 * per path plus manifest.json. out_dir may be NULL to use the configured
 * output directory. If manifest_out is non-NULL it receives the manifest
 * path (even when some paths failed). Returns SOCSIM_ERR_NUMERICAL if any
 * path failed; the remaining paths still complete and are recorded. */
socsim_status socsim_ensemble_run(const socsim_config* cfg,
                                  const char* out_dir, char** manifest_out,
                                  char* errbuf, size_t errbuf_len);

/* Aggregates a completed ensemble: recomputes the summary statistics from
 * the trajectory files, writes summary.jsonl and summary.txt next to the
 * manifest, and (when table_out is non-NULL) returns the human-readable
 * table. */
socsim_status socsim_report(const char* manifest_file, char** table_out,
                            char* errbuf, size_t errbuf_len);

/* Releases a string returned by this library. NULL is allowed. */
void socsim_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* SOCSIM_H */
