/* C interface to the flatcircle library. */
#ifndef FLATCIRCLE_H
#define FLATCIRCLE_H

#include <stddef.h>
#include <stdint.h>

#if defined(FC_BUILDING_LIBRARY)
#define FC_API __attribute__((visibility("default")))
#else
#define FC_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fc_status {
  FC_OK = 0,
  FC_INVARIANT_FAILED = 1,
  FC_CONFIG_ERROR = 2,
  FC_PRECISION_EXHAUSTED = 3,
  FC_ERROR = 4
} fc_status;

typedef struct fc_map fc_map;
typedef struct fc_partition fc_partition;

FC_API const char* fc_version(void);

/* Message of the last failing call on this thread, or "" after a success. */
FC_API const char* fc_last_error(void);

/* Strings returned through char** arguments are owned by the caller. */
FC_API void fc_string_free(char* s);

/* Decimal strings are parsed at precision_bits (at least 64). */
FC_API fc_status fc_map_create(const char* flat_length, const char* exponent, const char* offset,
                               unsigned precision_bits, fc_map** out);

/* Tunes the offset so the rotation number follows the target
   ("golden", "silver", "cf:1,2" or "dec:0.4142"). */
FC_API fc_status fc_map_tune(const char* flat_length, const char* exponent, const char* target,
                             unsigned precision_bits, fc_map** out);

FC_API void fc_map_destroy(fc_map* m);

FC_API fc_status fc_map_forward(const fc_map* m, const char* x, char** out);
FC_API fc_status fc_map_omega(const fc_map* m, char** out);

/* Certified partial quotients of a tuned map. Writes up to cap values and
   sets *count to the full depth. */
FC_API fc_status fc_map_partial_quotients(const fc_map* m, int64_t* buf, size_t cap, size_t* count);

/* Dynamical partition of a tuned map at the given level. */
FC_API fc_status fc_partition_build(const fc_map* m, int level, fc_partition** out);
FC_API void fc_partition_destroy(fc_partition* p);
FC_API fc_status fc_partition_counts(const fc_partition* p, size_t* long_gaps, size_t* short_gaps,
                                     size_t* preimages);
/* CSV with header "type,index,left,length". */
FC_API fc_status fc_partition_csv(const fc_partition* p, char** out);

/* Runs one command ("tune", "scalings", "partition", "distortion",
   "dimension", "sweep", "cherry", "verify") with a JSON config. The return
   value is the run status; *summary receives the report lines when non-null. */
FC_API fc_status fc_run(const char* command, const char* config_json, char** summary);

#ifdef __cplusplus
}
#endif

#endif
