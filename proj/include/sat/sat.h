/* C interface to the search-and-track simulation library. */
#ifndef SAT_SAT_H
#define SAT_SAT_H

#include <stddef.h>
#include <stdint.h>

#if defined(SAT_BUILDING_LIBRARY)
#  define SAT_API __attribute__((visibility("default")))
#else
#  define SAT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sat_status {
    SAT_OK = 0,
    SAT_ERR_INVALID_ARGUMENT = 1,
    SAT_ERR_IO = 2,
    SAT_ERR_PARSE = 3,
    SAT_ERR_CONFIG = 4,
    SAT_ERR_SCHEMA = 5,
    SAT_ERR_RUNTIME = 6
} sat_status;

typedef struct sat_scenario sat_scenario;
typedef struct sat_trace sat_trace;
typedef struct sat_metrics sat_metrics;

/* Message of the last failed call on this thread; never NULL. */
SAT_API const char* sat_last_error(void);
SAT_API const char* sat_version(void);

SAT_API sat_status sat_scenario_load(const char* path, sat_scenario** out);
SAT_API sat_status sat_scenario_parse(const char* json_text, sat_scenario** out);
SAT_API void sat_scenario_free(sat_scenario* scenario);
SAT_API int sat_scenario_steps(const sat_scenario* scenario);
SAT_API size_t sat_scenario_agent_count(const sat_scenario* scenario);
SAT_API size_t sat_scenario_target_count(const sat_scenario* scenario);

SAT_API sat_status sat_simulate(const sat_scenario* scenario, uint64_t seed, sat_trace** out);
SAT_API sat_status sat_trace_write(const sat_trace* trace, const char* path);
SAT_API sat_status sat_trace_read(const char* path, sat_trace** out);
SAT_API size_t sat_trace_step_count(const sat_trace* trace);
SAT_API void sat_trace_free(sat_trace* trace);

/* Cutoff and window come from the given scenario, or defaults when NULL. */
SAT_API sat_status sat_metrics_compute(const sat_trace* trace, const sat_scenario* scenario, sat_metrics** out);
SAT_API double sat_metrics_mean_ospa(const sat_metrics* metrics);
SAT_API sat_status sat_metrics_write(const sat_metrics* metrics, const char* path);
SAT_API void sat_metrics_free(sat_metrics* metrics);

/* Initial per-agent search plans as JSON; release with sat_string_free. */
SAT_API sat_status sat_plan_json(const sat_scenario* scenario, char** out);
SAT_API void sat_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
