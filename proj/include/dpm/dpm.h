/* C interface to the SoC dynamic power management simulator.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function. Every fallible call returns a dpm_status; on
 * failure dpm_last_error() describes the problem for the calling thread.
 * Strings returned through char** are heap-allocated and released with
 * dpm_string_free().
 */
#ifndef DPM_DPM_H
#define DPM_DPM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define DPM_API __declspec(dllexport)
#else
#define DPM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dpm_status {
    DPM_OK = 0,
    DPM_ERR_ARGUMENT = 1,
    DPM_ERR_CONFIG = 2,
    DPM_ERR_IO = 3,
    DPM_ERR_UNKNOWN_SCENARIO = 4,
    DPM_ERR_DEGENERATE = 5,
    DPM_ERR_INTERNAL = 6
} dpm_status;

typedef enum dpm_trace_kind { DPM_TRACE_DPM = 0, DPM_TRACE_BASELINE = 1 } dpm_trace_kind;

typedef struct dpm_scenario dpm_scenario;
typedef struct dpm_experiment dpm_experiment;

typedef struct dpm_metrics {
    double energy_saving_pct;
    double temp_reduction_pct;
    double avg_delay_overhead_pct;
} dpm_metrics;

typedef struct dpm_totals {
    double total_energy_j;
    double mean_temp_c;
    double max_temp_c;
    double battery_initial_j;
    double battery_final_j;
    size_t tasks_arrived;
    size_t tasks_completed;
    size_t tasks_pending;
    size_t events;
} dpm_totals;

DPM_API const char* dpm_last_error(void);
DPM_API void dpm_string_free(char* text);

/* Presets: A1, A2, A3, A4, B, C. */
DPM_API size_t dpm_preset_count(void);
DPM_API const char* dpm_preset_name(size_t index);
/* Exact embedded document of a preset; the pointer stays valid forever. */
DPM_API dpm_status dpm_preset_document(const char* name, const char** document);

DPM_API dpm_status dpm_scenario_from_preset(const char* name, dpm_scenario** out);
DPM_API dpm_status dpm_scenario_from_json(const char* text, dpm_scenario** out);
DPM_API dpm_status dpm_scenario_from_file(const char* path, dpm_scenario** out);
DPM_API void dpm_scenario_free(dpm_scenario* scenario);

DPM_API const char* dpm_scenario_name(const dpm_scenario* scenario);
DPM_API uint64_t dpm_scenario_seed(const dpm_scenario* scenario);
DPM_API void dpm_scenario_set_seed(dpm_scenario* scenario, uint64_t seed);
DPM_API dpm_status dpm_scenario_set_duration(dpm_scenario* scenario, double seconds);
/* Fully expanded document. */
DPM_API dpm_status dpm_scenario_to_json(const dpm_scenario* scenario, char** out);
/* Newline-separated validation warnings (empty string when none). */
DPM_API dpm_status dpm_scenario_warnings(const dpm_scenario* scenario, char** out);

/* Runs the always-ON1 baseline and the managed system. */
DPM_API dpm_status dpm_experiment_run(const dpm_scenario* scenario, int record_trace, dpm_experiment** out);
DPM_API void dpm_experiment_free(dpm_experiment* experiment);

DPM_API dpm_status dpm_experiment_metrics(const dpm_experiment* experiment, dpm_metrics* out);
DPM_API dpm_status dpm_experiment_totals(const dpm_experiment* experiment, dpm_trace_kind which, dpm_totals* out);
DPM_API size_t dpm_experiment_ip_count(const dpm_experiment* experiment);
DPM_API dpm_status dpm_experiment_ip_energy(const dpm_experiment* experiment, dpm_trace_kind which, size_t ip,
                                            double* energy_j);
/* Relative mismatch between battery drop and energy charged. */
DPM_API double dpm_experiment_conservation_error(const dpm_experiment* experiment, dpm_trace_kind which);

DPM_API dpm_status dpm_experiment_write_trace(const dpm_experiment* experiment, dpm_trace_kind which,
                                              const char* path);
DPM_API dpm_status dpm_experiment_trace_csv(const dpm_experiment* experiment, dpm_trace_kind which, char** out);
/* Paths may be NULL; only the given ones are listed in the report. */
DPM_API dpm_status dpm_experiment_report_json(const dpm_experiment* experiment, const char* dpm_trace_path,
                                              const char* baseline_trace_path, char** out);

#ifdef __cplusplus
}
#endif

#endif /* DPM_DPM_H */
