#include "dpm/dpm.h"

#include "dpm/errors.hpp"
#include "dpm/report.hpp"
#include "dpm/scenario_io.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

struct dpm_scenario {
    dpm::Scenario value;
};

struct dpm_experiment {
    dpm::Experiment value;
};

namespace {

thread_local std::string last_error;

dpm_status set_error(dpm_status status, std::string message) {
    last_error = std::move(message);
    return status;
}

char* duplicate(const std::string& s) {
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out) std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

template <typename F>
dpm_status guarded(F&& body) {
    try {
        last_error.clear();
        return body();
    } catch (const dpm::UnknownScenario& e) {
        return set_error(DPM_ERR_UNKNOWN_SCENARIO, e.what());
    } catch (const dpm::DegenerateBaseline& e) {
        return set_error(DPM_ERR_DEGENERATE, e.what());
    } catch (const dpm::Error& e) {
        return set_error(DPM_ERR_CONFIG, e.what());
    } catch (const std::bad_alloc&) {
        return set_error(DPM_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return set_error(DPM_ERR_INTERNAL, e.what());
    }
}

const dpm::SimResult& pick(const dpm_experiment* e, dpm_trace_kind which) {
    return which == DPM_TRACE_BASELINE ? e->value.baseline : e->value.dpm;
}

dpm_status store_string(const std::string& s, char** out) {
    *out = duplicate(s);
    return *out ? DPM_OK : set_error(DPM_ERR_INTERNAL, "out of memory");
}

}  // namespace

extern "C" {

const char* dpm_last_error(void) { return last_error.c_str(); }

void dpm_string_free(char* text) { std::free(text); }

size_t dpm_preset_count(void) { return dpm::preset_names().size(); }

const char* dpm_preset_name(size_t index) {
    const auto& names = dpm::preset_names();
    return index < names.size() ? names[index].c_str() : nullptr;
}

dpm_status dpm_preset_document(const char* name, const char** document) {
    if (!name || !document) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        // Embedded documents are NUL-terminated string literals.
        *document = dpm::preset_document(name).data();
        return DPM_OK;
    });
}

dpm_status dpm_scenario_from_preset(const char* name, dpm_scenario** out) {
    if (!name || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new dpm_scenario{dpm::scenario_preset(name)};
        return DPM_OK;
    });
}

dpm_status dpm_scenario_from_json(const char* text, dpm_scenario** out) {
    if (!text || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        *out = new dpm_scenario{dpm::scenario_from_json(text)};
        return DPM_OK;
    });
}

dpm_status dpm_scenario_from_file(const char* path, dpm_scenario** out) {
    if (!path || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    std::ifstream in(path, std::ios::binary);
    if (!in) return set_error(DPM_ERR_IO, std::string("cannot read scenario file '") + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return dpm_scenario_from_json(buf.str().c_str(), out);
}

void dpm_scenario_free(dpm_scenario* scenario) { delete scenario; }

const char* dpm_scenario_name(const dpm_scenario* scenario) {
    return scenario ? scenario->value.name.c_str() : nullptr;
}

uint64_t dpm_scenario_seed(const dpm_scenario* scenario) { return scenario ? scenario->value.seed : 0; }

void dpm_scenario_set_seed(dpm_scenario* scenario, uint64_t seed) {
    if (scenario) scenario->value.seed = seed;
}

dpm_status dpm_scenario_set_duration(dpm_scenario* scenario, double seconds) {
    if (!scenario) return set_error(DPM_ERR_ARGUMENT, "null argument");
    if (!(seconds > 0.0)) return set_error(DPM_ERR_CONFIG, "duration must be > 0");
    scenario->value.duration = seconds;
    return DPM_OK;
}

dpm_status dpm_scenario_to_json(const dpm_scenario* scenario, char** out) {
    if (!scenario || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] { return store_string(dpm::scenario_to_json(scenario->value), out); });
}

dpm_status dpm_scenario_warnings(const dpm_scenario* scenario, char** out) {
    if (!scenario || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::string joined;
        for (const auto& w : dpm::validate_scenario(scenario->value)) joined += w + "\n";
        return store_string(joined, out);
    });
}

dpm_status dpm_experiment_run(const dpm_scenario* scenario, int record_trace, dpm_experiment** out) {
    if (!scenario || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        dpm::RunOptions options;
        options.record_trace = record_trace != 0;
        *out = new dpm_experiment{dpm::run_experiment(scenario->value, options)};
        return DPM_OK;
    });
}

void dpm_experiment_free(dpm_experiment* experiment) { delete experiment; }

dpm_status dpm_experiment_metrics(const dpm_experiment* experiment, dpm_metrics* out) {
    if (!experiment || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    const auto& m = experiment->value.metrics;
    if (!m) return set_error(DPM_ERR_DEGENERATE, experiment->value.metrics_error);
    *out = {m->energy_saving_pct, m->temp_reduction_pct, m->avg_delay_overhead_pct};
    return DPM_OK;
}

dpm_status dpm_experiment_totals(const dpm_experiment* experiment, dpm_trace_kind which, dpm_totals* out) {
    if (!experiment || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    const auto& r = pick(experiment, which);
    *out = {r.total_energy,  r.mean_temp,        r.max_temp,  r.battery_initial, r.battery_final,
            r.arrivals,      r.completed.size(), r.pending,   r.events};
    return DPM_OK;
}

size_t dpm_experiment_ip_count(const dpm_experiment* experiment) {
    return experiment ? experiment->value.dpm.ip_ids.size() : 0;
}

dpm_status dpm_experiment_ip_energy(const dpm_experiment* experiment, dpm_trace_kind which, size_t ip,
                                    double* energy_j) {
    if (!experiment || !energy_j) return set_error(DPM_ERR_ARGUMENT, "null argument");
    const auto& r = pick(experiment, which);
    if (ip >= r.ip_energy.size()) return set_error(DPM_ERR_ARGUMENT, "ip index out of range");
    *energy_j = r.ip_energy[ip];
    return DPM_OK;
}

double dpm_experiment_conservation_error(const dpm_experiment* experiment, dpm_trace_kind which) {
    return experiment ? dpm::conservation_error(pick(experiment, which)) : 0.0;
}

dpm_status dpm_experiment_write_trace(const dpm_experiment* experiment, dpm_trace_kind which, const char* path) {
    if (!experiment || !path) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) return set_error(DPM_ERR_IO, std::string("cannot write trace '") + path + "'");
        dpm::write_trace_csv(out, pick(experiment, which));
        out.flush();
        if (!out) return set_error(DPM_ERR_IO, std::string("failed writing trace '") + path + "'");
        return DPM_OK;
    });
}

dpm_status dpm_experiment_trace_csv(const dpm_experiment* experiment, dpm_trace_kind which, char** out) {
    if (!experiment || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        std::ostringstream buf;
        dpm::write_trace_csv(buf, pick(experiment, which));
        return store_string(buf.str(), out);
    });
}

dpm_status dpm_experiment_report_json(const dpm_experiment* experiment, const char* dpm_trace_path,
                                      const char* baseline_trace_path, char** out) {
    if (!experiment || !out) return set_error(DPM_ERR_ARGUMENT, "null argument");
    return guarded([&] {
        return store_string(dpm::report_json(experiment->value, dpm_trace_path ? dpm_trace_path : "",
                                             baseline_trace_path ? baseline_trace_path : ""),
                            out);
    });
}

}  // extern "C"
