#include "dpm/report.hpp"

#include "dpm/errors.hpp"

#include <json.hpp>

#include <cmath>

namespace dpm {

using nlohmann::json;

Experiment run_experiment(const Scenario& scenario, const RunOptions& options) {
    Experiment e{scenario, {}, {}, std::nullopt, {}};
    e.baseline = run_baseline(scenario, options);
    e.dpm = run(scenario, options);
    try {
        e.metrics = compute_metrics(e.dpm, e.baseline);
    } catch (const DegenerateBaseline& ex) {
        e.metrics_error = ex.what();
    }
    return e;
}

double conservation_error(const SimResult& r) noexcept {
    const double drop = r.battery_initial - r.battery_final;
    const double scale = std::max(std::abs(r.total_energy), 1e-300);
    return std::abs(drop - r.total_energy) / scale;
}

namespace {

json totals(const SimResult& r) {
    json per_ip = json::object();
    for (std::size_t i = 0; i < r.ip_ids.size(); ++i) per_ip[r.ip_ids[i]] = r.ip_energy[i];
    double mean_latency = 0.0;
    for (const auto& t : r.completed) mean_latency += t.latency();
    if (!r.completed.empty()) mean_latency /= static_cast<double>(r.completed.size());
    return {{"total_energy_J", r.total_energy},
            {"ip_energy_J", per_ip},
            {"battery_initial_J", r.battery_initial},
            {"battery_final_J", r.battery_final},
            {"mean_temp_C", r.mean_temp},
            {"max_temp_C", r.max_temp},
            {"mean_latency_s", mean_latency},
            {"tasks_arrived", r.arrivals},
            {"tasks_completed", r.completed.size()},
            {"tasks_pending", r.pending},
            {"deferrals", r.deferrals},
            {"events", r.events}};
}

}  // namespace

std::string report_json(const Experiment& e, std::string_view dpm_trace_path,
                        std::string_view baseline_trace_path) {
    json doc;
    doc["scenario"] = e.scenario.name;
    doc["seed"] = e.scenario.seed;
    if (e.metrics) {
        doc["metrics"] = {{"energy_saving_pct", e.metrics->energy_saving_pct},
                          {"temp_reduction_pct", e.metrics->temp_reduction_pct},
                          {"avg_delay_overhead_pct", e.metrics->avg_delay_overhead_pct}};
    } else {
        doc["metrics"] = nullptr;
        doc["metrics_error"] = e.metrics_error;
    }
    doc["dpm"] = totals(e.dpm);
    doc["baseline"] = totals(e.baseline);
    json traces = json::object();
    if (!dpm_trace_path.empty()) traces["dpm"] = std::string(dpm_trace_path);
    if (!baseline_trace_path.empty()) traces["baseline"] = std::string(baseline_trace_path);
    doc["traces"] = traces;
    return doc.dump(2) + "\n";
}

}  // namespace dpm
