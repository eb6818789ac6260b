#pragma once

#include "dpm/engine.hpp"
#include "dpm/workload.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace dpm {

/// One managed run and its always-ON1 reference over identical task streams.
struct Experiment {
    Scenario scenario;
    SimResult dpm;
    SimResult baseline;
    std::optional<Metrics> metrics;
    std::string metrics_error;  // set when the baseline is degenerate
};

/// Runs the baseline, then the managed system, then compares them.
Experiment run_experiment(const Scenario& scenario, const RunOptions& options = {});

/// |battery drop - energy charged| relative to the energy charged.
double conservation_error(const SimResult& result) noexcept;

/// Machine-readable run report. Empty paths are left out of "traces".
std::string report_json(const Experiment& experiment, std::string_view dpm_trace_path = {},
                        std::string_view baseline_trace_path = {});

}  // namespace dpm
