#pragma once

#include "dpm/psm.hpp"
#include "dpm/workload.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpm {

enum class TraceEvent : std::uint8_t {
    Arrival,          // task request reached the LEM
    Grant,            // GEM enabled the IP
    Deny,             // GEM forced the IP to SL1
    Defer,            // LEM rule table selected SL1; request waits
    TransitionBegin,  // state column holds the target state
    TransitionEnd,
    Start,  // instruction execution begins
    Complete,
    ClassChange,  // battery or temperature class changed
    FanOn,
    FanOff,
    End,
};

std::string_view to_string(TraceEvent e) noexcept;

inline constexpr int kSocWide = -1;

struct TraceRecord {
    double time = 0.0;
    int ip = kSocWide;
    TraceEvent event = TraceEvent::End;
    std::optional<PowerState> state;
    double battery_j = 0.0;
    double temp_c = 0.0;
    double cum_energy_j = 0.0;
};

struct TaskOutcome {
    std::size_t ip = 0;
    std::uint64_t task_id = 0;
    std::uint64_t cycles = 0;
    PowerState state = PowerState::ON1;
    double arrival = 0.0;
    double start = 0.0;
    double completion = 0.0;

    double latency() const noexcept { return completion - arrival; }
};

enum class RunMode : std::uint8_t { Dpm, Baseline };

struct RunOptions {
    bool record_trace = true;
};

struct SimResult {
    std::string scenario;
    std::uint64_t seed = 0;
    RunMode mode = RunMode::Dpm;
    double duration = 0.0;

    std::vector<std::string> ip_ids;
    std::vector<double> ip_energy;  // J, transitions and idle included
    double total_energy = 0.0;

    double battery_initial = 0.0;
    double battery_final = 0.0;
    bool battery_clamped = false;

    double ambient = 0.0;
    double mean_temp = 0.0;  // time average over the horizon
    double max_temp = 0.0;

    std::vector<TaskOutcome> completed;
    std::size_t arrivals = 0;
    std::size_t pending = 0;  // queued or in service at the horizon
    std::size_t deferrals = 0;  // GEM denials plus LEM SL1 selections
    std::size_t events = 0;

    std::vector<TraceRecord> trace;
};

/// Runs the managed system: GEM arbitration (when present), LEM rule table
/// and idle policy, PSM costs, battery and thermal integration.
SimResult run(const Scenario& scenario, const RunOptions& options = {});

/// Same task streams at ON1 throughout: no sleep, no GEM, no rules.
SimResult run_baseline(const Scenario& scenario, const RunOptions& options = {});

struct Metrics {
    double energy_saving_pct = 0.0;
    double temp_reduction_pct = 0.0;
    double avg_delay_overhead_pct = 0.0;
};

/// Throws DegenerateBaseline when the baseline has no energy or no
/// temperature excess over ambient.
Metrics compute_metrics(const SimResult& dpm, const SimResult& baseline);

/// Header: time_s,ip,event,state,battery_J,temp_C,cum_energy_J
void write_trace_csv(std::ostream& out, const SimResult& result);

}  // namespace dpm
