#include "dpm/engine.hpp"

#include "dpm/errors.hpp"
#include "dpm/gem.hpp"
#include "dpm/lem.hpp"
#include "dpm/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <ostream>
#include <queue>
#include <utility>

namespace dpm {

std::string_view to_string(TraceEvent e) noexcept {
    switch (e) {
        case TraceEvent::Arrival: return "arrival";
        case TraceEvent::Grant: return "grant";
        case TraceEvent::Deny: return "deny";
        case TraceEvent::Defer: return "defer";
        case TraceEvent::TransitionBegin: return "transition_begin";
        case TraceEvent::TransitionEnd: return "transition_end";
        case TraceEvent::Start: return "start";
        case TraceEvent::Complete: return "complete";
        case TraceEvent::ClassChange: return "class_change";
        case TraceEvent::FanOn: return "fan_on";
        case TraceEvent::FanOff: return "fan_off";
        case TraceEvent::End: return "end";
    }
    return "?";
}

namespace {

// Class crossings are located to this resolution.
constexpr double kCrossingResolution = 1e-6;

enum class EventKind : std::uint8_t { TaskArrival, GemArbitration, TransitionComplete, TaskComplete, SimEnd };

struct Event {
    double time;
    std::uint64_t sequence;
    EventKind kind;
    std::size_t ip;
};

struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
        if (a.time != b.time) return a.time > b.time;
        return a.sequence > b.sequence;
    }
};

enum class Phase : std::uint8_t { Idle, Transitioning, Executing };

struct Classes {
    BatteryClass battery;
    TempClass temperature;
    friend bool operator==(const Classes&, const Classes&) = default;
};

struct IpRuntime {
    std::string id;
    TrafficGenerator generator;
    SplitMix64 rng;
    std::uint64_t next_task_id = 0;
    double stream_clock = 0.0;  // nominal completion of the last drawn task
    std::optional<Task> upcoming;

    PowerState state = PowerState::ON1;
    Phase phase = Phase::Idle;
    PowerState target = PowerState::ON1;
    bool execute_after_transition = false;
    bool waiting = false;

    std::deque<Task> queue;
    PowerState exec_state = PowerState::ON1;
    double exec_start = 0.0;

    double power = 0.0;
    double energy = 0.0;

    IdlePredictor predictor;
    std::optional<double> idle_since;
};

/// Environment after integrating constant total power over an interval.
struct EnvStep {
    Battery battery;
    ThermalNode node;
    double temp_integral = 0.0;
    double temp_max = 0.0;
};

class Simulation {
public:
    Simulation(const Scenario& scenario, RunMode mode, const RunOptions& options)
        : sc_(scenario),
          mode_(mode),
          options_(options),
          registrations_(scenario.registrations()),
          ledger_(registrations_),
          battery_(scenario.environment.battery),
          node_(scenario.environment.thermal),
          noise_rng_(scenario.seed ^ 0x6E6F6973652D6C65ULL) {
        validate_scenario(sc_);
        node_.fan_on = false;
        max_temp_ = node_.temperature;
        for (const auto& g : sc_.generators) {
            IpRuntime ip;
            ip.id = g.ip_id;
            ip.generator = g;
            ip.rng = SplitMix64(stream_seed(sc_.seed, g));
            ip.predictor.alpha = sc_.lem.idle_alpha;
            ip.idle_since = 0.0;
            ips_.push_back(std::move(ip));
        }
        for (auto& ip : ips_) ip.power = idle_power(ip.state, sc_.psm);
        classes_ = current_classes();
    }

    SimResult execute() {
        push(sc_.duration, EventKind::SimEnd, 0);
        for (std::size_t i = 0; i < ips_.size(); ++i) schedule_next_arrival(i);

        const double initial_charge = battery_.charge;
        while (!queue_.empty()) {
            const Event ev = queue_.top();
            if (ev.time > now_ && advance(ev.time)) continue;
            queue_.pop();
            ++events_;
            if (ev.kind == EventKind::SimEnd) {
                record(kSocWide, TraceEvent::End, std::nullopt);
                break;
            }
            handle(ev);
            if (managed() && current_classes() != classes_) {
                classes_ = current_classes();
                push(now_, EventKind::GemArbitration, 0);
            }
        }

        SimResult r;
        r.scenario = sc_.name;
        r.seed = sc_.seed;
        r.mode = mode_;
        r.duration = sc_.duration;
        for (const auto& ip : ips_) {
            r.ip_ids.push_back(ip.id);
            r.ip_energy.push_back(ip.energy);
            r.pending += ip.queue.size();
        }
        r.total_energy = total_energy();
        r.battery_initial = initial_charge;
        r.battery_final = battery_.charge;
        r.battery_clamped = clamped_;
        r.ambient = node_.ambient;
        r.mean_temp = temp_integral_ / sc_.duration;
        r.max_temp = max_temp_;
        r.completed = std::move(completed_);
        r.arrivals = arrivals_;
        r.deferrals = deferrals_;
        r.events = events_;
        r.trace = std::move(trace_);
        return r;
    }

private:
    bool managed() const noexcept { return mode_ == RunMode::Dpm; }

    void push(double time, EventKind kind, std::size_t ip) { queue_.push({time, sequence_++, kind, ip}); }

    double total_energy() const noexcept {
        double sum = 0.0;
        for (const auto& ip : ips_) sum += ip.energy;
        return sum;
    }

    Classes classes_of(const Battery& b, const ThermalNode& n) const noexcept {
        return {classify_battery(b, sc_.thresholds), classify_temperature(n, sc_.thresholds)};
    }
    Classes current_classes() const noexcept { return classes_of(battery_, node_); }

    void record(int ip, TraceEvent event, std::optional<PowerState> state) {
        if (!options_.record_trace) return;
        trace_.push_back({now_, ip, event, state, battery_.charge, node_.temperature, total_energy()});
    }
    void record(std::size_t ip, TraceEvent event, std::optional<PowerState> state) {
        record(static_cast<int>(ip), event, state);
    }

    // -- environment -------------------------------------------------------

    double total_power() const noexcept {
        double p = 0.0;
        for (const auto& ip : ips_) p += ip.power;
        return p;
    }

    EnvStep integrate(double dt) const {
        EnvStep s{battery_, node_, 0.0, node_.temperature};
        const double power = total_power();
        s.battery = drain(s.battery, power * dt);
        const double max_step = s.node.time_constant() / 20.0;
        const auto steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / max_step)));
        const double h = dt / static_cast<double>(steps);
        for (std::size_t i = 0; i < steps; ++i) {
            const double before = s.node.temperature;
            s.node = step_temperature(s.node, power, h);
            s.temp_integral += 0.5 * (before + s.node.temperature) * h;
            s.temp_max = std::max(s.temp_max, s.node.temperature);
        }
        return s;
    }

    void commit(const EnvStep& s, double t) {
        const double dt = t - now_;
        double drawn = 0.0;
        for (auto& ip : ips_) {
            const double e = ip.power * dt;
            ip.energy += e;
            drawn += e;
        }
        if (battery_.source == BatterySource::OnBattery && battery_.charge < drawn) clamped_ = true;
        battery_ = s.battery;
        node_ = s.node;
        temp_integral_ += s.temp_integral;
        max_temp_ = std::max(max_temp_, s.temp_max);
        now_ = t;
    }

    /// Moves the environment to `t`. When a class boundary is crossed on the
    /// way, stops just past the crossing, queues a re-arbitration there and
    /// returns true.
    bool advance(double t) {
        const auto trial = integrate(t - now_);
        if (!managed() || classes_of(trial.battery, trial.node) == classes_) {
            commit(trial, t);
            return false;
        }
        double lo = now_;
        double hi = t;
        while (hi - lo > kCrossingResolution) {
            const double mid = 0.5 * (lo + hi);
            const auto probe = integrate(mid - now_);
            if (classes_of(probe.battery, probe.node) != classes_) hi = mid;
            else lo = mid;
        }
        commit(hi == t ? trial : integrate(hi - now_), hi);
        classes_ = current_classes();
        push(now_, EventKind::GemArbitration, 0);
        return true;
    }

    void charge_impulse(IpRuntime& ip, double energy) {
        if (energy <= 0.0) return;
        if (battery_.source == BatterySource::OnBattery && battery_.charge < energy) clamped_ = true;
        ip.energy += energy;
        battery_ = drain(battery_, energy);
        node_.temperature += energy / node_.c_th;
        max_temp_ = std::max(max_temp_, node_.temperature);
    }

    // -- workload ----------------------------------------------------------

    void schedule_next_arrival(std::size_t i) {
        auto& ip = ips_[i];
        const auto next = next_task(ip.generator, ip.rng, ip.stream_clock, ip.next_task_id++);
        ip.stream_clock = next.task.arrival_time +
                          static_cast<double>(next.task.cycles) * sc_.psm.nominal_cycle_time;
        if (next.task.arrival_time < sc_.duration) {
            ip.upcoming = next.task;
            push(next.task.arrival_time, EventKind::TaskArrival, i);
        } else {
            ip.upcoming.reset();
        }
    }

    // -- event handlers ----------------------------------------------------

    void handle(const Event& ev) {
        switch (ev.kind) {
            case EventKind::TaskArrival: on_arrival(ev.ip); break;
            case EventKind::TransitionComplete: on_transition_complete(ev.ip); break;
            case EventKind::TaskComplete: on_task_complete(ev.ip); break;
            case EventKind::GemArbitration: on_class_change(); break;
            case EventKind::SimEnd: break;
        }
    }

    void on_arrival(std::size_t i) {
        auto& ip = ips_[i];
        ip.queue.push_back(*ip.upcoming);
        ++arrivals_;
        record(i, TraceEvent::Arrival, ip.state);
        schedule_next_arrival(i);
        if (ip.idle_since) {
            if (managed()) ip.predictor = predict_idle(ip.predictor, now_ - *ip.idle_since).predictor;
            ip.idle_since.reset();
        }
        if (ip.phase == Phase::Idle && ip.queue.size() == 1) dispatch(i);
    }

    void on_transition_complete(std::size_t i) {
        auto& ip = ips_[i];
        ip.state = ip.target;
        ip.phase = Phase::Idle;
        ip.power = idle_power(ip.state, sc_.psm);
        record(i, TraceEvent::TransitionEnd, ip.state);
        if (ip.execute_after_transition) {
            ip.execute_after_transition = false;
            start_execution(i, ip.state);
        } else if (!ip.waiting && !ip.queue.empty()) {
            dispatch(i);
        }
    }

    void on_task_complete(std::size_t i) {
        auto& ip = ips_[i];
        const Task task = ip.queue.front();
        ip.queue.pop_front();
        completed_.push_back({i, task.task_id, task.cycles, ip.exec_state, task.arrival_time, ip.exec_start, now_});
        ledger_.clear_estimate(ip.id);
        ip.phase = Phase::Idle;
        ip.power = idle_power(ip.state, sc_.psm);
        record(i, TraceEvent::Complete, ip.state);

        if (!ip.queue.empty()) {
            dispatch(i);
        } else {
            ip.idle_since = now_;
            if (managed()) {
                const double predicted = ip.predictor.initialized ? ip.predictor.predicted : 0.0;
                const auto target = choose_idle_state(predicted, ip.state, sc_.psm, sc_.allow_off);
                if (target != ip.state) begin_transition(i, target, false);
            }
        }
        if (managed()) retry_waiting(i);
    }

    void on_class_change() {
        record(kSocWide, TraceEvent::ClassChange, std::nullopt);
        if (sc_.gem.present) {
            const auto requesters = requesting_ids();
            apply_fan(arbitrate(classes_.battery, classes_.temperature, requesters, registrations_, sc_.gem).fan_on);
        }
        retry_waiting(ips_.size());
    }

    // -- control -----------------------------------------------------------

    std::vector<std::string> requesting_ids() const {
        std::vector<std::string> ids;
        for (const auto& ip : ips_) {
            if (ip.phase == Phase::Idle && !ip.queue.empty()) ids.push_back(ip.id);
        }
        return ids;
    }

    void apply_fan(bool on) {
        if (node_.fan_on == on) return;
        node_ = set_fan(node_, on);
        record(kSocWide, on ? TraceEvent::FanOn : TraceEvent::FanOff, std::nullopt);
    }

    void retry_waiting(std::size_t skip) {
        for (std::size_t j = 0; j < ips_.size(); ++j) {
            if (j == skip) continue;
            auto& other = ips_[j];
            if (other.waiting && other.phase == Phase::Idle && !other.queue.empty()) dispatch(j);
        }
    }

    void dispatch(std::size_t i) {
        auto& ip = ips_[i];
        if (!managed()) {
            start_execution(i, PowerState::ON1);
            return;
        }
        const Task& task = ip.queue.front();

        if (sc_.gem.present) {
            const auto requesters = requesting_ids();
            const auto decision =
                arbitrate(classes_.battery, classes_.temperature, requesters, registrations_, sc_.gem);
            apply_fan(decision.fan_on);
            const bool enabled =
                std::find(decision.enabled.begin(), decision.enabled.end(), ip.id) != decision.enabled.end();
            record(i, enabled ? TraceEvent::Grant : TraceEvent::Deny, ip.state);
            if (!enabled) {
                hold_in_sleep1(i);
                return;
            }
        }

        const LemView view{battery_, node_, ledger_.others_energy(ip.id), sc_.psm, sc_.thresholds};
        const auto state = decide_task_state(task, true, sc_.rules, view);
        if (!is_on(state)) {
            record(i, TraceEvent::Defer, ip.state);
            hold_in_sleep1(i);
            return;
        }

        ip.waiting = false;
        double estimate = task_energy_estimate(task, state, sc_.psm);
        if (sc_.lem.estimate_noise > 0.0) {
            estimate *= 1.0 + sc_.lem.estimate_noise * (2.0 * noise_rng_.uniform01() - 1.0);
        }
        ledger_.post_estimate(ip.id, estimate);
        if (ip.state == state) start_execution(i, state);
        else begin_transition(i, state, true);
    }

    void hold_in_sleep1(std::size_t i) {
        auto& ip = ips_[i];
        ++deferrals_;
        ip.waiting = true;
        ledger_.clear_estimate(ip.id);
        if (ip.state != PowerState::SL1) begin_transition(i, PowerState::SL1, false);
    }

    void begin_transition(std::size_t i, PowerState target, bool execute_after) {
        auto& ip = ips_[i];
        const auto cost = transition(ip.state, target, sc_.psm);
        ip.target = target;
        ip.execute_after_transition = execute_after;
        record(i, TraceEvent::TransitionBegin, target);
        if (cost.delay > 0.0) {
            ip.phase = Phase::Transitioning;
            ip.power = cost.energy / cost.delay;
            push(now_ + cost.delay, EventKind::TransitionComplete, i);
        } else {
            charge_impulse(ip, cost.energy);
            on_transition_complete(i);
        }
    }

    void start_execution(std::size_t i, PowerState state) {
        auto& ip = ips_[i];
        const auto cost = instruction_cost(state, ip.queue.front().cycles, sc_.psm);
        ip.phase = Phase::Executing;
        ip.exec_state = state;
        ip.exec_start = now_;
        record(i, TraceEvent::Start, state);
        if (cost.duration > 0.0) {
            ip.power = cost.energy / cost.duration;
        } else {
            ip.power = 0.0;
            charge_impulse(ip, cost.energy);
        }
        push(now_ + cost.duration, EventKind::TaskComplete, i);
    }

    const Scenario& sc_;
    RunMode mode_;
    RunOptions options_;
    std::vector<IpRegistration> registrations_;
    EnergyLedger ledger_;

    Battery battery_;
    ThermalNode node_;
    Classes classes_{};
    bool clamped_ = false;
    double temp_integral_ = 0.0;
    double max_temp_ = 0.0;
    SplitMix64 noise_rng_;

    std::vector<IpRuntime> ips_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::uint64_t sequence_ = 0;
    double now_ = 0.0;

    std::vector<TaskOutcome> completed_;
    std::vector<TraceRecord> trace_;
    std::size_t arrivals_ = 0;
    std::size_t deferrals_ = 0;
    std::size_t events_ = 0;
};

}  // namespace

SimResult run(const Scenario& scenario, const RunOptions& options) {
    return Simulation(scenario, RunMode::Dpm, options).execute();
}

SimResult run_baseline(const Scenario& scenario, const RunOptions& options) {
    return Simulation(scenario, RunMode::Baseline, options).execute();
}

Metrics compute_metrics(const SimResult& dpm, const SimResult& baseline) {
    if (!(baseline.total_energy > 0.0)) throw DegenerateBaseline("baseline consumed no energy");
    const double base_excess = baseline.mean_temp - baseline.ambient;
    if (base_excess == 0.0) throw DegenerateBaseline("baseline never rose above ambient");

    Metrics m;
    m.energy_saving_pct = 100.0 * (baseline.total_energy - dpm.total_energy) / baseline.total_energy;
    const double dpm_excess = dpm.mean_temp - dpm.ambient;
    m.temp_reduction_pct = 100.0 * (base_excess - dpm_excess) / base_excess;

    std::map<std::pair<std::size_t, std::uint64_t>, double> base_latency;
    for (const auto& t : baseline.completed) base_latency[{t.ip, t.task_id}] = t.latency();
    double sum_dpm = 0.0;
    double sum_base = 0.0;
    std::size_t n = 0;
    for (const auto& t : dpm.completed) {
        const auto it = base_latency.find({t.ip, t.task_id});
        if (it == base_latency.end()) continue;
        sum_dpm += t.latency();
        sum_base += it->second;
        ++n;
    }
    if (n > 0 && sum_base > 0.0) m.avg_delay_overhead_pct = 100.0 * (sum_dpm - sum_base) / sum_base;
    return m;
}

void write_trace_csv(std::ostream& out, const SimResult& result) {
    out << "time_s,ip,event,state,battery_J,temp_C,cum_energy_J\n";
    char line[256];
    for (const auto& r : result.trace) {
        const std::string ip = r.ip == kSocWide ? "*" : result.ip_ids.at(static_cast<std::size_t>(r.ip));
        const std::string_view state = r.state ? to_string(*r.state) : std::string_view("-");
        const int n = std::snprintf(line, sizeof line, "%.9f,%s,%.*s,%.*s,%.9f,%.6f,%.9f\n", r.time, ip.c_str(),
                                    static_cast<int>(to_string(r.event).size()), to_string(r.event).data(),
                                    static_cast<int>(state.size()), state.data(), r.battery_j, r.temp_c,
                                    r.cum_energy_j);
        out.write(line, n);
    }
}

}  // namespace dpm
