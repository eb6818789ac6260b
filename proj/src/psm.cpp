#include "dpm/psm.hpp"

#include "dpm/errors.hpp"

#include <cmath>

namespace dpm {

namespace {

constexpr std::array<std::string_view, kPowerStateCount> kStateNames = {
    "Off", "SL1", "SL2", "SL3", "SL4", "ON1", "ON2", "ON3", "ON4"};

constexpr TransitionCost us(double delay_us, double energy_uj) {
    return {delay_us * 1e-6, energy_uj * 1e-6};
}

}  // namespace

std::string_view to_string(PowerState s) noexcept { return kStateNames[index_of(s)]; }

std::optional<PowerState> parse_power_state(std::string_view text) noexcept {
    for (auto s : kAllPowerStates) {
        if (kStateNames[index_of(s)] == text) return s;
    }
    return std::nullopt;
}

void fill_transitions(PsmConfig& config, const std::array<EdgeCosts, kPowerStateCount>& edges) {
    for (auto from : kAllPowerStates) {
        for (auto to : kAllPowerStates) {
            if (from == to) {
                config.cost(from, to) = {};
                continue;
            }
            const auto& ex = edges[index_of(from)].exit;
            const auto& en = edges[index_of(to)].entry;
            config.cost(from, to) = {ex.delay + en.delay, ex.energy + en.energy};
        }
    }
}

const std::array<EdgeCosts, kPowerStateCount>& default_edge_costs() {
    // Wake (exit) delays stay short next to a task; energies set break-even
    // times around 37 us (SL1), 190 us (SL2), 0.76 ms (SL3), 2.5 ms (SL4)
    // and 10 ms (Off) from an idle ON1.
    static const std::array<EdgeCosts, kPowerStateCount> edges = {{
        {us(50, 1500), us(300, 2500)},  // Off
        {us(3, 5), us(5, 8)},           // SL1
        {us(5, 30), us(15, 42)},        // SL2
        {us(10, 120), us(40, 175)},     // SL3
        {us(20, 400), us(100, 600)},    // SL4
        {us(1, 0.5), us(0, 0)},         // ON1
        {us(1, 0.5), us(0, 0)},         // ON2
        {us(1, 0.5), us(0, 0)},         // ON3
        {us(1, 0.5), us(0, 0)},         // ON4
    }};
    return edges;
}

PsmConfig default_psm_config() {
    PsmConfig c;
    c.nominal_cycle_time = 5e-9;
    c.nominal_cycle_energy = 1e-8;
    c.at(PowerState::ON1) = {1.00, 1.00, 0.40};
    c.at(PowerState::ON2) = {0.85, 0.80, 0.26};
    c.at(PowerState::ON3) = {0.70, 0.60, 0.15};
    c.at(PowerState::ON4) = {0.55, 0.40, 0.07};
    // Sleep states keep a retention voltage but no clock.
    c.at(PowerState::SL1) = {0.55, 0.0, 0.050};
    c.at(PowerState::SL2) = {0.50, 0.0, 0.020};
    c.at(PowerState::SL3) = {0.45, 0.0, 0.010};
    c.at(PowerState::SL4) = {0.40, 0.0, 0.005};
    c.at(PowerState::Off) = {0.0, 0.0, 0.0};
    fill_transitions(c, default_edge_costs());
    return c;
}

InstructionCost instruction_cost(PowerState state, std::uint64_t cycles, const PsmConfig& config) {
    if (!is_on(state)) {
        throw NotExecutableState("state " + std::string(to_string(state)) +
                                 " cannot execute instructions");
    }
    const auto& p = config.at(state);
    const double n = static_cast<double>(cycles);
    return {n * config.nominal_cycle_time / p.freq_scale,
            n * config.nominal_cycle_energy * p.voltage_scale * p.voltage_scale};
}

TransitionCost transition(PowerState current, PowerState target, const PsmConfig& config) noexcept {
    return config.cost(current, target);
}

double idle_power(PowerState state, const PsmConfig& config) noexcept {
    if (state == PowerState::Off) return 0.0;
    return config.at(state).idle_power;
}

ValidationReport validate(const PsmConfig& config) {
    ValidationReport r;
    auto err = [&](std::string m) { r.errors.push_back(std::move(m)); };
    auto name = [](PowerState s) { return std::string(to_string(s)); };

    if (!(config.nominal_cycle_time > 0.0)) err("psm.nominal_cycle_time must be > 0");
    if (!(config.nominal_cycle_energy > 0.0)) err("psm.nominal_cycle_energy must be > 0");

    for (auto s : kOnStates) {
        const auto& p = config.at(s);
        if (!(p.voltage_scale > 0.0 && p.voltage_scale <= 1.0))
            err("psm." + name(s) + ".voltage_scale must be in (0, 1]");
        if (!(p.freq_scale > 0.0 && p.freq_scale <= 1.0))
            err("psm." + name(s) + ".freq_scale must be in (0, 1]");
    }
    if (config.at(PowerState::ON1).voltage_scale != 1.0 || config.at(PowerState::ON1).freq_scale != 1.0)
        err("psm.ON1 must be the nominal point (voltage_scale = freq_scale = 1)");
    for (std::size_t i = 1; i < kOnStates.size(); ++i) {
        const auto& hi = config.at(kOnStates[i - 1]);
        const auto& lo = config.at(kOnStates[i]);
        if (!(lo.voltage_scale < hi.voltage_scale) || !(lo.freq_scale < hi.freq_scale))
            err("psm." + name(kOnStates[i]) + " scales must be strictly below " +
                name(kOnStates[i - 1]));
    }
    for (std::size_t i = 1; i < kSleepStates.size(); ++i) {
        if (!(config.at(kSleepStates[i]).idle_power < config.at(kSleepStates[i - 1]).idle_power))
            err("psm." + name(kSleepStates[i]) + ".idle_power must be strictly below " +
                name(kSleepStates[i - 1]));
    }
    for (auto s : kAllPowerStates) {
        if (config.at(s).idle_power < 0.0) err("psm." + name(s) + ".idle_power must be >= 0");
    }
    if (config.at(PowerState::Off).idle_power != 0.0) err("psm.Off.idle_power must be 0");

    for (auto a : kAllPowerStates) {
        for (auto b : kAllPowerStates) {
            const auto& c = config.cost(a, b);
            if (a == b && (c.delay != 0.0 || c.energy != 0.0))
                err("psm transition " + name(a) + "->" + name(b) + " must be zero");
            if (c.delay < 0.0 || c.energy < 0.0 || !std::isfinite(c.delay) || !std::isfinite(c.energy))
                err("psm transition " + name(a) + "->" + name(b) + " must be finite and >= 0");
        }
    }
    for (std::size_t i = 1; i < kSleepStates.size(); ++i) {
        const auto& shallow = config.cost(kSleepStates[i - 1], PowerState::ON1);
        const auto& deep = config.cost(kSleepStates[i], PowerState::ON1);
        if (!(deep.delay > shallow.delay) || !(deep.energy > shallow.energy))
            err("psm wake cost " + name(kSleepStates[i]) + "->ON1 must exceed " +
                name(kSleepStates[i - 1]) + "->ON1 in delay and energy");
    }

    for (auto a : kAllPowerStates) {
        for (auto b : kAllPowerStates) {
            for (auto c : kAllPowerStates) {
                if (config.cost(a, c).delay >
                    config.cost(a, b).delay + config.cost(b, c).delay + 1e-15) {
                    r.warnings.push_back("psm transition delay " + name(a) + "->" + name(c) +
                                         " exceeds the path through " + name(b));
                }
            }
        }
    }
    return r;
}

}  // namespace dpm
