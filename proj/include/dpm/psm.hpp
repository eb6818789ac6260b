#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dpm {

/// ACPI-style power states. Execution states ON1..ON4 run at decreasing
/// speed and power; SL1..SL4 are progressively deeper sleep states.
enum class PowerState : std::uint8_t { Off, SL1, SL2, SL3, SL4, ON1, ON2, ON3, ON4 };

inline constexpr std::size_t kPowerStateCount = 9;

inline constexpr std::array<PowerState, kPowerStateCount> kAllPowerStates = {
    PowerState::Off, PowerState::SL1, PowerState::SL2, PowerState::SL3, PowerState::SL4,
    PowerState::ON1, PowerState::ON2, PowerState::ON3, PowerState::ON4};

inline constexpr std::array<PowerState, 4> kOnStates = {PowerState::ON1, PowerState::ON2,
                                                        PowerState::ON3, PowerState::ON4};

inline constexpr std::array<PowerState, 4> kSleepStates = {PowerState::SL1, PowerState::SL2,
                                                           PowerState::SL3, PowerState::SL4};

constexpr std::size_t index_of(PowerState s) noexcept { return static_cast<std::size_t>(s); }

constexpr bool is_on(PowerState s) noexcept {
    return s == PowerState::ON1 || s == PowerState::ON2 || s == PowerState::ON3 ||
           s == PowerState::ON4;
}

constexpr bool is_sleep(PowerState s) noexcept {
    return s == PowerState::SL1 || s == PowerState::SL2 || s == PowerState::SL3 ||
           s == PowerState::SL4;
}

std::string_view to_string(PowerState s) noexcept;
std::optional<PowerState> parse_power_state(std::string_view text) noexcept;

struct StateParams {
    double voltage_scale = 0.0;  // fraction of nominal Vdd
    double freq_scale = 0.0;     // fraction of nominal clock, 0 unless ON
    double idle_power = 0.0;     // W while resident and not executing
};

struct TransitionCost {
    double delay = 0.0;   // s
    double energy = 0.0;  // J

    friend bool operator==(const TransitionCost&, const TransitionCost&) = default;
};

/// Per-state entry/exit scalars used to generate the default transition table:
/// cost(A -> B) = exit(A) + entry(B).
struct EdgeCosts {
    TransitionCost entry;
    TransitionCost exit;
};

struct PsmConfig {
    std::array<StateParams, kPowerStateCount> params{};
    std::array<std::array<TransitionCost, kPowerStateCount>, kPowerStateCount> transitions{};
    double nominal_cycle_time = 0.0;    // s per cycle at ON1
    double nominal_cycle_energy = 0.0;  // J per cycle at ON1

    const StateParams& at(PowerState s) const noexcept { return params[index_of(s)]; }
    StateParams& at(PowerState s) noexcept { return params[index_of(s)]; }
    const TransitionCost& cost(PowerState from, PowerState to) const noexcept {
        return transitions[index_of(from)][index_of(to)];
    }
    TransitionCost& cost(PowerState from, PowerState to) noexcept {
        return transitions[index_of(from)][index_of(to)];
    }
};

/// Fills the full 9x9 transition table from per-state entry/exit costs.
/// The diagonal is always zero.
void fill_transitions(PsmConfig& config, const std::array<EdgeCosts, kPowerStateCount>& edges);

/// Entry/exit scalars backing default_psm_config().
const std::array<EdgeCosts, kPowerStateCount>& default_edge_costs();

/// 200 MHz / 2 W nominal core with the default DVFS points
/// ON1 (1.00, 1.00) ON2 (0.85, 0.80) ON3 (0.70, 0.60) ON4 (0.55, 0.40).
PsmConfig default_psm_config();

struct InstructionCost {
    double duration = 0.0;  // s
    double energy = 0.0;    // J
};

/// Time and switching energy of `cycles` instructions in an ON state:
/// duration = cycles * T_nom / f, energy = cycles * E_nom * V^2.
/// Throws NotExecutableState for Off and sleep states.
InstructionCost instruction_cost(PowerState state, std::uint64_t cycles, const PsmConfig& config);

TransitionCost transition(PowerState current, PowerState target, const PsmConfig& config) noexcept;

double idle_power(PowerState state, const PsmConfig& config) noexcept;

/// Structural checks on a PSM config. Hard violations (monotonicity, sign,
/// diagonal) are returned in `errors`; soft findings such as a delay triangle
/// inequality violation are returned in `warnings`.
struct ValidationReport {
    std::vector<std::string> errors;
    std::vector<std::string> warnings;
};
ValidationReport validate(const PsmConfig& config);

}  // namespace dpm
