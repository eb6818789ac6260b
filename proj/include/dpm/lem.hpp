#pragma once

#include "dpm/environment.hpp"
#include "dpm/psm.hpp"
#include "dpm/task.hpp"

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace dpm {

/// Bit set over the values of one classification axis; an all-ones mask is
/// the "-" wildcard of the rule table.
struct ClassMask {
    std::uint8_t bits = 0xFF;

    static constexpr ClassMask any() noexcept { return {0xFF}; }
    static constexpr ClassMask none() noexcept { return {0}; }

    template <typename E>
    constexpr bool contains(E value) const noexcept {
        return (bits >> static_cast<unsigned>(value)) & 1U;
    }
    template <typename E>
    constexpr ClassMask& add(E value) noexcept {
        bits |= static_cast<std::uint8_t>(1U << static_cast<unsigned>(value));
        return *this;
    }
    constexpr bool is_any() const noexcept { return bits == 0xFF; }

    friend bool operator==(const ClassMask&, const ClassMask&) = default;
};

struct Rule {
    ClassMask priority;
    ClassMask battery;
    ClassMask temperature;
    PowerState result = PowerState::ON4;
};

/// Ordered first-match rule list with a fallback for uncovered inputs.
struct RuleTable {
    std::vector<Rule> rules;
    PowerState fallback = PowerState::ON4;
};

/// The power state selection table, rows in printed order, fallback ON4.
RuleTable default_rule_table();

/// Symbolic rule row, e.g. {"H,M,L", "E", "-", "SL1"}. Battery symbols are
/// E/L/M/H/F/PS, temperature L/M/H, priority V/H/M/L.
struct RuleText {
    std::string priority;
    std::string battery;
    std::string temperature;
    std::string state;
};

/// Throws ConfigInvalid naming the offending field on malformed input.
Rule parse_rule(const RuleText& text);
RuleText format_rule(const Rule& rule);

/// Indices of rows that can never fire under first-match evaluation.
std::vector<std::size_t> shadowed_rules(const RuleTable& table);

PowerState select_power_state(PriorityClass priority, BatteryClass battery, TempClass temperature,
                              const RuleTable& table) noexcept;

struct Forecast {
    BatteryClass battery_class = BatteryClass::Full;
    TempClass temp_class = TempClass::Low;

    friend bool operator==(const Forecast&, const Forecast&) = default;
};

/// Everything the LEM sees about the SoC when a task request arrives.
struct LemView {
    const Battery& battery;
    const ThermalNode& node;
    double others_energy;  // J requested by the other IPs, from the GEM
    const PsmConfig& psm;
    const ClassThresholds& thresholds;
};

/// Battery and temperature classes expected once the task has run in
/// `candidate`, charging the task and the other IPs' energy.
Forecast forecast_end_of_task(const Task& task, PowerState candidate, const LemView& view);

/// Forced SL1 when the GEM withholds its enable. Otherwise forecast at ON1,
/// select, and if that picked another ON state forecast once more with it;
/// the second selection is final.
PowerState decide_task_state(const Task& task, bool gem_enable, const RuleTable& table,
                             const LemView& view);

inline constexpr double kInfiniteTime = std::numeric_limits<double>::infinity();

/// Minimum idle length for which idle -> sleep -> idle dissipates less than
/// staying in `idle_state`. Returns kInfiniteTime when sleeping never pays.
double break_even_time(PowerState idle_state, PowerState sleep_state, const PsmConfig& config);

/// Lowest-power sleep (or Off) state whose break-even time fits the predicted
/// idle; `idle_state` when none does.
PowerState choose_idle_state(double predicted_idle, PowerState idle_state, const PsmConfig& config,
                             bool allow_off);

/// Exponentially weighted idle-time predictor seeded by its first sample.
struct IdlePredictor {
    double alpha = 0.5;
    double predicted = 0.0;
    bool initialized = false;
};

struct Prediction {
    IdlePredictor predictor;
    double predicted;
};

Prediction predict_idle(IdlePredictor predictor, double observed_idle);

double task_energy_estimate(const Task& task, PowerState state, const PsmConfig& config);

}  // namespace dpm
