#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dpm {

enum class BatterySource : std::uint8_t { OnBattery, PowerSupply };

struct Battery {
    double capacity = 1.0;  // J
    double charge = 1.0;    // J, in [0, capacity]
    BatterySource source = BatterySource::OnBattery;
};

enum class BatteryClass : std::uint8_t { Empty, Low, Medium, High, Full, PowerSupply };
inline constexpr std::array<BatteryClass, 6> kAllBatteryClasses = {
    BatteryClass::Empty, BatteryClass::Low,  BatteryClass::Medium,
    BatteryClass::High,  BatteryClass::Full, BatteryClass::PowerSupply};

enum class TempClass : std::uint8_t { Low, Medium, High };
inline constexpr std::array<TempClass, 3> kAllTempClasses = {TempClass::Low, TempClass::Medium,
                                                             TempClass::High};

std::string_view to_string(BatteryClass c) noexcept;
std::string_view to_string(TempClass c) noexcept;
std::optional<BatteryClass> parse_battery_class(std::string_view name) noexcept;

/// Single lumped RC node for the whole chip.
struct ThermalNode {
    double temperature = 25.0;  // degC
    double ambient = 25.0;      // degC
    double r_th = 10.0;         // K/W
    double c_th = 0.01;         // J/K
    bool fan_on = false;
    double fan_factor = 0.5;  // multiplies r_th while the fan runs

    double effective_resistance() const noexcept { return fan_on ? r_th * fan_factor : r_th; }
    double time_constant() const noexcept { return effective_resistance() * c_th; }
    /// Largest explicit-Euler step accepted by step_temperature().
    double stability_bound() const noexcept { return time_constant() / 2.0; }
};

struct ClassThresholds {
    /// Ascending fractions of capacity separating Empty|Low|Medium|High|Full.
    std::array<double, 4> battery_bounds = {0.05, 0.25, 0.50, 0.80};
    /// Ascending degC bounds separating Low|Medium|High.
    std::array<double, 2> temp_bounds = {60.0, 85.0};
};

/// Linear coulomb counting. Clamps at empty; a mains-powered battery is untouched.
Battery drain(Battery battery, double energy);

BatteryClass classify_battery(const Battery& battery, const ClassThresholds& thresholds) noexcept;

/// Charge fraction at the middle of a battery band, used to seed scenarios.
double mid_band_fraction(BatteryClass c, const ClassThresholds& thresholds);

/// One explicit-Euler step of dT/dt = P/C - (T - T_amb)/(R_eff C).
ThermalNode step_temperature(ThermalNode node, double power, double dt);

/// Integrates over `duration` at constant power using equal sub-steps no
/// longer than time_constant()/20.
ThermalNode advance_temperature(ThermalNode node, double power, double duration);

TempClass classify_temperature(const ThermalNode& node, const ClassThresholds& thresholds) noexcept;

ThermalNode set_fan(ThermalNode node, bool on) noexcept;

}  // namespace dpm
