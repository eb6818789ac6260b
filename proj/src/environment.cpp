#include "dpm/environment.hpp"

#include "dpm/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dpm {

namespace {
constexpr std::array<std::string_view, 6> kBatteryNames = {"Empty", "Low",  "Medium",
                                                           "High",  "Full", "PowerSupply"};
constexpr std::array<std::string_view, 3> kTempNames = {"Low", "Medium", "High"};
}  // namespace

std::string_view to_string(BatteryClass c) noexcept {
    return kBatteryNames[static_cast<std::size_t>(c)];
}

std::string_view to_string(TempClass c) noexcept { return kTempNames[static_cast<std::size_t>(c)]; }

std::optional<BatteryClass> parse_battery_class(std::string_view name) noexcept {
    for (auto c : kAllBatteryClasses) {
        if (to_string(c) == name) return c;
    }
    return std::nullopt;
}

Battery drain(Battery battery, double energy) {
    if (energy < 0.0) throw NegativeEnergy("cannot drain negative energy " + std::to_string(energy));
    if (battery.source == BatterySource::PowerSupply) return battery;
    battery.charge = std::max(0.0, battery.charge - energy);
    return battery;
}

BatteryClass classify_battery(const Battery& battery, const ClassThresholds& thresholds) noexcept {
    if (battery.source == BatterySource::PowerSupply) return BatteryClass::PowerSupply;
    const double f = battery.charge / battery.capacity;
    const auto& b = thresholds.battery_bounds;
    if (f < b[0]) return BatteryClass::Empty;
    if (f < b[1]) return BatteryClass::Low;
    if (f < b[2]) return BatteryClass::Medium;
    if (f < b[3]) return BatteryClass::High;
    return BatteryClass::Full;
}

double mid_band_fraction(BatteryClass c, const ClassThresholds& thresholds) {
    const auto& b = thresholds.battery_bounds;
    switch (c) {
        case BatteryClass::Empty: return b[0] / 2.0;
        case BatteryClass::Low: return (b[0] + b[1]) / 2.0;
        case BatteryClass::Medium: return (b[1] + b[2]) / 2.0;
        case BatteryClass::High: return (b[2] + b[3]) / 2.0;
        case BatteryClass::Full: return (b[3] + 1.0) / 2.0;
        case BatteryClass::PowerSupply: break;
    }
    throw ConfigInvalid("PowerSupply is a source, not a charge band");
}

ThermalNode step_temperature(ThermalNode node, double power, double dt) {
    if (dt > node.stability_bound()) {
        throw UnstableStep("thermal step " + std::to_string(dt) + " s exceeds stability bound " +
                           std::to_string(node.stability_bound()) + " s");
    }
    const double r = node.effective_resistance();
    const double dT = power / node.c_th - (node.temperature - node.ambient) / (r * node.c_th);
    node.temperature += dT * dt;
    return node;
}

ThermalNode advance_temperature(ThermalNode node, double power, double duration) {
    if (!(duration > 0.0)) return node;
    const double max_step = node.time_constant() / 20.0;
    const auto steps = static_cast<std::size_t>(std::ceil(duration / max_step));
    const double dt = duration / static_cast<double>(std::max<std::size_t>(steps, 1));
    for (std::size_t i = 0; i < std::max<std::size_t>(steps, 1); ++i) {
        node = step_temperature(node, power, dt);
    }
    return node;
}

TempClass classify_temperature(const ThermalNode& node, const ClassThresholds& thresholds) noexcept {
    if (node.temperature < thresholds.temp_bounds[0]) return TempClass::Low;
    if (node.temperature < thresholds.temp_bounds[1]) return TempClass::Medium;
    return TempClass::High;
}

ThermalNode set_fan(ThermalNode node, bool on) noexcept {
    node.fan_on = on;
    return node;
}

}  // namespace dpm
