#include "dpm/workload.hpp"

#include "dpm/errors.hpp"
#include "dpm/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace dpm {

std::uint64_t fnv1a64(std::string_view text) noexcept {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

std::string_view to_string(Activity a) noexcept {
    switch (a) {
        case Activity::High: return "high";
        case Activity::Low: return "low";
        case Activity::Custom: return "custom";
    }
    return "custom";
}

IdleBounds activity_idle_bounds(Activity a) {
    switch (a) {
        case Activity::High: return {1e-4, 1e-3};
        case Activity::Low: return {2e-3, 20e-3};
        case Activity::Custom: break;
    }
    throw ConfigInvalid("custom activity has no default idle bounds");
}

std::uint64_t stream_seed(std::uint64_t master_seed, const TrafficGenerator& generator) noexcept {
    return master_seed ^ fnv1a64(generator.ip_id) ^ generator.seed;
}

NextTask next_task(const TrafficGenerator& g, SplitMix64& rng, double now, std::uint64_t task_id) {
    const double gap = g.idle_min + rng.uniform01() * (g.idle_max - g.idle_min);

    const std::uint64_t span = g.cycles_max - g.cycles_min + 1;
    auto offset = static_cast<std::uint64_t>(rng.uniform01() * static_cast<double>(span));
    const std::uint64_t cycles = g.cycles_min + std::min(offset, span - 1);

    const double u = rng.uniform01();
    double acc = 0.0;
    PriorityClass priority = PriorityClass::L;
    for (auto p : kAllPriorities) {
        const double w = g.priority_mix[static_cast<std::size_t>(p)];
        if (w <= 0.0) continue;
        priority = p;
        acc += w;
        if (u < acc) break;
    }
    return {Task{task_id, cycles, priority, now + gap}, gap};
}

std::vector<IpRegistration> Scenario::registrations() const {
    std::vector<IpRegistration> out;
    out.reserve(generators.size());
    for (const auto& g : generators) out.push_back({g.ip_id, g.static_priority});
    return out;
}

namespace {

// Compact documents; sections left out take the library defaults.
constexpr std::string_view kPresetA1 = R"({
  "name": "A1",
  "seed": 1,
  "duration": 4.0,
  "allow_off": true,
  "gem": {"present": false},
  "environment": {
    "battery": {"capacity": 1000.0, "initial_class": "Full", "source": "battery"},
    "thermal": {"ambient": 25.0, "initial": 25.0, "r_th": 10.0, "c_th": 0.01, "fan_factor": 0.5}
  },
  "generators": [
    {"ip": "ip1", "static_priority": 1, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.25, "M": 0.25, "H": 0.25, "V": 0.25}, "seed": 0}
  ]
}
)";

constexpr std::string_view kPresetA2 = R"({
  "name": "A2",
  "seed": 1,
  "duration": 4.0,
  "allow_off": true,
  "gem": {"present": false},
  "environment": {
    "battery": {"capacity": 1000.0, "initial_class": "Low", "source": "battery"},
    "thermal": {"ambient": 25.0, "initial": 25.0, "r_th": 10.0, "c_th": 0.01, "fan_factor": 0.5}
  },
  "generators": [
    {"ip": "ip1", "static_priority": 1, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.25, "M": 0.25, "H": 0.25, "V": 0.25}, "seed": 0}
  ]
}
)";

constexpr std::string_view kPresetA3 = R"({
  "name": "A3",
  "seed": 1,
  "duration": 4.0,
  "allow_off": true,
  "gem": {"present": false},
  "environment": {
    "battery": {"capacity": 1000.0, "initial_class": "Full", "source": "battery"},
    "thermal": {"ambient": 25.0, "initial": 95.0, "r_th": 10.0, "c_th": 0.01, "fan_factor": 0.5}
  },
  "generators": [
    {"ip": "ip1", "static_priority": 1, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.25, "M": 0.25, "H": 0.25, "V": 0.25}, "seed": 0}
  ]
}
)";

constexpr std::string_view kPresetA4 = R"({
  "name": "A4",
  "seed": 1,
  "duration": 4.0,
  "allow_off": true,
  "gem": {"present": false},
  "environment": {
    "battery": {"capacity": 1000.0, "initial_class": "Low", "source": "battery"},
    "thermal": {"ambient": 25.0, "initial": 95.0, "r_th": 10.0, "c_th": 0.01, "fan_factor": 0.5}
  },
  "generators": [
    {"ip": "ip1", "static_priority": 1, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.25, "M": 0.25, "H": 0.25, "V": 0.25}, "seed": 0}
  ]
}
)";

constexpr std::string_view kPresetB = R"({
  "name": "B",
  "seed": 1,
  "duration": 4.0,
  "allow_off": false,
  "gem": {"present": true, "high_priority_threshold": 2},
  "environment": {
    "battery": {"capacity": 1000.0, "initial_class": "Low", "source": "battery"},
    "thermal": {"ambient": 25.0, "initial": 25.0, "r_th": 10.0, "c_th": 0.01, "fan_factor": 0.5}
  },
  "generators": [
    {"ip": "ip1", "static_priority": 1, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.15, "M": 0.15, "H": 0.15, "V": 0.55}, "seed": 0},
    {"ip": "ip2", "static_priority": 2, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.15, "M": 0.15, "H": 0.55, "V": 0.15}, "seed": 0},
    {"ip": "ip3", "static_priority": 3, "activity": "low", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.15, "M": 0.55, "H": 0.15, "V": 0.15}, "seed": 0},
    {"ip": "ip4", "static_priority": 4, "activity": "low", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.55, "M": 0.15, "H": 0.15, "V": 0.15}, "seed": 0}
  ]
}
)";

constexpr std::string_view kPresetC = R"({
  "name": "C",
  "seed": 1,
  "duration": 4.0,
  "allow_off": false,
  "gem": {"present": true, "high_priority_threshold": 2},
  "environment": {
    "battery": {"capacity": 1000.0, "initial_class": "Low", "source": "battery"},
    "thermal": {"ambient": 25.0, "initial": 25.0, "r_th": 10.0, "c_th": 0.01, "fan_factor": 0.5}
  },
  "generators": [
    {"ip": "ip1", "static_priority": 1, "activity": "low", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.15, "M": 0.15, "H": 0.15, "V": 0.55}, "seed": 0},
    {"ip": "ip2", "static_priority": 2, "activity": "low", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.15, "M": 0.15, "H": 0.55, "V": 0.15}, "seed": 0},
    {"ip": "ip3", "static_priority": 3, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.15, "M": 0.55, "H": 0.15, "V": 0.15}, "seed": 0},
    {"ip": "ip4", "static_priority": 4, "activity": "high", "cycles": [10000, 100000],
     "priority_mix": {"L": 0.55, "M": 0.15, "H": 0.15, "V": 0.15}, "seed": 0}
  ]
}
)";

const std::map<std::string_view, std::string_view>& preset_table() {
    static const std::map<std::string_view, std::string_view> table = {
        {"A1", kPresetA1}, {"A2", kPresetA2}, {"A3", kPresetA3},
        {"A4", kPresetA4}, {"B", kPresetB},   {"C", kPresetC},
    };
    return table;
}

}  // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = {"A1", "A2", "A3", "A4", "B", "C"};
    return names;
}

std::string_view preset_document(std::string_view name) {
    const auto& table = preset_table();
    const auto it = table.find(name);
    if (it == table.end()) throw UnknownScenario("unknown scenario preset '" + std::string(name) + "'");
    return it->second;
}

Scenario scenario_preset(std::string_view name) { return scenario_from_json(preset_document(name)); }

}  // namespace dpm
