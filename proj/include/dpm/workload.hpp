#pragma once

#include "dpm/environment.hpp"
#include "dpm/gem.hpp"
#include "dpm/lem.hpp"
#include "dpm/psm.hpp"
#include "dpm/task.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dpm {

/// SplitMix64 (Steele, Lea, Flood 2014). The stream is fully specified by
/// its 64-bit state so task sequences are portable across implementations:
///   state += 0x9E3779B97F4A7C15
///   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
///   z = (z ^ (z >> 27)) * 0x94D049BB133111EB; return z ^ (z >> 31)
class SplitMix64 {
public:
    explicit constexpr SplitMix64(std::uint64_t seed = 0) noexcept : state_(seed) {}

    constexpr std::uint64_t next() noexcept {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Top 53 bits scaled to [0, 1).
    constexpr double uniform01() noexcept {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    constexpr std::uint64_t state() const noexcept { return state_; }

    friend bool operator==(const SplitMix64&, const SplitMix64&) = default;

private:
    std::uint64_t state_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view text) noexcept;

enum class Activity : std::uint8_t { High, Low, Custom };

std::string_view to_string(Activity a) noexcept;

struct TrafficGenerator {
    std::string ip_id;
    int static_priority = 1;
    Activity activity = Activity::High;
    std::uint64_t cycles_min = 10'000;
    std::uint64_t cycles_max = 100'000;
    double idle_min = 1e-4;  // s
    double idle_max = 1e-3;  // s
    /// Weights indexed by PriorityClass (L, M, H, V); sum to 1.
    std::array<double, 4> priority_mix = {0.25, 0.25, 0.25, 0.25};
    std::uint64_t seed = 0;
};

/// Idle-gap bounds for the two named activity levels.
struct IdleBounds {
    double min;
    double max;
};
IdleBounds activity_idle_bounds(Activity a);

/// Per-generator stream seed: master ^ fnv1a64(ip_id) ^ generator.seed.
std::uint64_t stream_seed(std::uint64_t master_seed, const TrafficGenerator& generator) noexcept;

struct NextTask {
    Task task;
    double idle_gap;
};

/// Draws idle gap, cycle count and priority (in that order) and places the
/// arrival at now + idle_gap.
NextTask next_task(const TrafficGenerator& generator, SplitMix64& rng, double now,
                   std::uint64_t task_id);

struct EnvironmentConfig {
    Battery battery{1000.0, 900.0, BatterySource::OnBattery};
    ThermalNode thermal{};
};

struct LemConfig {
    double idle_alpha = 0.5;
    /// Relative amplitude of multiplicative noise on the energy estimate the
    /// LEM discloses to the GEM. 0 means exact.
    double estimate_noise = 0.0;
};

struct Scenario {
    std::string name;
    std::vector<TrafficGenerator> generators;
    GemConfig gem;
    PsmConfig psm = default_psm_config();
    EnvironmentConfig environment;
    ClassThresholds thresholds;
    RuleTable rules = default_rule_table();
    LemConfig lem;
    double duration = 1.0;  // s
    std::uint64_t seed = 1;
    bool allow_off = true;

    std::vector<IpRegistration> registrations() const;
};

/// Names of the built-in experiment presets, in report order.
const std::vector<std::string>& preset_names();

/// Exact embedded JSON document of a preset. Throws UnknownScenario.
std::string_view preset_document(std::string_view name);

/// Parsed preset. Throws UnknownScenario.
Scenario scenario_preset(std::string_view name);

}  // namespace dpm
