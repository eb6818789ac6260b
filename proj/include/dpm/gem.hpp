#pragma once

#include "dpm/environment.hpp"

#include <map>
#include <span>
#include <string>
#include <vector>

namespace dpm {

struct IpRegistration {
    std::string ip_id;
    int static_priority = 1;  // 1 = highest
};

struct GemConfig {
    bool present = false;
    /// IPs with static_priority <= threshold keep running on a weak battery.
    int high_priority_threshold = 2;
};

enum class GemBranch {
    EnableAll,         // resources plentiful, temperature Low/Medium
    HighPriorityOnly,  // battery Empty/Low, temperature Low/Medium
    Shutdown,          // otherwise: nobody runs, fan on
};

GemBranch gem_branch(BatteryClass battery, TempClass temperature) noexcept;

struct GemDecision {
    std::vector<std::string> enabled;
    std::vector<std::string> forced_sleep1;
    bool fan_on = false;
};

/// Routes the current resource classes to one of the three branches and
/// partitions `requesters` accordingly. Throws UnknownIp for unregistered ids.
GemDecision arbitrate(BatteryClass battery, TempClass temperature,
                      std::span<const std::string> requesters,
                      std::span<const IpRegistration> registrations, const GemConfig& config);

/// Pending per-IP energy estimates disclosed to the other LEMs.
class EnergyLedger {
public:
    explicit EnergyLedger(std::span<const IpRegistration> registrations);

    void post_estimate(const std::string& ip_id, double energy);
    void clear_estimate(const std::string& ip_id);
    /// Sum of every entry except `ip_id`'s own.
    double others_energy(const std::string& ip_id) const;

    const std::map<std::string, double>& entries() const noexcept { return entries_; }

    friend bool operator==(const EnergyLedger&, const EnergyLedger&) = default;

private:
    void require_registered(const std::string& ip_id) const;

    std::vector<std::string> registered_;
    std::map<std::string, double> entries_;
};

}  // namespace dpm
