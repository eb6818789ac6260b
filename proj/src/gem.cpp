#include "dpm/gem.hpp"

#include "dpm/errors.hpp"

#include <algorithm>

namespace dpm {

GemBranch gem_branch(BatteryClass battery, TempClass temperature) noexcept {
    const bool cool = temperature == TempClass::Low || temperature == TempClass::Medium;
    if (!cool) return GemBranch::Shutdown;
    if (battery == BatteryClass::Empty || battery == BatteryClass::Low) return GemBranch::HighPriorityOnly;
    return GemBranch::EnableAll;
}

GemDecision arbitrate(BatteryClass battery, TempClass temperature,
                      std::span<const std::string> requesters,
                      std::span<const IpRegistration> registrations, const GemConfig& config) {
    GemDecision d;
    const auto branch = gem_branch(battery, temperature);
    d.fan_on = branch == GemBranch::Shutdown;
    for (const auto& id : requesters) {
        const auto it = std::find_if(registrations.begin(), registrations.end(),
                                     [&](const IpRegistration& r) { return r.ip_id == id; });
        if (it == registrations.end()) throw UnknownIp("GEM request from unregistered IP '" + id + "'");
        bool enable = false;
        switch (branch) {
            case GemBranch::EnableAll: enable = true; break;
            case GemBranch::HighPriorityOnly:
                enable = it->static_priority <= config.high_priority_threshold;
                break;
            case GemBranch::Shutdown: enable = false; break;
        }
        (enable ? d.enabled : d.forced_sleep1).push_back(id);
    }
    return d;
}

EnergyLedger::EnergyLedger(std::span<const IpRegistration> registrations) {
    for (const auto& r : registrations) registered_.push_back(r.ip_id);
}

void EnergyLedger::require_registered(const std::string& ip_id) const {
    if (std::find(registered_.begin(), registered_.end(), ip_id) == registered_.end())
        throw UnknownIp("unregistered IP '" + ip_id + "'");
}

void EnergyLedger::post_estimate(const std::string& ip_id, double energy) {
    require_registered(ip_id);
    if (energy < 0.0) throw NegativeEnergy("negative energy estimate for '" + ip_id + "'");
    entries_[ip_id] = energy;
}

void EnergyLedger::clear_estimate(const std::string& ip_id) { entries_.erase(ip_id); }

double EnergyLedger::others_energy(const std::string& ip_id) const {
    require_registered(ip_id);
    double sum = 0.0;
    for (const auto& [id, e] : entries_) {
        if (id != ip_id) sum += e;
    }
    return sum;
}

}  // namespace dpm
