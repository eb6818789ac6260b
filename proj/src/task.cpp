#include "dpm/task.hpp"

namespace dpm {

namespace {
constexpr std::array<std::string_view, 4> kPriorityNames = {"L", "M", "H", "V"};
}

std::string_view to_string(PriorityClass p) noexcept {
    return kPriorityNames[static_cast<std::size_t>(p)];
}

std::optional<PriorityClass> parse_priority(std::string_view text) noexcept {
    for (auto p : kAllPriorities) {
        if (to_string(p) == text) return p;
    }
    return std::nullopt;
}

}  // namespace dpm
