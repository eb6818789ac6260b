#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace dpm {

/// Task priority, ordered L < M < H < V.
enum class PriorityClass : std::uint8_t { L, M, H, V };
inline constexpr std::array<PriorityClass, 4> kAllPriorities = {PriorityClass::L, PriorityClass::M,
                                                                PriorityClass::H, PriorityClass::V};

std::string_view to_string(PriorityClass p) noexcept;
std::optional<PriorityClass> parse_priority(std::string_view text) noexcept;

struct Task {
    std::uint64_t task_id = 0;
    std::uint64_t cycles = 0;  // work at the nominal clock
    PriorityClass priority = PriorityClass::L;
    double arrival_time = 0.0;  // s
};

}  // namespace dpm
