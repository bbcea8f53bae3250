#pragma once

#include <cstdint>
#include <string_view>

namespace chaoswave {

std::uint64_t fnv1a64(std::string_view text) noexcept;
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Stage seed: splitmix64(global ^ fnv1a64(tag)). Each pipeline stage draws
/// from its own stream so stages can be rerun independently.
std::uint64_t stage_seed(std::uint64_t global, std::string_view tag) noexcept;

/// Per-item seed for schedule-independent parallel work.
std::uint64_t item_seed(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace chaoswave
