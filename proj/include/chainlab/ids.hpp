#pragma once

#include <cstdint>

namespace chainlab {

// Coin amounts are integer micro-coins (1 coin = 1e6 units) so conservation
// checks are exact integer identities.
using Amount = std::int64_t;
constexpr Amount kMicroPerCoin = 1'000'000;

constexpr Amount coins(double c) {
    return static_cast<Amount>(c * static_cast<double>(kMicroPerCoin) + (c >= 0 ? 0.5 : -0.5));
}
constexpr double to_coins(Amount a) { return static_cast<double>(a) / static_cast<double>(kMicroPerCoin); }

using ActorId = std::uint32_t;
using NodeId = std::uint32_t;
constexpr ActorId kNoActor = 0xffffffffu;

} // namespace chainlab
