#pragma once

#include <array>
#include <cstdint>

namespace blq {

// Philox4x32-10 counter-based generator (Salmon et al. 2011 construction).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key);

// Standard normal draw addressed by (key, path, step, component); the same
// address always yields the same value, independent of evaluation order.
double counter_normal(std::uint64_t key, std::uint64_t path, std::uint32_t step, std::uint32_t component);

}  // namespace blq
