#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sphfit {

/// Independent generator for the named sub-stream of a run seed. The same
/// (seed, name, index) always yields the same sequence.
std::mt19937_64 make_stream(std::uint64_t seed, std::string_view name,
                            std::uint64_t index = 0);

}  // namespace sphfit
