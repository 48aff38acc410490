#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace omnisafe {

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view s);

// Independent, reproducible streams keyed by a label: the same (seed, label)
// pair always yields the same sequence regardless of what other streams drew.
std::uint64_t stream_seed(std::uint64_t master, std::string_view label);

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t master, std::string_view label) {
  return Engine(stream_seed(master, label));
}

}  // namespace omnisafe
