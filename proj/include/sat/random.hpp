#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace sat {

using Rng = std::mt19937_64;

/// Derives an independent stream from a master seed, a stream name and an
/// index (e.g. agent id). Adding a stream never perturbs the others.
inline Rng make_stream(std::uint64_t master_seed, std::string_view name, std::uint64_t index = 0) {
    std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
    for (char c : name) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                      static_cast<std::uint32_t>(h), static_cast<std::uint32_t>(h >> 32),
                      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
    return Rng(seq);
}

}  // namespace sat
