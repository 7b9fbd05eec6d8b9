#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

namespace fptsim {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// The output block is a pure function of (key, counter), so any draw of a
/// stream can be computed without touching the others.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Two independent uniforms on the open interval (0, 1) for draw `index`
/// of the stream identified by `seed`.
struct UniformPair {
    double first;
    double second;
};
UniformPair uniform_pair(std::uint64_t seed, std::uint64_t index);

/// Uniform pairs for blocks first, first+1, ..., first+count-1, written
/// interleaved (first, second, first, second, ...) to `out[0 .. 2*count)`.
/// Identical to repeated uniform_pair calls.
void uniform_pairs(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Seed of replication `rep` under `master_seed`; independent of how
/// replications are distributed over workers.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t rep);

}  // namespace fptsim
