#pragma once

#include <array>
#include <cstdint>

namespace llr {

/// Philox-4x32-10 keyed counter permutation (Salmon, Moraes, Dror and Shaw,
/// "Parallel random numbers: as easy as 1, 2, 3", 2011). Every output block
/// is a pure function of (counter, key), so draws can be indexed directly by
/// lattice coordinates and are identical under any evaluation order or
/// thread count.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// k-th derived seed of `seed`. Used to split replication substreams off a
/// base seed: replication r of an experiment runs with split_seed(base, r).
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t k);

/// Maps a 64-bit word to [0, 1) with 53 significant bits.
double u64_to_unit(std::uint64_t w);

/// Counter-indexed scalar draws tied to a (seed, stream) pair. `stream`
/// separates independent noise fields sharing one seed; (a, b) index a
/// lattice site in window-relative coordinates (may be negative); `extra`
/// distinguishes repeated draws at one site, e.g. a sweep index.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint32_t stream);

    /// Uniform on [0, 1).
    double uniform01(std::int64_t a, std::int64_t b, std::uint32_t extra = 0) const;

    /// Standard normal via Box-Muller on one counter block.
    double normal(std::int64_t a, std::int64_t b, std::uint32_t extra = 0) const;

private:
    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_;
};

} // namespace llr
