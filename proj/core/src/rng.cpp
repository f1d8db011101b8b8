#include "llr/rng.hpp"

#include <cmath>
#include <numbers>

namespace llr {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox_round(const std::array<std::uint32_t, 4>& c,
                                                 const std::array<std::uint32_t, 2>& k) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

// Window-relative coordinates are signed; recentre them into u32 space.
inline std::uint32_t encode_coord(std::int64_t v) {
    return static_cast<std::uint32_t>(v + (std::int64_t{1} << 31));
}

} // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 9; ++round) {
        counter = philox_round(counter, key);
        key[0] += kPhiloxW0;
        key[1] += kPhiloxW1;
    }
    return philox_round(counter, key);
}

std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t k) {
    return mix64(seed + (k + 1) * 0x9E3779B97F4A7C15ull);
}

double u64_to_unit(std::uint64_t w) {
    return static_cast<double>(w >> 11) * 0x1.0p-53;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint32_t stream)
    : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
      stream_(stream) {}

double CounterRng::uniform01(std::int64_t a, std::int64_t b, std::uint32_t extra) const {
    const auto r = philox4x32({stream_, encode_coord(a), encode_coord(b), extra}, key_);
    return u64_to_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
}

double CounterRng::normal(std::int64_t a, std::int64_t b, std::uint32_t extra) const {
    const auto r = philox4x32({stream_, encode_coord(a), encode_coord(b), extra}, key_);
    const double u1 = 1.0 - u64_to_unit((static_cast<std::uint64_t>(r[0]) << 32) | r[1]);
    const double u2 = u64_to_unit((static_cast<std::uint64_t>(r[2]) << 32) | r[3]);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace llr
