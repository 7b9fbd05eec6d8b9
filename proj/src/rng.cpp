#include "fptsim/rng.hpp"

namespace fptsim {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

// Maps 53 random bits to (0, 1); never returns 0 or 1.
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
    return (static_cast<double>(static_cast<std::int64_t>(bits)) + 0.5) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    std::uint32_t c0 = ctr[0], c1 = ctr[1], c2 = ctr[2], c3 = ctr[3];
    std::uint32_t k0 = key[0], k1 = key[1];
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c0, hi0, lo0);
        mulhilo(kPhiloxM1, c2, hi1, lo1);
        c0 = hi1 ^ c1 ^ k0;
        c1 = lo1;
        c2 = hi0 ^ c3 ^ k1;
        c3 = lo0;
        k0 += kPhiloxW0;
        k1 += kPhiloxW1;
    }
    return {c0, c1, c2, c3};
}

UniformPair uniform_pair(std::uint64_t seed, std::uint64_t index) {
    const std::array<std::uint32_t, 4> ctr = {static_cast<std::uint32_t>(index),
                                              static_cast<std::uint32_t>(index >> 32), 0u, 0u};
    const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                              static_cast<std::uint32_t>(seed >> 32)};
    const auto out = philox4x32(ctr, key);
    return {to_open_unit(out[0], out[1]), to_open_unit(out[2], out[3])};
}

void uniform_pairs(std::uint64_t seed, std::uint64_t first, std::size_t count, double* out) {
    constexpr std::size_t kLanes = 8;
    const auto seed_lo = static_cast<std::uint32_t>(seed);
    const auto seed_hi = static_cast<std::uint32_t>(seed >> 32);
    std::size_t done = 0;
    // Independent lanes let the multiplies overlap.
    for (; done + kLanes <= count; done += kLanes) {
        std::uint32_t c0[kLanes], c1[kLanes], c2[kLanes], c3[kLanes];
        for (std::size_t l = 0; l < kLanes; ++l) {
            const std::uint64_t idx = first + done + l;
            c0[l] = static_cast<std::uint32_t>(idx);
            c1[l] = static_cast<std::uint32_t>(idx >> 32);
            c2[l] = 0;
            c3[l] = 0;
        }
        std::uint32_t k0 = seed_lo, k1 = seed_hi;
        for (int round = 0; round < 10; ++round) {
            for (std::size_t l = 0; l < kLanes; ++l) {
                const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c0[l];
                const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c2[l];
                const auto n0 = static_cast<std::uint32_t>(p1 >> 32) ^ c1[l] ^ k0;
                const auto n2 = static_cast<std::uint32_t>(p0 >> 32) ^ c3[l] ^ k1;
                c1[l] = static_cast<std::uint32_t>(p1);
                c3[l] = static_cast<std::uint32_t>(p0);
                c0[l] = n0;
                c2[l] = n2;
            }
            k0 += kPhiloxW0;
            k1 += kPhiloxW1;
        }
        for (std::size_t l = 0; l < kLanes; ++l) {
            out[2 * (done + l)] = to_open_unit(c0[l], c1[l]);
            out[2 * (done + l) + 1] = to_open_unit(c2[l], c3[l]);
        }
    }
    for (; done < count; ++done) {
        const UniformPair u = uniform_pair(seed, first + done);
        out[2 * done] = u.first;
        out[2 * done + 1] = u.second;
    }
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t rep) {
    return mix64(master_seed ^ mix64(rep + 0x632BE59BD9B4E019ull));
}

}  // namespace fptsim
