#include "bwmr/xxhash32.hpp"

#include <cstring>

namespace bwmr {
namespace {

constexpr std::uint32_t kPrime1 = 2654435761u;
constexpr std::uint32_t kPrime2 = 2246822519u;
constexpr std::uint32_t kPrime3 = 3266489917u;
constexpr std::uint32_t kPrime4 = 668265263u;
constexpr std::uint32_t kPrime5 = 374761393u;

inline std::uint32_t rotl(std::uint32_t x, int r) noexcept {
    return (x << r) | (x >> (32 - r));
}

inline std::uint32_t read_u32(const std::byte* p) noexcept {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v; // little-endian host assumed; checked in tests against vectors
}

inline std::uint32_t round_step(std::uint32_t acc, std::uint32_t input) noexcept {
    acc += input * kPrime2;
    acc = rotl(acc, 13);
    acc *= kPrime1;
    return acc;
}

} // namespace

std::uint32_t xxhash32(std::span<const std::byte> data, std::uint32_t seed) noexcept {
    const std::byte* p = data.data();
    const std::byte* const end = p + data.size();
    std::uint32_t h;

    if (data.size() >= 16) {
        std::uint32_t v1 = seed + kPrime1 + kPrime2;
        std::uint32_t v2 = seed + kPrime2;
        std::uint32_t v3 = seed;
        std::uint32_t v4 = seed - kPrime1;
        const std::byte* const limit = end - 16;
        do {
            v1 = round_step(v1, read_u32(p));
            v2 = round_step(v2, read_u32(p + 4));
            v3 = round_step(v3, read_u32(p + 8));
            v4 = round_step(v4, read_u32(p + 12));
            p += 16;
        } while (p <= limit);
        h = rotl(v1, 1) + rotl(v2, 7) + rotl(v3, 12) + rotl(v4, 18);
    } else {
        h = seed + kPrime5;
    }

    h += static_cast<std::uint32_t>(data.size());

    while (p + 4 <= end) {
        h += read_u32(p) * kPrime3;
        h = rotl(h, 17) * kPrime4;
        p += 4;
    }
    while (p < end) {
        h += static_cast<std::uint8_t>(*p) * kPrime5;
        h = rotl(h, 11) * kPrime1;
        ++p;
    }

    h ^= h >> 15;
    h *= kPrime2;
    h ^= h >> 13;
    h *= kPrime3;
    h ^= h >> 16;
    return h;
}

} // namespace bwmr
