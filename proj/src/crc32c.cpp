#include "bwmr/crc32c.hpp"

#include <array>

namespace bwmr {
namespace {

constexpr std::uint32_t kPoly = 0x82F63B78u; // reflected Castagnoli

constexpr std::array<std::uint32_t, 256> make_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t crc = i;
        for (int bit = 0; bit < 8; ++bit)
            crc = (crc >> 1) ^ ((crc & 1) ? kPoly : 0);
        table[i] = crc;
    }
    return table;
}

constexpr auto kTable = make_table();

} // namespace

std::uint32_t crc32c(std::span<const std::byte> data, std::uint32_t seed) noexcept {
    std::uint32_t crc = ~seed;
    for (std::byte b : data)
        crc = kTable[(crc ^ static_cast<std::uint8_t>(b)) & 0xFF] ^ (crc >> 8);
    return ~crc;
}

} // namespace bwmr
