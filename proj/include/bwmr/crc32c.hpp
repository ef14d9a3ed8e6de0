#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace bwmr {

/// CRC32C (Castagnoli polynomial, reflected 0x82F63B78), as used by iSCSI,
/// ext4 and friends. Note this is NOT the zlib/IEEE CRC32.
[[nodiscard]] std::uint32_t crc32c(std::span<const std::byte> data,
                                   std::uint32_t seed = 0) noexcept;

inline std::uint32_t crc32c(const void* data, std::size_t size,
                            std::uint32_t seed = 0) noexcept {
    return crc32c(std::span(static_cast<const std::byte*>(data), size), seed);
}

} // namespace bwmr
