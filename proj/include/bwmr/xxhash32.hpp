#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace bwmr {

/// 32-bit xxHash. The LZ4 frame format uses it for the header-checksum byte
/// and the optional content checksum.
[[nodiscard]] std::uint32_t xxhash32(std::span<const std::byte> data,
                                     std::uint32_t seed = 0) noexcept;

inline std::uint32_t xxhash32(const void* data, std::size_t size,
                              std::uint32_t seed = 0) noexcept {
    return xxhash32(std::span(static_cast<const std::byte*>(data), size), seed);
}

} // namespace bwmr
