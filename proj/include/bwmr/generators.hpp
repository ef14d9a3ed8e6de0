#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bwmr/types.hpp"

namespace bwmr {

enum class SyntheticKind { zeros, ramp, smooth_noise };

[[nodiscard]] SyntheticKind parse_synthetic(const std::string& name);
[[nodiscard]] const char* synthetic_name(SyntheticKind kind) noexcept;

/// Deterministic synthetic image: every voxel value is a pure function of
/// (kind, seed, coordinate), so blocks can be produced in any order and the
/// exact volume can be regenerated later for verification.
///
///   zeros        constant 0
///   ramp         linear voxel index mod 512 (truncated to the data type)
///   smooth-noise a slowly varying ramp plus seeded uniform noise of
///                amplitude 64 with a 4-voxel grain along X, scaled to the
///                data type; high bytes vary slowly so byte shuffling has
///                something to win
class SyntheticImage {
public:
    SyntheticImage(SyntheticKind kind, std::uint64_t seed, const Size5D& image_size,
                   DataType type);

    /// Value at a global coordinate, before the data-type cast. Integer
    /// types receive the floor; f32 receives value/65535.
    [[nodiscard]] double value(std::uint64_t x, std::uint64_t y, std::uint64_t z,
                               std::uint64_t c, std::uint64_t t) const;

    /// Fills one caller block (full declared size, zero padding beyond the
    /// image) in the given memory order.
    void fill_block(const BlockIndex5D& index, const Size5D& block_size,
                    const DimensionSequence5D& sequence,
                    std::span<std::byte> out) const;

    /// Whole image, X-fastest (X,Y,Z,C,T) order. Intended for small volumes.
    [[nodiscard]] std::vector<std::byte> generate_volume() const;

    [[nodiscard]] const Size5D& image_size() const noexcept { return size_; }
    [[nodiscard]] DataType data_type() const noexcept { return type_; }

private:
    [[nodiscard]] std::uint64_t raw_u16(std::uint64_t x, std::uint64_t y,
                                        std::uint64_t z, std::uint64_t c,
                                        std::uint64_t t) const;

    SyntheticKind kind_;
    std::uint64_t seed_;
    Size5D size_;
    DataType type_;
};

} // namespace bwmr
