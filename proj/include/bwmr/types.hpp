#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>

#include "bwmr/errors.hpp"

namespace bwmr {

// ---------------------------------------------------------------------------
// Dimension
// ---------------------------------------------------------------------------

/// The five axes of an image: three spatial, channel, time.
enum class Dim : std::uint8_t { X = 0, Y = 1, Z = 2, C = 3, T = 4 };

inline constexpr std::size_t kDimCount = 5;

inline constexpr std::array<Dim, kDimCount> kAllDims = {Dim::X, Dim::Y, Dim::Z,
                                                        Dim::C, Dim::T};

[[nodiscard]] constexpr char dim_letter(Dim d) noexcept {
    constexpr char letters[kDimCount] = {'X', 'Y', 'Z', 'C', 'T'};
    return letters[static_cast<std::size_t>(d)];
}

// ---------------------------------------------------------------------------
// Size5D / Index5D
// ---------------------------------------------------------------------------

/// Per-axis extent of an image or block. Every component is at least 1:
/// voxels for X/Y/Z, channels for C, timepoints for T.
struct Size5D {
    std::array<std::uint64_t, kDimCount> v{1, 1, 1, 1, 1};

    constexpr Size5D() = default;
    constexpr Size5D(std::uint64_t x, std::uint64_t y, std::uint64_t z,
                     std::uint64_t c, std::uint64_t t)
        : v{x, y, z, c, t} {}

    [[nodiscard]] constexpr std::uint64_t operator[](Dim d) const noexcept {
        return v[static_cast<std::size_t>(d)];
    }
    [[nodiscard]] constexpr std::uint64_t& operator[](Dim d) noexcept {
        return v[static_cast<std::size_t>(d)];
    }

    [[nodiscard]] constexpr std::uint64_t total() const noexcept {
        std::uint64_t n = 1;
        for (auto e : v) n *= e;
        return n;
    }

    [[nodiscard]] constexpr bool valid() const noexcept {
        for (auto e : v)
            if (e == 0) return false;
        return true;
    }

    [[nodiscard]] constexpr bool operator==(const Size5D&) const = default;
};

/// Non-negative per-axis index, addressing either an input block or a
/// position inside one.
struct Index5D {
    std::array<std::uint64_t, kDimCount> v{0, 0, 0, 0, 0};

    constexpr Index5D() = default;
    constexpr Index5D(std::uint64_t x, std::uint64_t y, std::uint64_t z,
                      std::uint64_t c, std::uint64_t t)
        : v{x, y, z, c, t} {}

    [[nodiscard]] constexpr std::uint64_t operator[](Dim d) const noexcept {
        return v[static_cast<std::size_t>(d)];
    }
    [[nodiscard]] constexpr std::uint64_t& operator[](Dim d) noexcept {
        return v[static_cast<std::size_t>(d)];
    }

    [[nodiscard]] constexpr bool operator==(const Index5D&) const = default;
};

using BlockIndex5D = Index5D;

// ---------------------------------------------------------------------------
// DimensionSequence5D
// ---------------------------------------------------------------------------

/// Memory order of a block: a permutation of the five axes, fastest-varying
/// first. (X,Y,Z,C,T) is the 5D generalization of row-major in XY.
struct DimensionSequence5D {
    std::array<Dim, kDimCount> order{Dim::X, Dim::Y, Dim::Z, Dim::C, Dim::T};

    constexpr DimensionSequence5D() = default;
    constexpr DimensionSequence5D(Dim a, Dim b, Dim c, Dim d, Dim e)
        : order{a, b, c, d, e} {}

    [[nodiscard]] constexpr Dim operator[](std::size_t i) const noexcept {
        return order[i];
    }

    [[nodiscard]] constexpr bool is_permutation() const noexcept {
        std::array<bool, kDimCount> seen{};
        for (auto d : order) {
            auto i = static_cast<std::size_t>(d);
            if (i >= kDimCount || seen[i]) return false;
            seen[i] = true;
        }
        return true;
    }

    [[nodiscard]] std::string to_string() const {
        std::string s;
        for (auto d : order) s += dim_letter(d);
        return s;
    }

    [[nodiscard]] constexpr bool operator==(const DimensionSequence5D&) const = default;
};

// ---------------------------------------------------------------------------
// DataType
// ---------------------------------------------------------------------------

enum class DataType : std::uint8_t { u8 = 1, u16 = 2, u32 = 3, f32 = 4 };

[[nodiscard]] constexpr std::size_t bytes_per_element(DataType t) noexcept {
    switch (t) {
        case DataType::u8: return 1;
        case DataType::u16: return 2;
        case DataType::u32: return 4;
        case DataType::f32: return 4;
    }
    return 0;
}

[[nodiscard]] constexpr const char* data_type_name(DataType t) noexcept {
    switch (t) {
        case DataType::u8: return "u8";
        case DataType::u16: return "u16";
        case DataType::u32: return "u32";
        case DataType::f32: return "f32";
    }
    return "?";
}

// ---------------------------------------------------------------------------
// ImageExtent
// ---------------------------------------------------------------------------

/// Physical bounding box of the image in world units (micrometers by
/// convention). min is the beginning of the first voxel, max the end of the
/// last one, per axis.
struct ImageExtent {
    double min_x = 0, min_y = 0, min_z = 0;
    double max_x = 1, max_y = 1, max_z = 1;

    [[nodiscard]] constexpr bool valid() const noexcept {
        return max_x > min_x && max_y > min_y && max_z > min_z;
    }

    [[nodiscard]] constexpr bool operator==(const ImageExtent&) const = default;
};

// ---------------------------------------------------------------------------
// ImageLayout
// ---------------------------------------------------------------------------

/// Default internal chunk geometry: 1 MiB for u16 data.
inline constexpr std::array<std::uint64_t, 3> kDefaultInternalBlock = {256, 256, 8};

/// Immutable description of an image and how it is delivered and stored:
/// full 5D size, element type, the caller's input block geometry and memory
/// order, and the writer's internal XYZ chunk size.
struct ImageLayout {
    Size5D image_size;
    DataType data_type = DataType::u16;
    Size5D input_block_size;
    DimensionSequence5D input_sequence;
    std::array<std::uint64_t, 3> internal_block_size = kDefaultInternalBlock;

    /// Throws InvalidArgument if any invariant is broken.
    void validate() const;

    [[nodiscard]] std::uint64_t internal_block_voxels() const noexcept {
        return internal_block_size[0] * internal_block_size[1] * internal_block_size[2];
    }

    [[nodiscard]] std::uint64_t internal_block_bytes() const noexcept {
        return internal_block_voxels() * bytes_per_element(data_type);
    }

    [[nodiscard]] std::uint64_t input_block_bytes() const noexcept {
        return input_block_size.total() * bytes_per_element(data_type);
    }
};

// ---------------------------------------------------------------------------
// Free functions
// ---------------------------------------------------------------------------

/// Physical size of one voxel along X, Y, Z: (max - min) / image_size.
[[nodiscard]] std::array<double, 3> voxel_size(const ImageExtent& extent,
                                               const Size5D& image_size);

/// Per-dimension ceiling division: how many blocks cover the image.
[[nodiscard]] Size5D block_count(const Size5D& image_size, const Size5D& block_size);

/// Element index of `position` inside one block of `block_size` laid out in
/// `sequence` memory order (sequence[0] fastest-varying).
/// Throws InvalidArgument when a position component is out of range.
[[nodiscard]] std::uint64_t linear_offset(const Index5D& position,
                                          const Size5D& block_size,
                                          const DimensionSequence5D& sequence);

/// Inverse of linear_offset.
[[nodiscard]] Index5D delinearize(std::uint64_t offset, const Size5D& block_size,
                                  const DimensionSequence5D& sequence);

} // namespace bwmr
