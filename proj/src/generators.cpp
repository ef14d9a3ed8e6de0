#include "bwmr/generators.hpp"

#include <cstring>

namespace bwmr {
namespace {

inline std::uint64_t splitmix64(std::uint64_t v) noexcept {
    v += 0x9E3779B97F4A7C15ull;
    v = (v ^ (v >> 30)) * 0xBF58476D1CE4E5B9ull;
    v = (v ^ (v >> 27)) * 0x94D049BB133111EBull;
    return v ^ (v >> 31);
}

} // namespace

SyntheticKind parse_synthetic(const std::string& name) {
    if (name == "zeros") return SyntheticKind::zeros;
    if (name == "ramp") return SyntheticKind::ramp;
    if (name == "smooth-noise") return SyntheticKind::smooth_noise;
    throw InvalidArgument("unknown synthetic generator '" + name +
                          "' (expected zeros|ramp|smooth-noise)");
}

const char* synthetic_name(SyntheticKind kind) noexcept {
    switch (kind) {
        case SyntheticKind::zeros: return "zeros";
        case SyntheticKind::ramp: return "ramp";
        case SyntheticKind::smooth_noise: return "smooth-noise";
    }
    return "?";
}

SyntheticImage::SyntheticImage(SyntheticKind kind, std::uint64_t seed,
                               const Size5D& image_size, DataType type)
    : kind_(kind), seed_(seed), size_(image_size), type_(type) {
    if (!size_.valid())
        throw InvalidArgument("image size components must all be >= 1");
}

std::uint64_t SyntheticImage::raw_u16(std::uint64_t x, std::uint64_t y,
                                      std::uint64_t z, std::uint64_t c,
                                      std::uint64_t t) const {
    switch (kind_) {
        case SyntheticKind::zeros:
            return 0;
        case SyntheticKind::ramp: {
            const std::uint64_t linear =
                x + size_[Dim::X] *
                        (y + size_[Dim::Y] *
                                 (z + size_[Dim::Z] * (c + size_[Dim::C] * t)));
            return linear % 512;
        }
        case SyntheticKind::smooth_noise: {
            // 4-voxel grain along X: base and noise are constant within it.
            const std::uint64_t xq = x >> 2;
            const std::uint64_t base =
                (xq * 48 + y * 16 + z * 24 + c * 7040 + t * 11200) % 49152;
            const std::uint64_t h =
                splitmix64(seed_ ^ splitmix64((xq << 40) ^ (y << 20) ^ z ^
                                              (c << 56) ^ (t << 48)));
            return base + (h & 63);
        }
    }
    return 0;
}

double SyntheticImage::value(std::uint64_t x, std::uint64_t y, std::uint64_t z,
                             std::uint64_t c, std::uint64_t t) const {
    const std::uint64_t v = raw_u16(x, y, z, c, t);
    switch (type_) {
        case DataType::u8: return static_cast<double>(v & 0xFF);
        case DataType::u16: return static_cast<double>(v & 0xFFFF);
        case DataType::u32: return static_cast<double>(v);
        case DataType::f32:
            return static_cast<double>(static_cast<float>(v) / 65535.0f);
    }
    return 0.0;
}

void SyntheticImage::fill_block(const BlockIndex5D& index, const Size5D& block_size,
                                const DimensionSequence5D& sequence,
                                std::span<std::byte> out) const {
    const std::size_t esize = bytes_per_element(type_);
    if (out.size() != block_size.total() * esize)
        throw InvalidArgument("output span must be the full block byte size");
    std::memset(out.data(), 0, out.size());

    Index5D origin;
    Size5D in_image;
    for (auto d : kAllDims) {
        origin[d] = index[d] * block_size[d];
        if (origin[d] >= size_[d])
            throw InvalidArgument("block index out of range");
        in_image[d] = std::min(block_size[d], size_[d] - origin[d]);
    }

    std::array<std::uint64_t, kDimCount> stride{};
    std::uint64_t acc = 1;
    for (std::size_t i = 0; i < kDimCount; ++i) {
        stride[static_cast<std::size_t>(sequence[i])] = acc;
        acc *= block_size[sequence[i]];
    }

    for (std::uint64_t t = 0; t < in_image[Dim::T]; ++t)
    for (std::uint64_t c = 0; c < in_image[Dim::C]; ++c)
    for (std::uint64_t z = 0; z < in_image[Dim::Z]; ++z)
    for (std::uint64_t y = 0; y < in_image[Dim::Y]; ++y)
    for (std::uint64_t x = 0; x < in_image[Dim::X]; ++x) {
        const std::uint64_t off = x * stride[0] + y * stride[1] + z * stride[2] +
                                  c * stride[3] + t * stride[4];
        const double v = value(origin[Dim::X] + x, origin[Dim::Y] + y,
                               origin[Dim::Z] + z, origin[Dim::C] + c,
                               origin[Dim::T] + t);
        std::byte* dst = out.data() + off * esize;
        switch (type_) {
            case DataType::u8: {
                const auto e = static_cast<std::uint8_t>(v);
                std::memcpy(dst, &e, sizeof(e));
                break;
            }
            case DataType::u16: {
                const auto e = static_cast<std::uint16_t>(v);
                std::memcpy(dst, &e, sizeof(e));
                break;
            }
            case DataType::u32: {
                const auto e = static_cast<std::uint32_t>(v);
                std::memcpy(dst, &e, sizeof(e));
                break;
            }
            case DataType::f32: {
                const auto e = static_cast<float>(v);
                std::memcpy(dst, &e, sizeof(e));
                break;
            }
        }
    }
}

std::vector<std::byte> SyntheticImage::generate_volume() const {
    const Size5D one_block = size_;
    std::vector<std::byte> out(size_.total() * bytes_per_element(type_));
    fill_block(BlockIndex5D{}, one_block, DimensionSequence5D{}, out);
    return out;
}

} // namespace bwmr
