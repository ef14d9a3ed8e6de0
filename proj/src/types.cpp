#include "bwmr/types.hpp"

namespace bwmr {

void ImageLayout::validate() const {
    if (!image_size.valid())
        throw InvalidArgument("image size components must all be >= 1");
    if (!input_block_size.valid())
        throw InvalidArgument("input block size components must all be >= 1");
    if (!input_sequence.is_permutation())
        throw InvalidArgument("input sequence must be a permutation of XYZCT");
    for (auto b : internal_block_size)
        if (b == 0)
            throw InvalidArgument("internal block size components must all be >= 1");
    if (bytes_per_element(data_type) == 0)
        throw InvalidArgument("unknown data type");
}

std::array<double, 3> voxel_size(const ImageExtent& extent, const Size5D& image_size) {
    if (!extent.valid())
        throw InvalidArgument("extent max must exceed extent min on each axis");
    if (!image_size.valid())
        throw InvalidArgument("image size components must all be >= 1");
    return {
        (extent.max_x - extent.min_x) / static_cast<double>(image_size[Dim::X]),
        (extent.max_y - extent.min_y) / static_cast<double>(image_size[Dim::Y]),
        (extent.max_z - extent.min_z) / static_cast<double>(image_size[Dim::Z]),
    };
}

Size5D block_count(const Size5D& image_size, const Size5D& block_size) {
    if (!image_size.valid() || !block_size.valid())
        throw InvalidArgument("sizes must have all components >= 1");
    Size5D n;
    for (auto d : kAllDims)
        n[d] = (image_size[d] - 1) / block_size[d] + 1;
    return n;
}

std::uint64_t linear_offset(const Index5D& position, const Size5D& block_size,
                            const DimensionSequence5D& sequence) {
    if (!sequence.is_permutation())
        throw InvalidArgument("sequence must be a permutation of XYZCT");
    for (auto d : kAllDims)
        if (position[d] >= block_size[d])
            throw InvalidArgument(std::string("position out of range along ") +
                                  dim_letter(d));
    std::uint64_t offset = 0;
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < kDimCount; ++i) {
        const Dim d = sequence[i];
        offset += position[d] * stride;
        stride *= block_size[d];
    }
    return offset;
}

Index5D delinearize(std::uint64_t offset, const Size5D& block_size,
                    const DimensionSequence5D& sequence) {
    if (!sequence.is_permutation())
        throw InvalidArgument("sequence must be a permutation of XYZCT");
    if (offset >= block_size.total())
        throw InvalidArgument("offset out of range");
    Index5D position;
    for (std::size_t i = 0; i < kDimCount; ++i) {
        const Dim d = sequence[i];
        position[d] = offset % block_size[d];
        offset /= block_size[d];
    }
    return position;
}

} // namespace bwmr
