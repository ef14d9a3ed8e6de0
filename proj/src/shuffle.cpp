#include "bwmr/shuffle.hpp"

#include <cstring>

namespace bwmr {
namespace {

void check_args(std::size_t in_size, std::size_t out_size, std::size_t element_size) {
    if (element_size == 0)
        throw InvalidArgument("shuffle element size must be >= 1");
    if (in_size % element_size != 0)
        throw InvalidArgument("shuffle input length must be a multiple of the element size");
    if (out_size != in_size)
        throw InvalidArgument("shuffle output buffer must match the input length");
}

} // namespace

void shuffle(std::span<const std::byte> in, std::span<std::byte> out,
             std::size_t element_size) {
    check_args(in.size(), out.size(), element_size);
    const std::size_t n = in.size() / element_size;
    if (element_size == 1) {
        std::memcpy(out.data(), in.data(), in.size());
        return;
    }
    for (std::size_t b = 0; b < element_size; ++b) {
        std::byte* dst = out.data() + b * n;
        const std::byte* src = in.data() + b;
        for (std::size_t i = 0; i < n; ++i)
            dst[i] = src[i * element_size];
    }
}

void unshuffle(std::span<const std::byte> in, std::span<std::byte> out,
               std::size_t element_size) {
    check_args(in.size(), out.size(), element_size);
    const std::size_t n = in.size() / element_size;
    if (element_size == 1) {
        std::memcpy(out.data(), in.data(), in.size());
        return;
    }
    for (std::size_t b = 0; b < element_size; ++b) {
        const std::byte* src = in.data() + b * n;
        std::byte* dst = out.data() + b;
        for (std::size_t i = 0; i < n; ++i)
            dst[i * element_size] = src[i];
    }
}

std::vector<std::byte> shuffled(std::span<const std::byte> in, std::size_t element_size) {
    std::vector<std::byte> out(in.size());
    shuffle(in, out, element_size);
    return out;
}

std::vector<std::byte> unshuffled(std::span<const std::byte> in, std::size_t element_size) {
    std::vector<std::byte> out(in.size());
    unshuffle(in, out, element_size);
    return out;
}

} // namespace bwmr
