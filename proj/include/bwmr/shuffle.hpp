#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bwmr/errors.hpp"

namespace bwmr {

/// Byte-plane transposition over fixed-size elements: output byte
/// (b*n + i) = input byte (i*element_size + b) for n = size/element_size.
/// All low bytes end up consecutive, then the next plane, and so on —
/// the usual HDF5 shuffle filter semantics.
/// Throws InvalidArgument when the length is not a multiple of element_size.
void shuffle(std::span<const std::byte> in, std::span<std::byte> out,
             std::size_t element_size);

/// Exact inverse of shuffle.
void unshuffle(std::span<const std::byte> in, std::span<std::byte> out,
               std::size_t element_size);

[[nodiscard]] std::vector<std::byte> shuffled(std::span<const std::byte> in,
                                              std::size_t element_size);
[[nodiscard]] std::vector<std::byte> unshuffled(std::span<const std::byte> in,
                                                std::size_t element_size);

} // namespace bwmr
