#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bwmr/errors.hpp"

namespace bwmr::lz4 {

// In-tree LZ4 codec: the raw block format plus the standard frame format
// (magic 0x184D2204), so payloads extracted from a container are decodable
// by stock lz4 tooling.

/// Worst-case compressed size of one block.
[[nodiscard]] constexpr std::size_t compress_bound(std::size_t input_size) noexcept {
    return input_size + input_size / 255 + 16;
}

/// Compresses one raw block. `out` must be at least compress_bound(in.size()).
/// Returns the number of bytes written.
[[nodiscard]] std::size_t compress_block(std::span<const std::byte> in,
                                         std::span<std::byte> out);

/// Decompresses one raw block into `out`, which must be exactly the original
/// size. Returns the number of bytes produced (== out.size()).
/// Throws CorruptStreamError on any structural violation.
std::size_t decompress_block(std::span<const std::byte> in, std::span<std::byte> out);

/// Wraps `in` into a standalone LZ4 frame (block-independent blocks,
/// content size and content checksum present).
[[nodiscard]] std::vector<std::byte> frame_compress(std::span<const std::byte> in);

/// Decodes an LZ4 frame produced by frame_compress or any conforming encoder.
/// Throws CorruptStreamError on bad magic, bad descriptor, truncation, or
/// checksum disagreement inside the frame.
[[nodiscard]] std::vector<std::byte> frame_decompress(std::span<const std::byte> in);

} // namespace bwmr::lz4
