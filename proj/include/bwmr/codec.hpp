#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bwmr/errors.hpp"
#include "bwmr/types.hpp"

namespace bwmr {

enum class Algorithm : std::uint8_t { none = 0, gzip = 1, lz4 = 2 };

/// Which transform runs on each chunk: optional byte shuffle, then one of
/// no-op, Gzip (RFC 1952, levels 1-9) or LZ4 frames.
struct CompressionSpec {
    Algorithm algorithm = Algorithm::gzip;
    int gzip_level = 2;
    bool shuffle = false;

    void validate() const {
        if (algorithm == Algorithm::gzip && (gzip_level < 1 || gzip_level > 9))
            throw InvalidArgument("gzip level must be in 1..9");
    }

    [[nodiscard]] bool operator==(const CompressionSpec&) const = default;

    [[nodiscard]] std::string name() const;

    /// Parses "none", "gzip", "gzip:N", "gzipN", "lz4".
    [[nodiscard]] static CompressionSpec parse(const std::string& text, bool shuffle);
};

/// Container codec code: low byte is the algorithm, bit 8 is the shuffle flag.
inline constexpr std::uint32_t kShuffleCodeBit = 256;

[[nodiscard]] constexpr std::uint32_t codec_code(const CompressionSpec& spec) noexcept {
    return static_cast<std::uint32_t>(spec.algorithm) |
           (spec.shuffle ? kShuffleCodeBit : 0);
}

[[nodiscard]] CompressionSpec spec_from_codec_code(std::uint32_t code, int gzip_level = 0);

/// Addressed location of one internal chunk: resolution level plus the
/// (t, c, bz, by, bx) grid position.
struct ChunkKey {
    std::uint32_t level = 0;
    std::uint64_t t = 0, c = 0, bz = 0, by = 0, bx = 0;

    [[nodiscard]] bool operator==(const ChunkKey&) const = default;
    [[nodiscard]] auto operator<=>(const ChunkKey&) const = default;
};

/// One compressed chunk, ready for addressed writing.
struct CompressedChunk {
    ChunkKey key;
    std::vector<std::byte> payload;
    std::uint64_t raw_length = 0;
    std::uint32_t checksum = 0;   // CRC32C of payload
    std::uint32_t codec = 0;      // codec_code of the spec used
};

/// Applies shuffle (by data-type element size) and the chosen encoder.
/// For Algorithm::none the payload is just the (possibly shuffled) bytes.
/// Payloads are standard streams: a Gzip member or an LZ4 frame.
[[nodiscard]] std::vector<std::byte> compress_bytes(std::span<const std::byte> raw,
                                                    const CompressionSpec& spec,
                                                    std::size_t element_size);

/// Exact inverse of compress_bytes. `raw_length` is the expected output size.
/// Throws CorruptStreamError when the payload cannot be decoded or does not
/// produce exactly raw_length bytes.
[[nodiscard]] std::vector<std::byte> decompress_bytes(std::span<const std::byte> payload,
                                                      const CompressionSpec& spec,
                                                      std::uint64_t raw_length,
                                                      std::size_t element_size);

/// compress_bytes plus the chunk bookkeeping (checksum, codec code, sizes).
[[nodiscard]] CompressedChunk compress_chunk(std::span<const std::byte> raw,
                                             const ChunkKey& key,
                                             const CompressionSpec& spec,
                                             std::size_t element_size);

/// Verifies the CRC32C first (ChecksumError on mismatch), then decodes.
[[nodiscard]] std::vector<std::byte> decompress_chunk(const CompressedChunk& chunk,
                                                      const CompressionSpec& spec,
                                                      std::size_t element_size);

} // namespace bwmr
