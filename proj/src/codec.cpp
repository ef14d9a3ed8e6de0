#include "bwmr/codec.hpp"

#include <zlib.h>

#include <cstring>

#include "bwmr/crc32c.hpp"
#include "bwmr/lz4.hpp"
#include "bwmr/shuffle.hpp"

namespace bwmr {
namespace {

// windowBits 15 + 16 selects the gzip wrapper (RFC 1952).
constexpr int kGzipWindowBits = 15 + 16;

std::vector<std::byte> gzip_compress(std::span<const std::byte> in, int level) {
    z_stream zs{};
    if (deflateInit2(&zs, level, Z_DEFLATED, kGzipWindowBits, 8,
                     Z_DEFAULT_STRATEGY) != Z_OK)
        throw Error("deflateInit2 failed");

    std::vector<std::byte> out(deflateBound(&zs, static_cast<uLong>(in.size())));
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());

    const int rc = deflate(&zs, Z_FINISH);
    deflateEnd(&zs);
    if (rc != Z_STREAM_END)
        throw Error("deflate did not finish: rc=" + std::to_string(rc));
    out.resize(zs.total_out);
    return out;
}

std::vector<std::byte> gzip_decompress(std::span<const std::byte> in,
                                       std::uint64_t raw_length) {
    z_stream zs{};
    if (inflateInit2(&zs, kGzipWindowBits) != Z_OK)
        throw Error("inflateInit2 failed");

    std::vector<std::byte> out(raw_length);
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<std::byte*>(in.data()));
    zs.avail_in = static_cast<uInt>(in.size());
    zs.next_out = reinterpret_cast<Bytef*>(out.data());
    zs.avail_out = static_cast<uInt>(out.size());

    const int rc = inflate(&zs, Z_FINISH);
    const auto produced = zs.total_out;
    inflateEnd(&zs);
    if (rc != Z_STREAM_END)
        throw CorruptStreamError("gzip stream invalid or truncated (rc=" +
                                 std::to_string(rc) + ")");
    if (produced != raw_length)
        throw CorruptStreamError("gzip stream decoded to unexpected length");
    return out;
}

} // namespace

std::string CompressionSpec::name() const {
    std::string n;
    if (shuffle) n += "shuffle+";
    switch (algorithm) {
        case Algorithm::none: n += "none"; break;
        case Algorithm::gzip: n += "gzip" + std::to_string(gzip_level); break;
        case Algorithm::lz4: n += "lz4"; break;
    }
    return n;
}

CompressionSpec CompressionSpec::parse(const std::string& text, bool shuffle) {
    CompressionSpec spec;
    spec.shuffle = shuffle;
    if (text == "none") {
        spec.algorithm = Algorithm::none;
    } else if (text == "lz4") {
        spec.algorithm = Algorithm::lz4;
    } else if (text.rfind("gzip", 0) == 0) {
        spec.algorithm = Algorithm::gzip;
        std::string rest = text.substr(4);
        if (!rest.empty() && rest[0] == ':') rest = rest.substr(1);
        if (!rest.empty()) {
            try {
                spec.gzip_level = std::stoi(rest);
            } catch (const std::exception&) {
                throw InvalidArgument("bad gzip level in '" + text + "'");
            }
        }
    } else {
        throw InvalidArgument("unknown compression '" + text +
                              "' (expected none|gzip:N|lz4)");
    }
    spec.validate();
    return spec;
}

CompressionSpec spec_from_codec_code(std::uint32_t code, int gzip_level) {
    CompressionSpec spec;
    spec.shuffle = (code & kShuffleCodeBit) != 0;
    switch (code & 0xFF) {
        case 0: spec.algorithm = Algorithm::none; break;
        case 1: spec.algorithm = Algorithm::gzip; break;
        case 2: spec.algorithm = Algorithm::lz4; break;
        default: throw InvalidArgument("unknown codec code " + std::to_string(code));
    }
    if (gzip_level > 0) spec.gzip_level = gzip_level;
    return spec;
}

std::vector<std::byte> compress_bytes(std::span<const std::byte> raw,
                                      const CompressionSpec& spec,
                                      std::size_t element_size) {
    spec.validate();
    std::vector<std::byte> staged;
    std::span<const std::byte> input = raw;
    if (spec.shuffle && element_size > 1) {
        staged = shuffled(raw, element_size);
        input = staged;
    }
    switch (spec.algorithm) {
        case Algorithm::none:
            return staged.empty() ? std::vector<std::byte>(input.begin(), input.end())
                                  : std::move(staged);
        case Algorithm::gzip:
            return gzip_compress(input, spec.gzip_level);
        case Algorithm::lz4:
            return lz4::frame_compress(input);
    }
    throw Error("unreachable");
}

std::vector<std::byte> decompress_bytes(std::span<const std::byte> payload,
                                        const CompressionSpec& spec,
                                        std::uint64_t raw_length,
                                        std::size_t element_size) {
    std::vector<std::byte> bytes;
    switch (spec.algorithm) {
        case Algorithm::none:
            if (payload.size() != raw_length)
                throw CorruptStreamError("stored chunk has unexpected length");
            bytes.assign(payload.begin(), payload.end());
            break;
        case Algorithm::gzip:
            bytes = gzip_decompress(payload, raw_length);
            break;
        case Algorithm::lz4:
            bytes = lz4::frame_decompress(payload);
            if (bytes.size() != raw_length)
                throw CorruptStreamError("lz4 frame decoded to unexpected length");
            break;
    }
    if (spec.shuffle && element_size > 1)
        return unshuffled(bytes, element_size);
    return bytes;
}

CompressedChunk compress_chunk(std::span<const std::byte> raw, const ChunkKey& key,
                               const CompressionSpec& spec, std::size_t element_size) {
    CompressedChunk chunk;
    chunk.key = key;
    chunk.raw_length = raw.size();
    chunk.payload = compress_bytes(raw, spec, element_size);
    chunk.checksum = crc32c(chunk.payload);
    chunk.codec = codec_code(spec);
    return chunk;
}

std::vector<std::byte> decompress_chunk(const CompressedChunk& chunk,
                                        const CompressionSpec& spec,
                                        std::size_t element_size) {
    if (crc32c(chunk.payload) != chunk.checksum)
        throw ChecksumError("chunk payload failed its CRC32C check");
    return decompress_bytes(chunk.payload, spec, chunk.raw_length, element_size);
}

} // namespace bwmr
