#include "bwmr/lz4.hpp"

#include <algorithm>
#include <cstring>

#include "bwmr/xxhash32.hpp"

namespace bwmr::lz4 {
namespace {

constexpr std::size_t kMinMatch = 4;
constexpr std::size_t kLastLiterals = 5;  // blocks end with >= 5 literal bytes
constexpr std::size_t kMfLimit = 12;      // no match may start in the last 12 bytes
constexpr std::size_t kMaxDistance = 65535;
constexpr unsigned kHashLog = 13;
constexpr unsigned kSkipTrigger = 6;

constexpr std::uint32_t kFrameMagic = 0x184D2204u;

inline std::uint32_t read32(const std::byte* p) noexcept {
    std::uint32_t v;
    std::memcpy(&v, p, 4);
    return v;
}

inline std::uint64_t read64(const std::byte* p) noexcept {
    std::uint64_t v;
    std::memcpy(&v, p, 8);
    return v;
}

inline void write16(std::byte* p, std::uint16_t v) noexcept { std::memcpy(p, &v, 2); }
inline void write32(std::byte* p, std::uint32_t v) noexcept { std::memcpy(p, &v, 4); }

inline std::uint32_t hash_position(const std::byte* p) noexcept {
    return (read32(p) * 2654435761u) >> (32 - kHashLog);
}

/// Length of the common run of a and b, scanning no further than b_limit.
inline std::size_t count_common(const std::byte* a, const std::byte* b,
                                const std::byte* b_limit) noexcept {
    const std::byte* const b_start = b;
    while (b + 8 <= b_limit) {
        const std::uint64_t diff = read64(a) ^ read64(b);
        if (diff != 0)
            return static_cast<std::size_t>(b - b_start) +
                   (static_cast<std::size_t>(__builtin_ctzll(diff)) >> 3);
        a += 8;
        b += 8;
    }
    while (b < b_limit && *a == *b) {
        ++a;
        ++b;
    }
    return static_cast<std::size_t>(b - b_start);
}

[[noreturn]] void corrupt(const char* what) { throw CorruptStreamError(what); }

} // namespace

std::size_t compress_block(std::span<const std::byte> in, std::span<std::byte> out) {
    if (out.size() < compress_bound(in.size()))
        throw InvalidArgument("lz4 output buffer smaller than compress_bound");

    const std::byte* const base = in.data();
    const std::byte* ip = base;
    const std::byte* anchor = base;
    const std::byte* const iend = base + in.size();
    std::byte* op = out.data();

    auto emit_literals = [&op](const std::byte* lits, std::size_t lit_len) -> std::byte* {
        std::byte* const token = op++;
        if (lit_len >= 15) {
            *token = std::byte{0xF0};
            std::size_t rest = lit_len - 15;
            for (; rest >= 255; rest -= 255)
                *op++ = std::byte{255};
            *op++ = static_cast<std::byte>(rest);
        } else {
            *token = static_cast<std::byte>(lit_len << 4);
        }
        std::memcpy(op, lits, lit_len);
        op += lit_len;
        return token;
    };

    if (in.size() > kMfLimit) {
        const std::byte* const mflimit = iend - kMfLimit;
        const std::byte* const match_limit = iend - kLastLiterals;
        std::uint32_t table[1u << kHashLog] = {0}; // position + 1; 0 means empty

        table[hash_position(ip)] = 1;
        ++ip;
        unsigned searches = 1u << kSkipTrigger;

        while (ip < mflimit) {
            const std::uint32_t h = hash_position(ip);
            const std::uint32_t ref_plus1 = table[h];
            table[h] = static_cast<std::uint32_t>(ip - base) + 1;

            const std::byte* match = base + ref_plus1 - 1;
            if (ref_plus1 != 0 &&
                static_cast<std::size_t>(ip - match) <= kMaxDistance &&
                read32(match) == read32(ip)) {
                std::size_t match_len =
                    kMinMatch + count_common(match + kMinMatch, ip + kMinMatch, match_limit);
                while (ip > anchor && match > base && ip[-1] == match[-1]) {
                    --ip;
                    --match;
                    ++match_len;
                }

                std::byte* const token =
                    emit_literals(anchor, static_cast<std::size_t>(ip - anchor));
                write16(op, static_cast<std::uint16_t>(ip - match));
                op += 2;
                std::size_t ml_code = match_len - kMinMatch;
                if (ml_code >= 15) {
                    *token |= std::byte{0x0F};
                    for (ml_code -= 15; ml_code >= 255; ml_code -= 255)
                        *op++ = std::byte{255};
                    *op++ = static_cast<std::byte>(ml_code);
                } else {
                    *token |= static_cast<std::byte>(ml_code);
                }

                ip += match_len;
                anchor = ip;
                searches = 1u << kSkipTrigger;
                if (ip < mflimit)
                    table[hash_position(ip - 2)] =
                        static_cast<std::uint32_t>(ip - 2 - base) + 1;
            } else {
                ip += searches++ >> kSkipTrigger;
            }
        }
    }

    emit_literals(anchor, static_cast<std::size_t>(iend - anchor));
    return static_cast<std::size_t>(op - out.data());
}

std::size_t decompress_block(std::span<const std::byte> in, std::span<std::byte> out) {
    const std::byte* ip = in.data();
    const std::byte* const iend = ip + in.size();
    std::byte* op = out.data();
    std::byte* const oend = op + out.size();

    if (in.empty()) corrupt("lz4 block: empty input");

    for (;;) {
        if (ip >= iend) corrupt("lz4 block: ends after a match, missing final literals");
        const std::uint8_t token = static_cast<std::uint8_t>(*ip++);

        // Literals.
        std::size_t lit_len = token >> 4;
        if (lit_len == 15) {
            std::uint8_t b;
            do {
                if (ip >= iend) corrupt("lz4 block: truncated literal length");
                b = static_cast<std::uint8_t>(*ip++);
                lit_len += b;
            } while (b == 255);
        }
        if (lit_len > static_cast<std::size_t>(iend - ip))
            corrupt("lz4 block: literal run past end of input");
        if (lit_len > static_cast<std::size_t>(oend - op))
            corrupt("lz4 block: literal run past end of output");
        std::memcpy(op, ip, lit_len);
        ip += lit_len;
        op += lit_len;

        if (ip == iend) break; // last sequence: literals only

        // Match.
        if (iend - ip < 2) corrupt("lz4 block: truncated match offset");
        std::uint16_t offset;
        std::memcpy(&offset, ip, 2);
        ip += 2;
        if (offset == 0) corrupt("lz4 block: zero match offset");
        if (offset > op - out.data()) corrupt("lz4 block: match offset before output start");

        std::size_t match_len = (token & 0x0F) + kMinMatch;
        if ((token & 0x0F) == 15) {
            std::uint8_t b;
            do {
                if (ip >= iend) corrupt("lz4 block: truncated match length");
                b = static_cast<std::uint8_t>(*ip++);
                match_len += b;
            } while (b == 255);
        }
        if (match_len > static_cast<std::size_t>(oend - op))
            corrupt("lz4 block: match past end of output");

        const std::byte* match = op - offset;
        if (offset >= match_len) {
            std::memcpy(op, match, match_len);
        } else {
            for (std::size_t i = 0; i < match_len; ++i)
                op[i] = match[i]; // overlapping copy, byte order matters
        }
        op += match_len;
    }

    return static_cast<std::size_t>(op - out.data());
}

namespace {

struct BlockSizeCode {
    std::uint8_t code;
    std::size_t bytes;
};

BlockSizeCode pick_block_size(std::size_t content_size) noexcept {
    if (content_size <= (64u << 10)) return {4, 64u << 10};
    if (content_size <= (256u << 10)) return {5, 256u << 10};
    if (content_size <= (1u << 20)) return {6, 1u << 20};
    return {7, 4u << 20};
}

std::size_t block_size_from_code(std::uint8_t code) {
    switch (code) {
        case 4: return 64u << 10;
        case 5: return 256u << 10;
        case 6: return 1u << 20;
        case 7: return 4u << 20;
        default: corrupt("lz4 frame: reserved block size code");
    }
}

} // namespace

std::vector<std::byte> frame_compress(std::span<const std::byte> in) {
    const BlockSizeCode bs = pick_block_size(in.size());

    std::vector<std::byte> frame;
    frame.reserve(in.size() + in.size() / 255 + 64);

    auto push32 = [&frame](std::uint32_t v) {
        std::byte tmp[4];
        write32(tmp, v);
        frame.insert(frame.end(), tmp, tmp + 4);
    };

    push32(kFrameMagic);

    // Descriptor: version 01, block-independent, content size and content
    // checksum present, no dictionary.
    const std::uint8_t flg = 0x40 | 0x20 | 0x08 | 0x04;
    const std::uint8_t bd = static_cast<std::uint8_t>(bs.code << 4);
    std::byte descriptor[10];
    descriptor[0] = std::byte{flg};
    descriptor[1] = std::byte{bd};
    const std::uint64_t content_size = in.size();
    std::memcpy(descriptor + 2, &content_size, 8);
    frame.insert(frame.end(), descriptor, descriptor + 10);
    frame.push_back(static_cast<std::byte>((xxhash32(descriptor, 10) >> 8) & 0xFF));

    std::vector<std::byte> scratch(compress_bound(bs.bytes));
    for (std::size_t pos = 0; pos < in.size(); pos += bs.bytes) {
        const std::size_t n = std::min(bs.bytes, in.size() - pos);
        const auto chunk = in.subspan(pos, n);
        const std::size_t csize = compress_block(chunk, scratch);
        if (csize < n) {
            push32(static_cast<std::uint32_t>(csize));
            frame.insert(frame.end(), scratch.begin(), scratch.begin() + csize);
        } else {
            push32(static_cast<std::uint32_t>(n) | 0x80000000u);
            frame.insert(frame.end(), chunk.begin(), chunk.end());
        }
    }

    push32(0); // EndMark
    push32(xxhash32(in));
    return frame;
}

std::vector<std::byte> frame_decompress(std::span<const std::byte> in) {
    const std::byte* ip = in.data();
    const std::byte* const iend = ip + in.size();

    auto need = [&](std::size_t n, const char* what) {
        if (static_cast<std::size_t>(iend - ip) < n) corrupt(what);
    };

    need(4, "lz4 frame: truncated magic");
    if (read32(ip) != kFrameMagic) corrupt("lz4 frame: bad magic");
    ip += 4;

    need(2, "lz4 frame: truncated descriptor");
    const std::byte* const descriptor_start = ip;
    const std::uint8_t flg = static_cast<std::uint8_t>(*ip++);
    const std::uint8_t bd = static_cast<std::uint8_t>(*ip++);
    if ((flg >> 6) != 0x01) corrupt("lz4 frame: unsupported version");
    if (flg & 0x02) corrupt("lz4 frame: reserved FLG bit set");
    if (!(flg & 0x20))
        corrupt("lz4 frame: block-dependent frames are not supported");
    const bool block_checksum = flg & 0x10;
    const bool has_content_size = flg & 0x08;
    const bool content_checksum = flg & 0x04;
    const bool has_dict_id = flg & 0x01;
    if (bd & 0x8F) corrupt("lz4 frame: reserved BD bits set");
    const std::size_t block_max = block_size_from_code((bd >> 4) & 0x07);

    std::uint64_t content_size = 0;
    if (has_content_size) {
        need(8, "lz4 frame: truncated content size");
        content_size = read64(ip);
        ip += 8;
    }
    if (has_dict_id) {
        need(4, "lz4 frame: truncated dictionary id");
        ip += 4;
    }
    need(1, "lz4 frame: truncated header checksum");
    const std::size_t descriptor_len = static_cast<std::size_t>(ip - descriptor_start);
    const std::uint8_t expected_hc = static_cast<std::uint8_t>(
        (xxhash32(descriptor_start, descriptor_len) >> 8) & 0xFF);
    if (static_cast<std::uint8_t>(*ip++) != expected_hc)
        corrupt("lz4 frame: header checksum mismatch");

    std::vector<std::byte> content;
    if (has_content_size)
        content.reserve(std::min<std::uint64_t>(content_size, 256u << 20));

    for (;;) {
        need(4, "lz4 frame: truncated block size");
        const std::uint32_t raw = read32(ip);
        ip += 4;
        if (raw == 0) break; // EndMark
        const bool stored = raw & 0x80000000u;
        const std::size_t bsize = raw & 0x7FFFFFFFu;
        if (bsize > block_max) corrupt("lz4 frame: block larger than declared maximum");
        need(bsize, "lz4 frame: truncated block");
        if (stored) {
            content.insert(content.end(), ip, ip + bsize);
        } else {
            const std::size_t start = content.size();
            content.resize(start + block_max);
            const std::size_t produced = decompress_block(
                std::span(ip, bsize), std::span(content).subspan(start, block_max));
            content.resize(start + produced);
        }
        if (block_checksum) {
            const std::uint32_t got = xxhash32(ip, bsize);
            ip += bsize;
            need(4, "lz4 frame: truncated block checksum");
            if (read32(ip) != got) corrupt("lz4 frame: block checksum mismatch");
            ip += 4;
        } else {
            ip += bsize;
        }
    }

    if (has_content_size && content.size() != content_size)
        corrupt("lz4 frame: content size mismatch");
    if (content_checksum) {
        need(4, "lz4 frame: truncated content checksum");
        if (read32(ip) != xxhash32(content.data(), content.size()))
            corrupt("lz4 frame: content checksum mismatch");
        ip += 4;
    }
    return content;
}

} // namespace bwmr::lz4
