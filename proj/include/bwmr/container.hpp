#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "bwmr/codec.hpp"
#include "bwmr/pyramid.hpp"
#include "bwmr/types.hpp"

namespace bwmr {

// ---------------------------------------------------------------------------
// File format constants
// ---------------------------------------------------------------------------
//
// Reference container (.bwmr), all integers little-endian:
//
//   [Header][Chunk payloads ...][Index][Metadata][FooterTail]
//
//   Header:   magic "BWMRIMG1", format_version u32 = 1, data_type u32
//             (1=u8 2=u16 3=u32 4=f32), image size 5*u64 (X,Y,Z,C,T),
//             internal block size 3*u64, level_count u32, per level 3*u64
//             XYZ size, extent 6*f64 (minX,minY,minZ,maxX,maxY,maxZ).
//   Index:    per level, chunks in lexicographic (t,c,bz,by,bx) order,
//             32 bytes each: offset u64, compressed_length u64,
//             raw_length u32, checksum u32, codec u32, reserved u32.
//   Metadata: section_count u32; per section: name (u32 length + UTF-8),
//             param_count u32, per param name/value length-prefixed UTF-8;
//             then per channel 4*f32 RGBA + 2*f32 display range; then per
//             timepoint a length-prefixed UTF-8 timestamp.
//   Footer:   index_offset u64, metadata_offset u64, magic "BWMREND1"
//             (fixed 24 bytes at EOF).

inline constexpr char kHeaderMagic[8] = {'B', 'W', 'M', 'R', 'I', 'M', 'G', '1'};
inline constexpr char kFooterMagic[8] = {'B', 'W', 'M', 'R', 'E', 'N', 'D', '1'};
inline constexpr std::uint32_t kFormatVersion = 1;
inline constexpr std::size_t kChunkRecordSize = 32;
inline constexpr std::size_t kFooterSize = 24;
inline constexpr const char* kFileExtension = ".bwmr";

/// Index entry for one stored chunk.
struct ChunkRecord {
    std::uint64_t offset = 0;
    std::uint64_t compressed_length = 0;
    std::uint32_t raw_length = 0;
    std::uint32_t checksum = 0;
    std::uint32_t codec = 0;
};

// ---------------------------------------------------------------------------
// Metadata
// ---------------------------------------------------------------------------

/// Ordered sections of ordered name/value pairs, all UTF-8 text.
class Parameters {
public:
    struct Section {
        std::string name;
        std::vector<std::pair<std::string, std::string>> entries;

        [[nodiscard]] bool operator==(const Section&) const = default;
    };

    /// Adds or overwrites one parameter. Names must be non-empty.
    void set(const std::string& section, const std::string& name,
             const std::string& value);

    [[nodiscard]] const std::string* find(const std::string& section,
                                          const std::string& name) const;

    [[nodiscard]] const std::vector<Section>& sections() const noexcept {
        return sections_;
    }

    [[nodiscard]] bool operator==(const Parameters&) const = default;

private:
    std::vector<Section> sections_;
};

struct ChannelColorInfo {
    float rgba[4] = {1.0f, 1.0f, 1.0f, 1.0f};
    float range_min = 0.0f;
    float range_max = 1.0f;

    [[nodiscard]] bool operator==(const ChannelColorInfo& o) const {
        for (int i = 0; i < 4; ++i)
            if (rgba[i] != o.rgba[i]) return false;
        return range_min == o.range_min && range_max == o.range_max;
    }
};

struct TimePointInfo {
    std::string timestamp;

    [[nodiscard]] bool operator==(const TimePointInfo&) const = default;
};

// ---------------------------------------------------------------------------
// Backend interface
// ---------------------------------------------------------------------------

/// The pluggable persistence seam. One instance is driven by a single
/// consumer; chunks may arrive in any grid order. Implementations own their
/// placement strategy, so nothing here assumes append-only storage.
class BackendWriter {
public:
    virtual ~BackendWriter() = default;

    /// Persists one compressed chunk. Throws DuplicateChunkError when the
    /// same (level, index) arrives twice, InvalidArgument when out of range.
    virtual void write_chunk(const CompressedChunk& chunk) = 0;

    /// Stores the descriptive metadata written into the finalized file.
    virtual void write_metadata(const Parameters& parameters,
                                const std::vector<TimePointInfo>& time_info,
                                const std::vector<ChannelColorInfo>& color_info) = 0;

    /// Completes the file. Throws MissingChunksError when chunks are absent.
    /// Must be called exactly once.
    virtual void finalize() = 0;
};

using BackendFactory = std::function<std::unique_ptr<BackendWriter>(
    const std::string& path, const ImageLayout& layout, const PyramidPlan& plan,
    const ImageExtent& extent)>;

/// Opens the reference .bwmr backend: writes the header and prepares the
/// chunk region. Throws IoError when the path cannot be created.
[[nodiscard]] std::unique_ptr<BackendWriter> open_reference(
    const std::string& path, const ImageLayout& layout, const PyramidPlan& plan,
    const ImageExtent& extent);

/// Factory wrapper around open_reference.
[[nodiscard]] BackendFactory reference_backend_factory();

/// Chunk grid of one level including channels and timepoints.
[[nodiscard]] std::uint64_t chunks_in_level(const PyramidLevel& level,
                                            std::uint64_t channels,
                                            std::uint64_t timepoints) noexcept;

/// Lexicographic (t, c, bz, by, bx) slot of a chunk within its level.
[[nodiscard]] std::uint64_t chunk_slot(const ChunkKey& key, const PyramidLevel& level,
                                       std::uint64_t channels) noexcept;

} // namespace bwmr
