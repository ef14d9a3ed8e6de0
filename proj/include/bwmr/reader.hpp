#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "bwmr/codec.hpp"
#include "bwmr/container.hpp"
#include "bwmr/pyramid.hpp"
#include "bwmr/types.hpp"

namespace bwmr {

/// Verification-grade reader for finalized .bwmr files: header, plan and
/// chunk index are loaded eagerly at open; payloads only on request.
/// Immutable after construction; read_chunk is safe from multiple threads
/// (independent positioned reads).
class ImageHandle {
public:
    /// Validates the header and footer magics, loads the index and metadata.
    /// Throws BadMagicError, TruncatedFileError or VersionError.
    static ImageHandle open(const std::string& path);

    ImageHandle(ImageHandle&&) noexcept = default;
    ImageHandle& operator=(ImageHandle&&) noexcept = default;
    ~ImageHandle() = default;

    [[nodiscard]] const Size5D& image_size() const noexcept { return image_size_; }
    [[nodiscard]] DataType data_type() const noexcept { return data_type_; }
    [[nodiscard]] const std::array<std::uint64_t, 3>& internal_block() const noexcept {
        return plan_.block;
    }
    [[nodiscard]] const ImageExtent& extent() const noexcept { return extent_; }
    [[nodiscard]] const PyramidPlan& plan() const noexcept { return plan_; }
    [[nodiscard]] const Parameters& parameters() const noexcept { return parameters_; }
    [[nodiscard]] const std::vector<ChannelColorInfo>& channel_colors() const noexcept {
        return colors_;
    }
    [[nodiscard]] const std::vector<TimePointInfo>& time_points() const noexcept {
        return times_;
    }

    [[nodiscard]] const ChunkRecord& record(std::uint32_t level,
                                            const ChunkKey& key) const;
    [[nodiscard]] const std::vector<ChunkRecord>& level_records(std::uint32_t level) const;

    /// Reads, checksum-verifies and decompresses one chunk. The result is the
    /// full internal block, zero-padded beyond the image boundary.
    /// Throws ChecksumError or CorruptStreamError.
    [[nodiscard]] std::vector<std::byte> read_chunk(std::uint32_t level,
                                                    const ChunkKey& key) const;

    /// All chunks of (level, c, t) whose voxel boxes intersect the half-open
    /// region [xyz_min, xyz_max) in level voxel coordinates. Minimal and
    /// complete by interval arithmetic.
    [[nodiscard]] std::vector<ChunkKey> query_region(
        std::uint32_t level, const std::array<std::uint64_t, 3>& xyz_min,
        const std::array<std::uint64_t, 3>& xyz_max, std::uint64_t c,
        std::uint64_t t) const;

private:
    ImageHandle() = default;

    /// Owning file descriptor; kept open for positioned reads.
    struct Fd {
        int fd = -1;
        Fd() = default;
        explicit Fd(int f) noexcept : fd(f) {}
        Fd(Fd&& o) noexcept : fd(o.fd) { o.fd = -1; }
        Fd& operator=(Fd&& o) noexcept;
        Fd(const Fd&) = delete;
        Fd& operator=(const Fd&) = delete;
        ~Fd();
    };

    Fd file_;
    Size5D image_size_;
    DataType data_type_ = DataType::u16;
    ImageExtent extent_;
    PyramidPlan plan_;
    Parameters parameters_;
    std::vector<ChannelColorInfo> colors_;
    std::vector<TimePointInfo> times_;
    std::vector<std::vector<ChunkRecord>> records_;
};

} // namespace bwmr
