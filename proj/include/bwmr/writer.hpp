#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bwmr/codec.hpp"
#include "bwmr/container.hpp"
#include "bwmr/memory.hpp"
#include "bwmr/pipeline.hpp"
#include "bwmr/pyramid.hpp"
#include "bwmr/types.hpp"

namespace bwmr {

/// Writer configuration. Chunks are always dispatched downstream the moment
/// they are full; there is no other flush policy.
struct WriterOptions {
    /// Compression worker count; 0 picks the machine's logical processor count.
    unsigned thread_count = 0;
    CompressionSpec compression{};
    /// Forces internal chunks to Z extent 1. Lowers peak memory for huge XY
    /// planes at the cost of later read performance; normally off.
    bool force_block_z1 = false;
    /// The only policy there is, named so callers can see it.
    static constexpr std::string_view flush_policy = "dispatch-when-full";
};

struct WriteSummary {
    std::uint64_t input_bytes = 0;  ///< in-image bytes streamed by the caller
    std::uint64_t file_bytes = 0;   ///< final container size on disk
    std::vector<std::uint64_t> raw_bytes_per_level;
    std::vector<std::uint64_t> compressed_bytes_per_level;
    std::uint64_t raw_bytes_total = 0;        ///< all levels, before encoding
    std::uint64_t compressed_bytes_total = 0; ///< all levels, stored payloads
    double compression_ratio = 1.0;           ///< raw_bytes_total / compressed_bytes_total
    std::uint64_t peak_memory_bytes = 0;
    std::uint64_t chunk_count = 0;
};

using ProgressCallback = std::function<void(double fraction)>;

/// Streaming 5D block writer: accepts caller blocks in any order, scatters
/// them into internal XYZ chunks per (channel, timepoint), reduces completed
/// chunks through the pyramid, and compresses/writes them on a worker pool.
///
/// copy_block is single-caller: one producer at a time (serialize externally
/// if needed). Dispatch hands completed chunks to the concurrent pipeline
/// and returns without waiting for compression or I/O; finish() blocks until
/// the pipeline drains.
class Writer {
public:
    Writer(const ImageLayout& layout, const ImageExtent& extent,
           const WriterOptions& options, const std::string& output_path,
           BackendFactory backend = reference_backend_factory(),
           ProgressCallback progress = nullptr);
    ~Writer();

    Writer(const Writer&) = delete;
    Writer& operator=(const Writer&) = delete;

    /// Copies one input block. `data` must be exactly the declared input
    /// block size (border blocks padded by the caller; the padding is
    /// discarded). Each index must arrive exactly once.
    void copy_block(std::span<const std::byte> data, const BlockIndex5D& index);

    /// Completes the pyramid, drains the pipeline, writes metadata and the
    /// index, and closes the file. `extent` must equal the creation extent
    /// (it is part of the header, which is written at open).
    WriteSummary finish(const ImageExtent& extent, const Parameters& parameters = {},
                        const std::vector<TimePointInfo>& time_info = {},
                        const std::vector<ChannelColorInfo>& color_info = {});

    /// finish() with the creation-time extent.
    WriteSummary finish(const Parameters& parameters = {},
                        const std::vector<TimePointInfo>& time_info = {},
                        const std::vector<ChannelColorInfo>& color_info = {});

    [[nodiscard]] const ImageLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const PyramidPlan& plan() const noexcept { return plan_; }

    /// High-water mark of live chunk-buffer bytes across all levels.
    [[nodiscard]] std::uint64_t peak_memory_bytes() const noexcept {
        return account_.peak_bytes();
    }
    [[nodiscard]] std::uint64_t current_memory_bytes() const noexcept {
        return account_.current_bytes();
    }

    /// Recomputes live buffer bytes from the chunk registries; test hook for
    /// auditing the running account.
    [[nodiscard]] std::uint64_t audit_live_buffer_bytes() const;

    [[nodiscard]] double progress_fraction() const noexcept {
        return total_voxels_ == 0
                   ? 1.0
                   : static_cast<double>(received_voxels_) /
                         static_cast<double>(total_voxels_);
    }

private:
    struct Level0Chunk {
        std::vector<std::byte> buffer;
        std::uint64_t filled = 0;
        std::uint64_t target = 0;
    };

    void dispatch(const ChunkKey& key, std::vector<std::byte>&& buffer);

    template <typename Elem>
    void scatter_block(const std::byte* data, const Index5D& origin,
                       const Size5D& in_image);

    Level0Chunk& level0_chunk(std::uint64_t t, std::uint64_t c, std::uint64_t bz,
                              std::uint64_t by, std::uint64_t bx);

    ImageLayout layout_;
    ImageExtent extent_;
    WriterOptions options_;
    std::string path_;
    PyramidPlan plan_;
    ProgressCallback progress_;

    MemoryAccount account_;
    std::unique_ptr<BackendWriter> backend_;
    std::unique_ptr<PyramidReducer> reducer_;
    std::unique_ptr<ChunkPipeline> pipeline_;

    Size5D input_block_count_;
    std::uint64_t total_blocks_ = 0;
    std::uint64_t received_blocks_ = 0;
    std::vector<bool> block_seen_;
    std::uint64_t total_voxels_ = 0;
    std::uint64_t received_voxels_ = 0;

    std::array<std::uint64_t, kDimCount> input_strides_{};

    std::unordered_map<std::uint64_t, Level0Chunk> level0_;

    // Written by the pipeline's consumer thread, read after drain().
    std::vector<std::uint64_t> raw_bytes_per_level_;
    std::vector<std::uint64_t> compressed_bytes_per_level_;
    std::uint64_t chunks_written_ = 0;

    bool finished_ = false;
};

} // namespace bwmr
