#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "bwmr/codec.hpp"
#include "bwmr/memory.hpp"
#include "bwmr/types.hpp"

namespace bwmr {

/// One resolution level: its XYZ size, which axes were halved to reach it
/// from the previous level, and its chunk grid.
struct PyramidLevel {
    std::array<std::uint64_t, 3> size{};
    std::array<bool, 3> halved{};
    std::array<std::uint64_t, 3> chunk_count{};

    [[nodiscard]] std::uint64_t voxels() const noexcept {
        return size[0] * size[1] * size[2];
    }
    [[nodiscard]] std::uint64_t chunks() const noexcept {
        return chunk_count[0] * chunk_count[1] * chunk_count[2];
    }
};

/// Ordered list of levels, finest first. Level sizes use ceiling halving of
/// every axis whose size still exceeds its internal block dimension; planning
/// stops once no axis qualifies, so the coarsest level fits a single chunk.
struct PyramidPlan {
    std::array<std::uint64_t, 3> block{};
    std::vector<PyramidLevel> levels;

    [[nodiscard]] std::size_t level_count() const noexcept { return levels.size(); }
    [[nodiscard]] std::uint64_t block_voxels() const noexcept {
        return block[0] * block[1] * block[2];
    }
};

[[nodiscard]] PyramidPlan plan_levels(const std::array<std::uint64_t, 3>& image_xyz,
                                      const std::array<std::uint64_t, 3>& internal_block);

/// Total voxels of level k.
[[nodiscard]] std::uint64_t level_voxel_count(const PyramidPlan& plan, std::size_t k);

/// Streaming window-mean reducer. Completed level-k chunks are scattered
/// into level-(k+1) accumulators; a target voxel is the mean of its source
/// window (two samples per halved axis, one otherwise, clipped at the level
/// boundary). Integers round half away from zero; sums are widened to
/// 64-bit / double. A target chunk is emitted as soon as its last source
/// voxel arrives, so emission order follows data arrival, not grid order.
class PyramidReducer {
public:
    /// Called with every completed level-(k+1) chunk (full-size, zero-padded
    /// raw buffer). The callee owns the buffer.
    using Emit = std::function<void(const ChunkKey&, std::vector<std::byte>&&)>;

    PyramidReducer(const PyramidPlan& plan, DataType type, std::uint64_t channels,
                   std::uint64_t timepoints, MemoryAccount* account, Emit emit);

    /// Feeds one completed source chunk. Thread-safe: a single lock covers
    /// the accumulator registry, which makes per-target updates mutually
    /// exclusive. Emissions happen inside the call.
    void accumulate(const ChunkKey& source, std::span<const std::byte> raw);

    /// Number of live (partially accumulated) target chunks, for audits.
    [[nodiscard]] std::size_t live_accumulators() const;

private:
    struct Accumulator {
        std::vector<double> sums;        // f32 path
        std::vector<std::uint64_t> isums; // integer path
        std::vector<std::uint8_t> counts;
        std::uint64_t remaining = 0;
    };

    template <typename Elem, typename Sum>
    void accumulate_typed(const ChunkKey& source, std::span<const std::byte> raw,
                          std::vector<std::pair<ChunkKey, std::vector<std::byte>>>& done);

    template <typename Elem, typename Sum>
    std::vector<std::byte> finalize(const Accumulator& acc, const ChunkKey& key,
                                    std::uint32_t level) const;

    std::uint64_t expected_sources(std::uint32_t target_level, std::uint64_t bx,
                                   std::uint64_t by, std::uint64_t bz) const;

    const PyramidPlan& plan_;
    DataType type_;
    std::uint64_t channels_;
    std::uint64_t timepoints_;
    MemoryAccount* account_;
    Emit emit_;

    mutable std::mutex mutex_;
    // One registry per target level, keyed by the chunk's linear slot.
    std::vector<std::unordered_map<std::uint64_t, Accumulator>> live_;
};

} // namespace bwmr
