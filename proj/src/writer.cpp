#include "bwmr/writer.hpp"

#include <sys/stat.h>

#include <algorithm>
#include <cstring>
#include <thread>

namespace bwmr {
namespace {

unsigned resolve_thread_count(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::uint64_t file_size_of(const std::string& path) {
    struct stat st{};
    if (::stat(path.c_str(), &st) != 0) return 0;
    return static_cast<std::uint64_t>(st.st_size);
}

} // namespace

Writer::Writer(const ImageLayout& layout, const ImageExtent& extent,
               const WriterOptions& options, const std::string& output_path,
               BackendFactory backend, ProgressCallback progress)
    : layout_(layout),
      extent_(extent),
      options_(options),
      path_(output_path),
      progress_(std::move(progress)) {
    if (options_.force_block_z1) layout_.internal_block_size[2] = 1;
    layout_.validate();
    options_.compression.validate();
    if (!extent_.valid())
        throw InvalidArgument("extent max must exceed extent min on each axis");
    if (!backend) throw InvalidArgument("writer needs a backend factory");

    plan_ = plan_levels({layout_.image_size[Dim::X], layout_.image_size[Dim::Y],
                         layout_.image_size[Dim::Z]},
                        layout_.internal_block_size);

    input_block_count_ = block_count(layout_.image_size, layout_.input_block_size);
    total_blocks_ = input_block_count_.total();
    block_seen_.assign(total_blocks_, false);
    total_voxels_ = layout_.image_size.total();

    // Strides of the caller's block memory, from its dimension sequence.
    std::uint64_t stride = 1;
    for (std::size_t i = 0; i < kDimCount; ++i) {
        const Dim d = layout_.input_sequence[i];
        input_strides_[static_cast<std::size_t>(d)] = stride;
        stride *= layout_.input_block_size[d];
    }

    backend_ = backend(path_, layout_, plan_, extent_);

    raw_bytes_per_level_.assign(plan_.level_count(), 0);
    compressed_bytes_per_level_.assign(plan_.level_count(), 0);

    pipeline_ = std::make_unique<ChunkPipeline>(
        resolve_thread_count(options_.thread_count), options_.compression,
        bytes_per_element(layout_.data_type), [this](CompressedChunk&& chunk) {
            raw_bytes_per_level_[chunk.key.level] += chunk.raw_length;
            compressed_bytes_per_level_[chunk.key.level] += chunk.payload.size();
            ++chunks_written_;
            backend_->write_chunk(chunk);
        });

    reducer_ = std::make_unique<PyramidReducer>(
        plan_, layout_.data_type, layout_.image_size[Dim::C],
        layout_.image_size[Dim::T], &account_,
        [this](const ChunkKey& key, std::vector<std::byte>&& buffer) {
            dispatch(key, std::move(buffer));
        });
}

Writer::~Writer() = default;

std::uint64_t Writer::audit_live_buffer_bytes() const {
    const std::uint64_t chunk_bytes = layout_.internal_block_bytes();
    return (level0_.size() + reducer_->live_accumulators()) * chunk_bytes;
}

void Writer::dispatch(const ChunkKey& key, std::vector<std::byte>&& buffer) {
    // Feed the pyramid first (it reads the buffer), then hand the buffer to
    // the compression pool. Cascaded completions re-enter here per level.
    reducer_->accumulate(key, buffer);
    pipeline_->submit(PendingChunk{key, std::move(buffer)});
}

Writer::Level0Chunk& Writer::level0_chunk(std::uint64_t t, std::uint64_t c,
                                          std::uint64_t bz, std::uint64_t by,
                                          std::uint64_t bx) {
    const PyramidLevel& lv = plan_.levels[0];
    const std::uint64_t slot = chunk_slot(ChunkKey{0, t, c, bz, by, bx}, lv,
                                          layout_.image_size[Dim::C]);
    auto [it, created] = level0_.try_emplace(slot);
    Level0Chunk& chunk = it->second;
    if (created) {
        chunk.buffer.assign(layout_.internal_block_bytes(), std::byte{0});
        account_.charge(layout_.internal_block_bytes());
        const auto& B = layout_.internal_block_size;
        const std::uint64_t nx =
            std::min((bx + 1) * B[0], lv.size[0]) - bx * B[0];
        const std::uint64_t ny =
            std::min((by + 1) * B[1], lv.size[1]) - by * B[1];
        const std::uint64_t nz =
            std::min((bz + 1) * B[2], lv.size[2]) - bz * B[2];
        chunk.target = nx * ny * nz;
    }
    return chunk;
}

template <typename Elem>
void Writer::scatter_block(const std::byte* data, const Index5D& origin,
                           const Size5D& in_image) {
    const auto& B = layout_.internal_block_size;
    const Elem* src = reinterpret_cast<const Elem*>(data);
    const bool x_fastest = layout_.input_sequence[0] == Dim::X;

    const std::uint64_t sx = input_strides_[0], sy = input_strides_[1],
                        sz = input_strides_[2], sc = input_strides_[3],
                        st = input_strides_[4];

    for (std::uint64_t dt = 0; dt < in_image[Dim::T]; ++dt)
    for (std::uint64_t dc = 0; dc < in_image[Dim::C]; ++dc) {
        const std::uint64_t t = origin[Dim::T] + dt;
        const std::uint64_t c = origin[Dim::C] + dc;

        const std::uint64_t x0 = origin[Dim::X], x1 = x0 + in_image[Dim::X];
        const std::uint64_t y0 = origin[Dim::Y], y1 = y0 + in_image[Dim::Y];
        const std::uint64_t z0 = origin[Dim::Z], z1 = z0 + in_image[Dim::Z];

        for (std::uint64_t bz = z0 / B[2]; bz <= (z1 - 1) / B[2]; ++bz)
        for (std::uint64_t by = y0 / B[1]; by <= (y1 - 1) / B[1]; ++by)
        for (std::uint64_t bx = x0 / B[0]; bx <= (x1 - 1) / B[0]; ++bx) {
            const std::uint64_t cx0 = std::max(x0, bx * B[0]);
            const std::uint64_t cx1 = std::min(x1, (bx + 1) * B[0]);
            const std::uint64_t cy0 = std::max(y0, by * B[1]);
            const std::uint64_t cy1 = std::min(y1, (by + 1) * B[1]);
            const std::uint64_t cz0 = std::max(z0, bz * B[2]);
            const std::uint64_t cz1 = std::min(z1, (bz + 1) * B[2]);

            Level0Chunk& chunk = level0_chunk(t, c, bz, by, bx);
            Elem* dst = reinterpret_cast<Elem*>(chunk.buffer.data());

            for (std::uint64_t z = cz0; z < cz1; ++z)
            for (std::uint64_t y = cy0; y < cy1; ++y) {
                const std::uint64_t drow =
                    (cx0 - bx * B[0]) +
                    B[0] * ((y - by * B[1]) + B[1] * (z - bz * B[2]));
                const std::uint64_t srow = (cx0 - x0) * sx + (y - y0) * sy +
                                           (z - z0) * sz + dc * sc + dt * st;
                const std::uint64_t run = cx1 - cx0;
                if (x_fastest) {
                    std::memcpy(dst + drow, src + srow, run * sizeof(Elem));
                } else {
                    for (std::uint64_t i = 0; i < run; ++i)
                        dst[drow + i] = src[srow + i * sx];
                }
            }

            chunk.filled += (cx1 - cx0) * (cy1 - cy0) * (cz1 - cz0);
            if (chunk.filled == chunk.target) {
                std::vector<std::byte> buffer = std::move(chunk.buffer);
                const std::uint64_t slot = chunk_slot(
                    ChunkKey{0, t, c, bz, by, bx}, plan_.levels[0],
                    layout_.image_size[Dim::C]);
                level0_.erase(slot);
                account_.release(layout_.internal_block_bytes());
                dispatch(ChunkKey{0, t, c, bz, by, bx}, std::move(buffer));
            }
        }
    }
}

void Writer::copy_block(std::span<const std::byte> data, const BlockIndex5D& index) {
    if (finished_) throw Error("writer already finished");
    for (auto d : kAllDims)
        if (index[d] >= input_block_count_[d])
            throw InvalidArgument(std::string("block index out of range along ") +
                                  dim_letter(d));
    if (data.size() != layout_.input_block_bytes())
        throw InvalidArgument("block data must be the full declared block size (" +
                              std::to_string(layout_.input_block_bytes()) +
                              " bytes, border blocks padded)");

    std::uint64_t block_linear = 0;
    for (std::size_t i = kDimCount; i-- > 0;) {
        const Dim d = kAllDims[i];
        block_linear = block_linear * input_block_count_[d] + index[d];
    }
    if (block_seen_[block_linear])
        throw DuplicateBlockError("block copied twice");
    block_seen_[block_linear] = true;
    ++received_blocks_;

    Index5D origin;
    Size5D in_image;
    for (auto d : kAllDims) {
        origin[d] = index[d] * layout_.input_block_size[d];
        in_image[d] =
            std::min(layout_.input_block_size[d], layout_.image_size[d] - origin[d]);
    }

    switch (layout_.data_type) {
        case DataType::u8: scatter_block<std::uint8_t>(data.data(), origin, in_image); break;
        case DataType::u16: scatter_block<std::uint16_t>(data.data(), origin, in_image); break;
        case DataType::u32: scatter_block<std::uint32_t>(data.data(), origin, in_image); break;
        case DataType::f32: scatter_block<float>(data.data(), origin, in_image); break;
    }

    received_voxels_ += in_image.total();
    if (progress_) progress_(progress_fraction());
}

WriteSummary Writer::finish(const Parameters& parameters,
                            const std::vector<TimePointInfo>& time_info,
                            const std::vector<ChannelColorInfo>& color_info) {
    return finish(extent_, parameters, time_info, color_info);
}

WriteSummary Writer::finish(const ImageExtent& extent, const Parameters& parameters,
                            const std::vector<TimePointInfo>& time_info,
                            const std::vector<ChannelColorInfo>& color_info) {
    if (finished_) throw Error("writer already finished");
    if (!(extent == extent_))
        throw InvalidArgument(
            "finish extent must match the creation extent (the header is "
            "written when the file is opened)");
    if (received_blocks_ != total_blocks_)
        throw MissingBlocksError(
            std::to_string(total_blocks_ - received_blocks_) + " of " +
                std::to_string(total_blocks_) + " input blocks never copied",
            total_blocks_ - received_blocks_);
    if (!time_info.empty() && time_info.size() != layout_.image_size[Dim::T])
        throw InvalidArgument("time_info length must equal the timepoint count");
    if (!color_info.empty() && color_info.size() != layout_.image_size[Dim::C])
        throw InvalidArgument("color_info length must equal the channel count");

    // Every chunk completes with its last in-image voxel, so nothing can be
    // left over here; anything else is an internal accounting bug.
    if (!level0_.empty() || reducer_->live_accumulators() != 0)
        throw Error("internal error: chunks still buffered at finish");

    pipeline_->drain();
    backend_->write_metadata(parameters, time_info, color_info);
    backend_->finalize();
    finished_ = true;

    WriteSummary summary;
    summary.input_bytes = received_voxels_ * bytes_per_element(layout_.data_type);
    summary.file_bytes = file_size_of(path_);
    summary.raw_bytes_per_level = raw_bytes_per_level_;
    summary.compressed_bytes_per_level = compressed_bytes_per_level_;
    for (std::size_t k = 0; k < plan_.level_count(); ++k) {
        summary.raw_bytes_total += raw_bytes_per_level_[k];
        summary.compressed_bytes_total += compressed_bytes_per_level_[k];
    }
    summary.compression_ratio =
        summary.compressed_bytes_total == 0
            ? 1.0
            : static_cast<double>(summary.raw_bytes_total) /
                  static_cast<double>(summary.compressed_bytes_total);
    summary.peak_memory_bytes = account_.peak_bytes();
    summary.chunk_count = chunks_written_;
    return summary;
}

} // namespace bwmr
