#include "bwmr/container.hpp"

#include <bit>
#include <cstdio>
#include <cstring>

static_assert(std::endian::native == std::endian::little,
              "container serialization assumes a little-endian host");

namespace bwmr {

void Parameters::set(const std::string& section, const std::string& name,
                     const std::string& value) {
    if (section.empty() || name.empty())
        throw InvalidArgument("parameter section and name must be non-empty");
    for (auto& s : sections_) {
        if (s.name != section) continue;
        for (auto& e : s.entries) {
            if (e.first == name) {
                e.second = value;
                return;
            }
        }
        s.entries.emplace_back(name, value);
        return;
    }
    sections_.push_back(Section{section, {{name, value}}});
}

const std::string* Parameters::find(const std::string& section,
                                    const std::string& name) const {
    for (const auto& s : sections_) {
        if (s.name != section) continue;
        for (const auto& e : s.entries)
            if (e.first == name) return &e.second;
    }
    return nullptr;
}

std::uint64_t chunks_in_level(const PyramidLevel& level, std::uint64_t channels,
                              std::uint64_t timepoints) noexcept {
    return level.chunks() * channels * timepoints;
}

std::uint64_t chunk_slot(const ChunkKey& key, const PyramidLevel& level,
                         std::uint64_t channels) noexcept {
    const auto& n = level.chunk_count;
    return (((key.t * channels + key.c) * n[2] + key.bz) * n[1] + key.by) * n[0] +
           key.bx;
}

namespace {

/// RAII stdio stream; buffered sequential writes.
class OutputFile {
public:
    explicit OutputFile(const std::string& path) : file_(std::fopen(path.c_str(), "wb")) {
        if (!file_) throw IoError("cannot create '" + path + "'");
    }
    ~OutputFile() {
        if (file_) std::fclose(file_);
    }
    OutputFile(const OutputFile&) = delete;
    OutputFile& operator=(const OutputFile&) = delete;

    void write(const void* data, std::size_t size) {
        if (std::fwrite(data, 1, size, file_) != size)
            throw IoError("write failed");
        offset_ += size;
    }

    void close() {
        if (std::fclose(file_) != 0) {
            file_ = nullptr;
            throw IoError("close failed");
        }
        file_ = nullptr;
    }

    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

private:
    std::FILE* file_;
    std::uint64_t offset_ = 0;
};

class ReferenceBackend final : public BackendWriter {
public:
    ReferenceBackend(const std::string& path, const ImageLayout& layout,
                     const PyramidPlan& plan, const ImageExtent& extent)
        : layout_(layout), plan_(plan), file_(path) {
        layout_.validate();
        if (!extent.valid())
            throw InvalidArgument("extent max must exceed extent min on each axis");

        const std::uint64_t c = layout_.image_size[Dim::C];
        const std::uint64_t t = layout_.image_size[Dim::T];
        records_.resize(plan_.level_count());
        for (std::size_t k = 0; k < plan_.level_count(); ++k)
            records_[k].resize(chunks_in_level(plan_.levels[k], c, t));

        write_header(extent);
    }

    void write_chunk(const CompressedChunk& chunk) override {
        if (finalized_) throw Error("backend already finalized");
        const ChunkKey& key = chunk.key;
        if (key.level >= plan_.level_count())
            throw InvalidArgument("chunk level out of range");
        const PyramidLevel& level = plan_.levels[key.level];
        if (key.t >= layout_.image_size[Dim::T] || key.c >= layout_.image_size[Dim::C] ||
            key.bx >= level.chunk_count[0] || key.by >= level.chunk_count[1] ||
            key.bz >= level.chunk_count[2])
            throw InvalidArgument("chunk index out of range");
        if (chunk.raw_length != layout_.internal_block_bytes())
            throw InvalidArgument("chunk raw length must equal the internal block size");

        const std::uint64_t slot = chunk_slot(key, level, layout_.image_size[Dim::C]);
        ChunkRecord& record = records_[key.level][slot];
        if (record.offset != 0)
            throw DuplicateChunkError("chunk written twice at level " +
                                      std::to_string(key.level));

        record.offset = file_.offset();
        record.compressed_length = chunk.payload.size();
        record.raw_length = static_cast<std::uint32_t>(chunk.raw_length);
        record.checksum = chunk.checksum;
        record.codec = chunk.codec;
        file_.write(chunk.payload.data(), chunk.payload.size());
        ++chunks_written_;
    }

    void write_metadata(const Parameters& parameters,
                        const std::vector<TimePointInfo>& time_info,
                        const std::vector<ChannelColorInfo>& color_info) override {
        if (finalized_) throw Error("backend already finalized");
        parameters_ = parameters;
        time_info_ = time_info;
        color_info_ = color_info;
    }

    void finalize() override {
        if (finalized_) throw Error("backend already finalized");

        std::uint64_t total = 0, missing = 0;
        for (const auto& level : records_) {
            total += level.size();
            for (const auto& r : level)
                if (r.offset == 0) ++missing;
        }
        if (missing > 0)
            throw MissingChunksError("cannot finalize: " + std::to_string(missing) +
                                     " of " + std::to_string(total) +
                                     " chunks never written");

        const std::uint64_t index_offset = file_.offset();
        for (const auto& level : records_) {
            for (const auto& r : level) {
                u64(r.offset);
                u64(r.compressed_length);
                u32(r.raw_length);
                u32(r.checksum);
                u32(r.codec);
                u32(0); // reserved
            }
        }

        const std::uint64_t metadata_offset = file_.offset();
        write_metadata_block();

        u64(index_offset);
        u64(metadata_offset);
        file_.write(kFooterMagic, sizeof(kFooterMagic));
        file_.close();
        finalized_ = true;
    }

private:
    void u32(std::uint32_t v) { file_.write(&v, 4); }
    void u64(std::uint64_t v) { file_.write(&v, 8); }
    void f32(float v) { file_.write(&v, 4); }
    void f64(double v) { file_.write(&v, 8); }
    void text(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        file_.write(s.data(), s.size());
    }

    void write_header(const ImageExtent& extent) {
        file_.write(kHeaderMagic, sizeof(kHeaderMagic));
        u32(kFormatVersion);
        u32(static_cast<std::uint32_t>(layout_.data_type));
        for (auto d : kAllDims) u64(layout_.image_size[d]);
        for (auto b : layout_.internal_block_size) u64(b);
        u32(static_cast<std::uint32_t>(plan_.level_count()));
        for (const auto& level : plan_.levels)
            for (auto s : level.size) u64(s);
        f64(extent.min_x);
        f64(extent.min_y);
        f64(extent.min_z);
        f64(extent.max_x);
        f64(extent.max_y);
        f64(extent.max_z);
    }

    void write_metadata_block() {
        u32(static_cast<std::uint32_t>(parameters_.sections().size()));
        for (const auto& section : parameters_.sections()) {
            text(section.name);
            u32(static_cast<std::uint32_t>(section.entries.size()));
            for (const auto& [name, value] : section.entries) {
                text(name);
                text(value);
            }
        }

        const std::uint64_t channels = layout_.image_size[Dim::C];
        for (std::uint64_t c = 0; c < channels; ++c) {
            const ChannelColorInfo info =
                c < color_info_.size() ? color_info_[c] : default_color();
            for (float v : info.rgba) f32(v);
            f32(info.range_min);
            f32(info.range_max);
        }

        const std::uint64_t timepoints = layout_.image_size[Dim::T];
        for (std::uint64_t t = 0; t < timepoints; ++t)
            text(t < time_info_.size() ? time_info_[t].timestamp : std::string());
    }

    [[nodiscard]] ChannelColorInfo default_color() const {
        ChannelColorInfo info;
        switch (layout_.data_type) {
            case DataType::u8: info.range_max = 255.0f; break;
            case DataType::u16: info.range_max = 65535.0f; break;
            case DataType::u32: info.range_max = 4294967295.0f; break;
            case DataType::f32: info.range_max = 1.0f; break;
        }
        return info;
    }

    ImageLayout layout_;
    PyramidPlan plan_;
    OutputFile file_;
    std::vector<std::vector<ChunkRecord>> records_;
    std::uint64_t chunks_written_ = 0;
    Parameters parameters_;
    std::vector<TimePointInfo> time_info_;
    std::vector<ChannelColorInfo> color_info_;
    bool finalized_ = false;
};

} // namespace

std::unique_ptr<BackendWriter> open_reference(const std::string& path,
                                              const ImageLayout& layout,
                                              const PyramidPlan& plan,
                                              const ImageExtent& extent) {
    return std::make_unique<ReferenceBackend>(path, layout, plan, extent);
}

BackendFactory reference_backend_factory() {
    return [](const std::string& path, const ImageLayout& layout,
              const PyramidPlan& plan, const ImageExtent& extent) {
        return open_reference(path, layout, plan, extent);
    };
}

} // namespace bwmr
