#include "bwmr/reader.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <cstring>

static_assert(std::endian::native == std::endian::little,
              "container parsing assumes a little-endian host");

namespace bwmr {
namespace {

void pread_exact(int fd, void* out, std::size_t size, std::uint64_t offset,
                 const char* what) {
    std::size_t done = 0;
    while (done < size) {
        const ssize_t n = ::pread(fd, static_cast<char*>(out) + done, size - done,
                                  static_cast<off_t>(offset + done));
        if (n < 0) throw IoError(std::string("read failed in ") + what);
        if (n == 0)
            throw TruncatedFileError(std::string("file ends inside ") + what);
        done += static_cast<std::size_t>(n);
    }
}

/// Sequential little-endian parser over a byte range of the file.
class Cursor {
public:
    Cursor(int fd, std::uint64_t offset, std::uint64_t end, const char* what)
        : fd_(fd), offset_(offset), end_(end), what_(what) {}

    std::uint32_t u32() { return scalar<std::uint32_t>(); }
    std::uint64_t u64() { return scalar<std::uint64_t>(); }
    float f32() { return scalar<float>(); }
    double f64() { return scalar<double>(); }

    std::string text() {
        const std::uint32_t n = u32();
        if (n > remaining())
            throw TruncatedFileError(std::string("file ends inside ") + what_);
        std::string s(n, '\0');
        if (n > 0) pread_exact(fd_, s.data(), n, offset_, what_);
        offset_ += n;
        return s;
    }

    void raw(void* out, std::size_t n) {
        if (n > remaining())
            throw TruncatedFileError(std::string("file ends inside ") + what_);
        pread_exact(fd_, out, n, offset_, what_);
        offset_ += n;
    }

    [[nodiscard]] std::uint64_t remaining() const noexcept {
        return end_ > offset_ ? end_ - offset_ : 0;
    }
    [[nodiscard]] std::uint64_t offset() const noexcept { return offset_; }

private:
    template <typename T>
    T scalar() {
        T v;
        raw(&v, sizeof(T));
        return v;
    }

    int fd_;
    std::uint64_t offset_;
    std::uint64_t end_;
    const char* what_;
};

} // namespace

ImageHandle::Fd& ImageHandle::Fd::operator=(Fd&& o) noexcept {
    if (this != &o) {
        if (fd >= 0) ::close(fd);
        fd = o.fd;
        o.fd = -1;
    }
    return *this;
}

ImageHandle::Fd::~Fd() {
    if (fd >= 0) ::close(fd);
}

ImageHandle ImageHandle::open(const std::string& path) {
    const int fd = ::open(path.c_str(), O_RDONLY);
    if (fd < 0) throw IoError("cannot open '" + path + "'");
    ImageHandle handle;
    handle.file_ = Fd(fd);

    struct stat st{};
    if (::fstat(fd, &st) != 0) throw IoError("cannot stat '" + path + "'");
    const std::uint64_t file_size = static_cast<std::uint64_t>(st.st_size);

    // Header magic first: a file too short to hold one is simply not ours.
    char magic[8];
    if (file_size < sizeof(magic))
        throw BadMagicError("'" + path + "' is too small to be a bwmr file");
    pread_exact(fd, magic, sizeof(magic), 0, "header magic");
    if (std::memcmp(magic, kHeaderMagic, sizeof(magic)) != 0)
        throw BadMagicError("'" + path + "' does not start with the bwmr magic");

    // Footer tail.
    if (file_size < sizeof(magic) + kFooterSize)
        throw TruncatedFileError("'" + path + "' has no footer");
    std::uint64_t tail[2];
    char tail_magic[8];
    pread_exact(fd, tail, 16, file_size - kFooterSize, "footer");
    pread_exact(fd, tail_magic, 8, file_size - 8, "footer magic");
    if (std::memcmp(tail_magic, kFooterMagic, 8) != 0)
        throw TruncatedFileError("'" + path + "' footer magic missing (unfinished write?)");
    const std::uint64_t index_offset = tail[0];
    const std::uint64_t metadata_offset = tail[1];
    if (index_offset >= file_size || metadata_offset >= file_size ||
        index_offset > metadata_offset)
        throw TruncatedFileError("'" + path + "' footer offsets out of range");

    // Header body.
    Cursor header(fd, sizeof(magic), file_size, "header");
    const std::uint32_t version = header.u32();
    if (version != kFormatVersion)
        throw VersionError("unsupported format version " + std::to_string(version));
    const std::uint32_t type_code = header.u32();
    if (type_code < 1 || type_code > 4)
        throw CorruptStreamError("unknown data type code " + std::to_string(type_code));
    handle.data_type_ = static_cast<DataType>(type_code);
    for (auto d : kAllDims) handle.image_size_[d] = header.u64();
    if (!handle.image_size_.valid())
        throw CorruptStreamError("header image size has a zero component");
    std::array<std::uint64_t, 3> block{};
    for (auto& b : block) b = header.u64();

    const std::uint32_t level_count = header.u32();
    if (level_count == 0 || level_count > 64)
        throw CorruptStreamError("implausible level count");
    std::vector<std::array<std::uint64_t, 3>> level_sizes(level_count);
    for (auto& s : level_sizes)
        for (auto& v : s) v = header.u64();
    handle.extent_.min_x = header.f64();
    handle.extent_.min_y = header.f64();
    handle.extent_.min_z = header.f64();
    handle.extent_.max_x = header.f64();
    handle.extent_.max_y = header.f64();
    handle.extent_.max_z = header.f64();

    // Rebuild the plan from stored level sizes and sanity-check it.
    handle.plan_.block = block;
    handle.plan_.levels.resize(level_count);
    for (std::uint32_t k = 0; k < level_count; ++k) {
        auto& level = handle.plan_.levels[k];
        level.size = level_sizes[k];
        for (int d = 0; d < 3; ++d) {
            if (level.size[d] == 0 || block[d] == 0)
                throw CorruptStreamError("zero level or block size in header");
            level.chunk_count[d] = (level.size[d] - 1) / block[d] + 1;
            level.halved[d] =
                k > 0 && level.size[d] == (level_sizes[k - 1][d] + 1) / 2 &&
                level_sizes[k - 1][d] > 1;
        }
    }

    // Index.
    const std::uint64_t channels = handle.image_size_[Dim::C];
    const std::uint64_t timepoints = handle.image_size_[Dim::T];
    Cursor index(fd, index_offset, file_size, "chunk index");
    handle.records_.resize(level_count);
    for (std::uint32_t k = 0; k < level_count; ++k) {
        const std::uint64_t n =
            chunks_in_level(handle.plan_.levels[k], channels, timepoints);
        auto& records = handle.records_[k];
        records.resize(n);
        for (auto& r : records) {
            r.offset = index.u64();
            r.compressed_length = index.u64();
            r.raw_length = index.u32();
            r.checksum = index.u32();
            r.codec = index.u32();
            (void)index.u32(); // reserved
            if (r.offset + r.compressed_length > file_size)
                throw TruncatedFileError("chunk payload extends past end of file");
        }
    }
    if (index.offset() != metadata_offset)
        throw CorruptStreamError("index does not end at the metadata offset");

    // Metadata.
    Cursor meta(fd, metadata_offset, file_size, "metadata");
    const std::uint32_t section_count = meta.u32();
    for (std::uint32_t s = 0; s < section_count; ++s) {
        const std::string section = meta.text();
        const std::uint32_t param_count = meta.u32();
        for (std::uint32_t p = 0; p < param_count; ++p) {
            const std::string name = meta.text();
            const std::string value = meta.text();
            handle.parameters_.set(section, name, value);
        }
    }
    handle.colors_.resize(channels);
    for (auto& color : handle.colors_) {
        for (auto& v : color.rgba) v = meta.f32();
        color.range_min = meta.f32();
        color.range_max = meta.f32();
    }
    handle.times_.resize(timepoints);
    for (auto& t : handle.times_) t.timestamp = meta.text();

    return handle;
}

const std::vector<ChunkRecord>& ImageHandle::level_records(std::uint32_t level) const {
    if (level >= records_.size()) throw InvalidArgument("level out of range");
    return records_[level];
}

const ChunkRecord& ImageHandle::record(std::uint32_t level, const ChunkKey& key) const {
    if (level >= records_.size()) throw InvalidArgument("level out of range");
    const PyramidLevel& lv = plan_.levels[level];
    if (key.t >= image_size_[Dim::T] || key.c >= image_size_[Dim::C] ||
        key.bx >= lv.chunk_count[0] || key.by >= lv.chunk_count[1] ||
        key.bz >= lv.chunk_count[2])
        throw InvalidArgument("chunk index out of range");
    return records_[level][chunk_slot(key, lv, image_size_[Dim::C])];
}

std::vector<std::byte> ImageHandle::read_chunk(std::uint32_t level,
                                               const ChunkKey& key) const {
    const ChunkRecord& r = record(level, key);

    CompressedChunk chunk;
    chunk.key = key;
    chunk.key.level = level;
    chunk.raw_length = r.raw_length;
    chunk.checksum = r.checksum;
    chunk.codec = r.codec;
    chunk.payload.resize(r.compressed_length);
    if (r.compressed_length > 0)
        pread_exact(file_.fd, chunk.payload.data(), r.compressed_length, r.offset,
                    "chunk payload");

    const CompressionSpec spec = spec_from_codec_code(r.codec);
    return decompress_chunk(chunk, spec, bytes_per_element(data_type_));
}

std::vector<ChunkKey> ImageHandle::query_region(
    std::uint32_t level, const std::array<std::uint64_t, 3>& xyz_min,
    const std::array<std::uint64_t, 3>& xyz_max, std::uint64_t c,
    std::uint64_t t) const {
    if (level >= plan_.level_count()) throw InvalidArgument("level out of range");
    const PyramidLevel& lv = plan_.levels[level];
    if (c >= image_size_[Dim::C] || t >= image_size_[Dim::T])
        throw InvalidArgument("channel or timepoint out of range");
    for (int d = 0; d < 3; ++d) {
        if (xyz_min[d] >= xyz_max[d])
            throw InvalidArgument("region must be non-empty (half-open [min, max))");
        if (xyz_max[d] > lv.size[d])
            throw InvalidArgument("region exceeds the level size");
    }

    std::array<std::uint64_t, 3> lo{}, hi{};
    for (int d = 0; d < 3; ++d) {
        lo[d] = xyz_min[d] / plan_.block[d];
        hi[d] = (xyz_max[d] - 1) / plan_.block[d];
    }

    std::vector<ChunkKey> keys;
    keys.reserve((hi[0] - lo[0] + 1) * (hi[1] - lo[1] + 1) * (hi[2] - lo[2] + 1));
    for (std::uint64_t bz = lo[2]; bz <= hi[2]; ++bz)
        for (std::uint64_t by = lo[1]; by <= hi[1]; ++by)
            for (std::uint64_t bx = lo[0]; bx <= hi[0]; ++bx)
                keys.push_back(ChunkKey{level, t, c, bz, by, bx});
    return keys;
}

} // namespace bwmr
