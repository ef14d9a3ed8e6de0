// bwmr: convert, benchmark, inspect and verify blockwise multi-resolution
// image containers.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bwmr/generators.hpp"
#include "bwmr/reader.hpp"
#include "bwmr/writer.hpp"

namespace fs = std::filesystem;
using namespace bwmr;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitMismatch = 3;

constexpr double kMB = 1024.0 * 1024.0;

// ---------------------------------------------------------------------------
// Flag parsing helpers
// ---------------------------------------------------------------------------

std::vector<std::uint64_t> parse_u64_list(const std::string& text, std::size_t count,
                                          const char* what) {
    std::vector<std::uint64_t> values;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        values.push_back(std::stoull(item));
    if (count != 0 && values.size() != count)
        throw InvalidArgument(std::string(what) + " needs " + std::to_string(count) +
                              " comma-separated values, got '" + text + "'");
    return values;
}

Size5D parse_size5d(const std::string& text, const char* what) {
    const auto v = parse_u64_list(text, 5, what);
    return Size5D(v[0], v[1], v[2], v[3], v[4]);
}

DimensionSequence5D parse_order(const std::string& text) {
    if (text.size() != 5)
        throw InvalidArgument("--order must be a permutation of XYZCT");
    DimensionSequence5D seq;
    for (std::size_t i = 0; i < 5; ++i) {
        switch (text[i]) {
            case 'X': case 'x': seq.order[i] = Dim::X; break;
            case 'Y': case 'y': seq.order[i] = Dim::Y; break;
            case 'Z': case 'z': seq.order[i] = Dim::Z; break;
            case 'C': case 'c': seq.order[i] = Dim::C; break;
            case 'T': case 't': seq.order[i] = Dim::T; break;
            default: throw InvalidArgument("--order must be a permutation of XYZCT");
        }
    }
    if (!seq.is_permutation())
        throw InvalidArgument("--order must be a permutation of XYZCT");
    return seq;
}

DataType parse_type(const std::string& text) {
    if (text == "u8") return DataType::u8;
    if (text == "u16") return DataType::u16;
    if (text == "u32") return DataType::u32;
    if (text == "f32") return DataType::f32;
    throw InvalidArgument("--type must be one of u8|u16|u32|f32");
}

/// "shuffle+gzip2", "gzip:9", "lz4", "none", ...
CompressionSpec parse_method(std::string text) {
    bool shuffle = false;
    const std::string prefix = "shuffle+";
    if (text.rfind(prefix, 0) == 0) {
        shuffle = true;
        text = text.substr(prefix.size());
    }
    return CompressionSpec::parse(text, shuffle);
}

// ---------------------------------------------------------------------------
// Block sources
// ---------------------------------------------------------------------------

/// Headerless voxel stream in X-fastest (X,Y,Z,C,T) order, sizes from flags.
class RawVolumeSource {
public:
    RawVolumeSource(const std::string& path, const Size5D& size, DataType type)
        : size_(size), type_(type), fd_(::open(path.c_str(), O_RDONLY)) {
        if (fd_ < 0) throw IoError("cannot open raw input '" + path + "'");
        const std::uint64_t expect = size.total() * bytes_per_element(type);
        const auto actual = fs::file_size(path);
        if (actual != expect)
            throw InvalidArgument("raw input is " + std::to_string(actual) +
                                  " bytes, but --size implies " +
                                  std::to_string(expect));
    }
    ~RawVolumeSource() {
        if (fd_ >= 0) ::close(fd_);
    }

    void fill_block(const BlockIndex5D& index, const Size5D& block,
                    std::span<std::byte> out) const {
        const std::size_t esize = bytes_per_element(type_);
        std::memset(out.data(), 0, out.size());
        Index5D origin;
        Size5D n;
        for (auto d : kAllDims) {
            origin[d] = index[d] * block[d];
            n[d] = std::min(block[d], size_[d] - origin[d]);
        }
        for (std::uint64_t t = 0; t < n[Dim::T]; ++t)
        for (std::uint64_t c = 0; c < n[Dim::C]; ++c)
        for (std::uint64_t z = 0; z < n[Dim::Z]; ++z)
        for (std::uint64_t y = 0; y < n[Dim::Y]; ++y) {
            const std::uint64_t src =
                origin[Dim::X] +
                size_[Dim::X] *
                    ((origin[Dim::Y] + y) +
                     size_[Dim::Y] *
                         ((origin[Dim::Z] + z) +
                          size_[Dim::Z] * ((origin[Dim::C] + c) +
                                           size_[Dim::C] * (origin[Dim::T] + t))));
            const std::uint64_t dst =
                block[Dim::X] * (y + block[Dim::Y] * (z + block[Dim::Z] *
                                                              (c + block[Dim::C] * t)));
            const std::size_t bytes = n[Dim::X] * esize;
            std::size_t done = 0;
            while (done < bytes) {
                const ssize_t got = ::pread(fd_, out.data() + dst * esize + done,
                                            bytes - done, src * esize + done);
                if (got <= 0) throw IoError("short read from raw input");
                done += static_cast<std::size_t>(got);
            }
        }
    }

private:
    Size5D size_;
    DataType type_;
    int fd_;
};

struct InputSpec {
    std::optional<SyntheticKind> synthetic;
    std::string raw_path;
    std::uint64_t seed = 0;
};

/// Streams every block of the image to the writer in the given loop order
/// (first letter of the order varies fastest).
template <typename FillBlock>
void stream_blocks(Writer& writer, const Size5D& image, const Size5D& block,
                   const DimensionSequence5D& order, FillBlock&& fill) {
    const Size5D counts = block_count(image, block);
    std::vector<std::byte> data(block.total() *
                                bytes_per_element(writer.layout().data_type));
    BlockIndex5D index;
    const auto& dims = order.order;
    // Odometer over block indices: dims[0] spins fastest.
    for (;;) {
        fill(index, data);
        writer.copy_block(data, index);
        std::size_t i = 0;
        for (; i < kDimCount; ++i) {
            const Dim d = dims[i];
            if (++index[d] < counts[d]) break;
            index[d] = 0;
        }
        if (i == kDimCount) break;
    }
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

struct ConvertConfig {
    std::string output;
    std::string size_text, block_text = "0,0,0,0,0";
    std::string order_text = "XYZCT";
    std::string type_text = "u16";
    std::string compress_text = "gzip:2";
    bool shuffle = false;
    unsigned threads = 0;
    bool force_z1 = false;
    std::string synthetic_text;
    std::string raw_path;
    std::uint64_t seed = 0;
    std::string internal_text;
    std::string extent_text;
    bool quiet = false;
};

WriteSummary run_convert(const ConvertConfig& cfg) {
    if (cfg.synthetic_text.empty() && cfg.raw_path.empty())
        throw InvalidArgument("need an input: --synthetic NAME or --raw PATH");
    if (!cfg.synthetic_text.empty() && !cfg.raw_path.empty())
        throw InvalidArgument("--synthetic and --raw are mutually exclusive");
    if (cfg.size_text.empty())
        throw InvalidArgument("--size X,Y,Z,C,T is required");

    ImageLayout layout;
    layout.image_size = parse_size5d(cfg.size_text, "--size");
    layout.data_type = parse_type(cfg.type_text);
    layout.input_block_size = cfg.block_text == "0,0,0,0,0"
                                  ? Size5D(std::min<std::uint64_t>(
                                               layout.image_size[Dim::X], 256),
                                           std::min<std::uint64_t>(
                                               layout.image_size[Dim::Y], 256),
                                           1, 1, 1)
                                  : parse_size5d(cfg.block_text, "--block");
    layout.input_sequence = DimensionSequence5D{}; // blocks built X-fastest
    if (!cfg.internal_text.empty()) {
        const auto v = parse_u64_list(cfg.internal_text, 3, "--internal-block");
        layout.internal_block_size = {v[0], v[1], v[2]};
    }

    ImageExtent extent;
    if (cfg.extent_text.empty()) {
        extent.max_x = static_cast<double>(layout.image_size[Dim::X]);
        extent.max_y = static_cast<double>(layout.image_size[Dim::Y]);
        extent.max_z = static_cast<double>(layout.image_size[Dim::Z]);
    } else {
        std::vector<double> v;
        std::stringstream ss(cfg.extent_text);
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
        if (v.size() != 6)
            throw InvalidArgument("--extent needs minX,minY,minZ,maxX,maxY,maxZ");
        extent = ImageExtent{v[0], v[1], v[2], v[3], v[4], v[5]};
    }

    WriterOptions options;
    options.thread_count = cfg.threads;
    options.compression = CompressionSpec::parse(cfg.compress_text, cfg.shuffle);
    options.force_block_z1 = cfg.force_z1;

    int last_percent = -10;
    ProgressCallback progress;
    if (!cfg.quiet) {
        progress = [&last_percent](double fraction) {
            const int percent = static_cast<int>(fraction * 100.0);
            if (percent >= last_percent + 10 || percent == 100) {
                if (percent != last_percent) {
                    std::cout << "progress " << percent << "%\n";
                    last_percent = percent;
                }
            }
        };
    }

    Writer writer(layout, extent, options, cfg.output, reference_backend_factory(),
                  progress);

    const DimensionSequence5D order = parse_order(cfg.order_text);
    if (!cfg.synthetic_text.empty()) {
        SyntheticImage synth(parse_synthetic(cfg.synthetic_text), cfg.seed,
                             layout.image_size, layout.data_type);
        stream_blocks(writer, layout.image_size, layout.input_block_size, order,
                      [&](const BlockIndex5D& index, std::span<std::byte> out) {
                          synth.fill_block(index, layout.input_block_size,
                                           layout.input_sequence, out);
                      });
    } else {
        RawVolumeSource raw(cfg.raw_path, layout.image_size, layout.data_type);
        stream_blocks(writer, layout.image_size, layout.input_block_size, order,
                      [&](const BlockIndex5D& index, std::span<std::byte> out) {
                          raw.fill_block(index, layout.input_block_size, out);
                      });
    }

    Parameters parameters;
    parameters.set("Image", "Generator",
                   cfg.synthetic_text.empty() ? "raw" : cfg.synthetic_text);
    parameters.set("Image", "Order", cfg.order_text);
    if (!cfg.synthetic_text.empty())
        parameters.set("Image", "Seed", std::to_string(cfg.seed));
    return writer.finish(parameters);
}

void print_summary(const WriteSummary& s, double seconds) {
    std::printf("input        %.2f MB\n", s.input_bytes / kMB);
    std::printf("file         %.2f MB\n", s.file_bytes / kMB);
    std::printf("chunks       %" PRIu64 "\n", s.chunk_count);
    for (std::size_t k = 0; k < s.raw_bytes_per_level.size(); ++k)
        std::printf("level %zu      raw %.2f MB -> stored %.2f MB\n", k,
                    s.raw_bytes_per_level[k] / kMB,
                    s.compressed_bytes_per_level[k] / kMB);
    std::printf("ratio        %.3f (stored raw / stored payload)\n",
                s.compression_ratio);
    std::printf("peak memory  %.2f MB\n", s.peak_memory_bytes / kMB);
    if (seconds > 0)
        std::printf("throughput   %.1f MB/s (%.2f s)\n",
                    s.input_bytes / kMB / seconds, seconds);
}

// ---------------------------------------------------------------------------
// inspect
// ---------------------------------------------------------------------------

int run_inspect(const std::string& path) {
    ImageHandle handle = ImageHandle::open(path);
    const auto& size = handle.image_size();
    const auto vs = voxel_size(handle.extent(), size);

    std::printf("file          %s\n", path.c_str());
    std::printf("image size    %" PRIu64 " x %" PRIu64 " x %" PRIu64
                "  C=%" PRIu64 " T=%" PRIu64 "\n",
                size[Dim::X], size[Dim::Y], size[Dim::Z], size[Dim::C],
                size[Dim::T]);
    std::printf("data type     %s\n", data_type_name(handle.data_type()));
    const auto& e = handle.extent();
    std::printf("extent        (%g, %g, %g) .. (%g, %g, %g)\n", e.min_x, e.min_y,
                e.min_z, e.max_x, e.max_y, e.max_z);
    std::printf("voxel size    (%g, %g, %g)\n", vs[0], vs[1], vs[2]);
    const auto& block = handle.internal_block();
    std::printf("chunk size    %" PRIu64 " x %" PRIu64 " x %" PRIu64 "\n", block[0],
                block[1], block[2]);
    std::printf("levels        %zu\n", handle.plan().level_count());
    for (std::size_t k = 0; k < handle.plan().level_count(); ++k) {
        const auto& lv = handle.plan().levels[k];
        std::uint64_t stored = 0;
        for (const auto& r : handle.level_records(static_cast<std::uint32_t>(k)))
            stored += r.compressed_length;
        std::printf("  level %zu     %" PRIu64 " x %" PRIu64 " x %" PRIu64
                    "  chunks %" PRIu64 " x %" PRIu64 " x %" PRIu64
                    " (%" PRIu64 " total)  stored %.2f MB\n",
                    k, lv.size[0], lv.size[1], lv.size[2], lv.chunk_count[0],
                    lv.chunk_count[1], lv.chunk_count[2],
                    chunks_in_level(lv, size[Dim::C], size[Dim::T]), stored / kMB);
    }
    if (!handle.parameters().sections().empty()) {
        std::printf("metadata\n");
        for (const auto& section : handle.parameters().sections()) {
            std::printf("  [%s]\n", section.name.c_str());
            for (const auto& [name, value] : section.entries)
                std::printf("    %s = %s\n", name.c_str(), value.c_str());
        }
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Whole-image mean-pooling reference, one level at a time; voxel budget
/// keeps the quadratic-ish work bounded.
constexpr std::uint64_t kVerifyOracleVoxelLimit = 1ull << 22;

template <typename Elem>
bool compare_level0(const ImageHandle& handle, const std::vector<std::byte>& expect,
                    std::string& mismatch) {
    const auto& size = handle.image_size();
    const auto& block = handle.internal_block();
    const Elem* want = reinterpret_cast<const Elem*>(expect.data());
    const auto& lv0 = handle.plan().levels[0];

    for (std::uint64_t t = 0; t < size[Dim::T]; ++t)
    for (std::uint64_t c = 0; c < size[Dim::C]; ++c)
    for (std::uint64_t bz = 0; bz < lv0.chunk_count[2]; ++bz)
    for (std::uint64_t by = 0; by < lv0.chunk_count[1]; ++by)
    for (std::uint64_t bx = 0; bx < lv0.chunk_count[0]; ++bx) {
        const auto raw = handle.read_chunk(0, ChunkKey{0, t, c, bz, by, bx});
        const Elem* got = reinterpret_cast<const Elem*>(raw.data());
        const std::uint64_t x0 = bx * block[0], y0 = by * block[1], z0 = bz * block[2];
        const std::uint64_t nx = std::min(block[0], size[Dim::X] - x0);
        const std::uint64_t ny = std::min(block[1], size[Dim::Y] - y0);
        const std::uint64_t nz = std::min(block[2], size[Dim::Z] - z0);
        for (std::uint64_t z = 0; z < nz; ++z)
        for (std::uint64_t y = 0; y < ny; ++y)
        for (std::uint64_t x = 0; x < nx; ++x) {
            const Elem g = got[x + block[0] * (y + block[1] * z)];
            const std::uint64_t gx = x0 + x, gy = y0 + y, gz = z0 + z;
            const Elem w =
                want[gx + size[Dim::X] *
                              (gy + size[Dim::Y] *
                                        (gz + size[Dim::Z] *
                                                  (c + size[Dim::C] * t)))];
            if (g != w) {
                std::ostringstream os;
                os << "level 0 mismatch at (x=" << gx << ", y=" << gy
                   << ", z=" << gz << ", c=" << c << ", t=" << t << ")";
                mismatch = os.str();
                return false;
            }
        }
    }
    return true;
}

template <typename Elem>
std::vector<Elem> downsample_reference(const std::vector<Elem>& src,
                                       const std::array<std::uint64_t, 3>& s,
                                       const std::array<std::uint64_t, 3>& d,
                                       const std::array<bool, 3>& halved) {
    std::vector<Elem> dst(d[0] * d[1] * d[2]);
    const std::uint64_t f[3] = {halved[0] ? 2ull : 1ull, halved[1] ? 2ull : 1ull,
                                halved[2] ? 2ull : 1ull};
    for (std::uint64_t z = 0; z < d[2]; ++z)
    for (std::uint64_t y = 0; y < d[1]; ++y)
    for (std::uint64_t x = 0; x < d[0]; ++x) {
        double sum = 0;
        std::uint64_t n = 0;
        for (std::uint64_t sz = z * f[2]; sz < std::min(z * f[2] + f[2], s[2]); ++sz)
        for (std::uint64_t sy = y * f[1]; sy < std::min(y * f[1] + f[1], s[1]); ++sy)
        for (std::uint64_t sx = x * f[0]; sx < std::min(x * f[0] + f[0], s[0]); ++sx) {
            sum += static_cast<double>(src[sx + s[0] * (sy + s[1] * sz)]);
            ++n;
        }
        const double mean = sum / static_cast<double>(n);
        if constexpr (std::is_floating_point_v<Elem>)
            dst[x + d[0] * (y + d[1] * z)] = static_cast<Elem>(mean);
        else
            dst[x + d[0] * (y + d[1] * z)] =
                static_cast<Elem>(static_cast<std::uint64_t>(mean + 0.5));
    }
    return dst;
}

template <typename Elem>
bool verify_pyramid(const ImageHandle& handle, const std::vector<std::byte>& volume,
                    std::string& mismatch) {
    const auto& size = handle.image_size();
    const auto& plan = handle.plan();
    const auto& block = plan.block;
    const Elem* base = reinterpret_cast<const Elem*>(volume.data());
    const std::uint64_t plane = size[Dim::X] * size[Dim::Y] * size[Dim::Z];

    for (std::uint64_t t = 0; t < size[Dim::T]; ++t)
    for (std::uint64_t c = 0; c < size[Dim::C]; ++c) {
        std::vector<Elem> level(base + plane * (c + size[Dim::C] * t),
                                base + plane * (c + size[Dim::C] * t) + plane);
        std::array<std::uint64_t, 3> cur = plan.levels[0].size;
        for (std::uint32_t k = 1; k < plan.level_count(); ++k) {
            level = downsample_reference(level, cur, plan.levels[k].size,
                                         plan.levels[k].halved);
            cur = plan.levels[k].size;

            const auto& lv = plan.levels[k];
            for (std::uint64_t bz = 0; bz < lv.chunk_count[2]; ++bz)
            for (std::uint64_t by = 0; by < lv.chunk_count[1]; ++by)
            for (std::uint64_t bx = 0; bx < lv.chunk_count[0]; ++bx) {
                const auto raw = handle.read_chunk(k, ChunkKey{k, t, c, bz, by, bx});
                const Elem* got = reinterpret_cast<const Elem*>(raw.data());
                const std::uint64_t x0 = bx * block[0], y0 = by * block[1],
                                    z0 = bz * block[2];
                const std::uint64_t nx = std::min(block[0], cur[0] - x0);
                const std::uint64_t ny = std::min(block[1], cur[1] - y0);
                const std::uint64_t nz = std::min(block[2], cur[2] - z0);
                for (std::uint64_t z = 0; z < nz; ++z)
                for (std::uint64_t y = 0; y < ny; ++y)
                for (std::uint64_t x = 0; x < nx; ++x) {
                    const Elem g = got[x + block[0] * (y + block[1] * z)];
                    const Elem w = level[(x0 + x) + cur[0] * ((y0 + y) + cur[1] * (z0 + z))];
                    if (g != w) {
                        std::ostringstream os;
                        os << "level " << k << " mismatch at (x=" << x0 + x
                           << ", y=" << y0 + y << ", z=" << z0 + z << ", c=" << c
                           << ", t=" << t << ")";
                        mismatch = os.str();
                        return false;
                    }
                }
            }
        }
    }
    return true;
}

int run_verify(const std::string& path, const InputSpec& input) {
    ImageHandle handle = ImageHandle::open(path);
    const auto& size = handle.image_size();

    std::vector<std::byte> volume;
    if (input.synthetic) {
        SyntheticImage synth(*input.synthetic, input.seed, size, handle.data_type());
        volume = synth.generate_volume();
    } else {
        std::ifstream in(input.raw_path, std::ios::binary);
        if (!in) throw IoError("cannot open raw input '" + input.raw_path + "'");
        volume.resize(size.total() * bytes_per_element(handle.data_type()));
        in.read(reinterpret_cast<char*>(volume.data()),
                static_cast<std::streamsize>(volume.size()));
        if (static_cast<std::uint64_t>(in.gcount()) != volume.size())
            throw InvalidArgument("raw input smaller than the image in the file");
    }

    std::string mismatch;
    bool ok = false;
    switch (handle.data_type()) {
        case DataType::u8: ok = compare_level0<std::uint8_t>(handle, volume, mismatch); break;
        case DataType::u16: ok = compare_level0<std::uint16_t>(handle, volume, mismatch); break;
        case DataType::u32: ok = compare_level0<std::uint32_t>(handle, volume, mismatch); break;
        case DataType::f32: ok = compare_level0<float>(handle, volume, mismatch); break;
    }
    if (!ok) {
        std::cout << "FAIL: " << mismatch << "\n";
        return kExitMismatch;
    }
    std::cout << "level 0 verified (" << size.total() << " voxels)\n";

    if (size[Dim::X] * size[Dim::Y] * size[Dim::Z] <= kVerifyOracleVoxelLimit) {
        switch (handle.data_type()) {
            case DataType::u8: ok = verify_pyramid<std::uint8_t>(handle, volume, mismatch); break;
            case DataType::u16: ok = verify_pyramid<std::uint16_t>(handle, volume, mismatch); break;
            case DataType::u32: ok = verify_pyramid<std::uint32_t>(handle, volume, mismatch); break;
            case DataType::f32: ok = verify_pyramid<float>(handle, volume, mismatch); break;
        }
        if (!ok) {
            std::cout << "FAIL: " << mismatch << "\n";
            return kExitMismatch;
        }
        std::cout << "pyramid verified against the window-mean reference ("
                  << handle.plan().level_count() << " levels)\n";
    } else {
        std::cout << "pyramid check skipped (volume above "
                  << kVerifyOracleVoxelLimit << " voxels)\n";
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchRow {
    std::string method;
    bool shuffle = false;
    unsigned threads = 0;
    double input_mb = 0, seconds = 0, mb_per_s = 0, file_mb = 0, ratio = 0, peak_mb = 0;
};

int run_bench(const std::string& size_text, const std::string& block_text,
              const std::string& threads_text, const std::string& methods_text,
              std::uint64_t seed, const std::string& csv_path,
              const std::string& order_text, const std::string& out_dir) {
    const Size5D size = parse_size5d(size_text, "--size");
    const Size5D block = parse_size5d(block_text, "--block");
    const DimensionSequence5D order = parse_order(order_text);

    std::vector<unsigned> thread_counts;
    for (auto v : parse_u64_list(threads_text, 0, "--threads"))
        thread_counts.push_back(static_cast<unsigned>(v));
    if (thread_counts.empty()) thread_counts.push_back(1);

    std::vector<std::string> methods;
    {
        std::stringstream ss(methods_text);
        std::string item;
        while (std::getline(ss, item, ',')) methods.push_back(item);
    }

    const fs::path dir = out_dir.empty() ? fs::temp_directory_path() : fs::path(out_dir);
    fs::create_directories(dir);

    std::vector<BenchRow> rows;
    std::printf("%-16s %-8s %-8s %10s %9s %9s %9s %7s %9s\n", "method", "shuffle",
                "threads", "input_MB", "seconds", "MB_per_s", "file_MB", "ratio",
                "peak_MB");
    for (const auto& method : methods) {
        const CompressionSpec spec = parse_method(method);
        for (unsigned threads : thread_counts) {
            const fs::path out =
                dir / ("bwmr-bench-" + std::to_string(::getpid()) + "-" +
                       std::to_string(rows.size()) + ".bwmr");

            ConvertConfig cfg;
            cfg.output = out.string();
            cfg.size_text = size_text;
            cfg.block_text = block_text;
            cfg.order_text = order_text;
            cfg.compress_text = spec.shuffle ? method.substr(8) : method;
            cfg.shuffle = spec.shuffle;
            cfg.threads = threads;
            cfg.synthetic_text = "smooth-noise";
            cfg.seed = seed;
            cfg.quiet = true;

            const auto start = std::chrono::steady_clock::now();
            const WriteSummary summary = run_convert(cfg);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();

            BenchRow row;
            row.method = spec.name();
            row.shuffle = spec.shuffle;
            row.threads = threads;
            row.input_mb = summary.input_bytes / kMB;
            row.seconds = seconds;
            row.mb_per_s = row.input_mb / seconds;
            row.file_mb = summary.file_bytes / kMB;
            row.ratio = row.input_mb / row.file_mb;
            row.peak_mb = summary.peak_memory_bytes / kMB;
            rows.push_back(row);

            std::printf("%-16s %-8s %-8u %10.2f %9.3f %9.1f %9.2f %7.3f %9.2f\n",
                        row.method.c_str(), row.shuffle ? "yes" : "no", row.threads,
                        row.input_mb, row.seconds, row.mb_per_s, row.file_mb,
                        row.ratio, row.peak_mb);
            std::error_code ec;
            fs::remove(out, ec);
        }
    }

    if (!csv_path.empty()) {
        std::ofstream csv(csv_path);
        if (!csv) throw IoError("cannot write CSV '" + csv_path + "'");
        csv << "method,shuffle,threads,input_MB,seconds,MB_per_s,file_MB,ratio,peak_MB\n";
        for (const auto& r : rows)
            csv << r.method << ',' << (r.shuffle ? 1 : 0) << ',' << r.threads << ','
                << r.input_mb << ',' << r.seconds << ',' << r.mb_per_s << ','
                << r.file_mb << ',' << r.ratio << ',' << r.peak_mb << '\n';
    }
    (void)size;
    (void)block;
    (void)order;
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"blockwise multi-resolution image container tool"};
    app.require_subcommand(1);

    // convert
    ConvertConfig convert_cfg;
    auto* convert = app.add_subcommand("convert", "stream an input into a container");
    convert->add_option("output", convert_cfg.output, "output .bwmr path")->required();
    convert->add_option("--size", convert_cfg.size_text, "image size X,Y,Z,C,T");
    convert->add_option("--block", convert_cfg.block_text, "input block size X,Y,Z,C,T");
    convert->add_option("--order", convert_cfg.order_text,
                        "block streaming order (permutation of XYZCT)");
    convert->add_option("--type", convert_cfg.type_text, "u8|u16|u32|f32");
    convert->add_option("--compress", convert_cfg.compress_text, "none|gzip:N|lz4");
    convert->add_flag("--shuffle", convert_cfg.shuffle, "byte-shuffle before encoding");
    convert->add_option("--threads", convert_cfg.threads, "compression workers");
    convert->add_flag("--force-z1", convert_cfg.force_z1, "force internal chunk Z=1");
    convert->add_option("--synthetic", convert_cfg.synthetic_text,
                        "zeros|ramp|smooth-noise");
    convert->add_option("--seed", convert_cfg.seed, "synthetic generator seed");
    convert->add_option("--raw", convert_cfg.raw_path,
                        "raw voxel stream, X-fastest XYZCT order");
    convert->add_option("--internal-block", convert_cfg.internal_text,
                        "internal chunk size X,Y,Z");
    convert->add_option("--extent", convert_cfg.extent_text,
                        "physical extent minX,minY,minZ,maxX,maxY,maxZ");
    convert->add_flag("--quiet", convert_cfg.quiet, "suppress progress output");

    // bench
    std::string bench_size = "256,256,32,2,1";
    std::string bench_block = "128,128,1,1,1";
    std::string bench_threads = "1,2,4";
    std::string bench_methods = "none,gzip2,lz4,shuffle+lz4,shuffle+gzip2";
    std::string bench_csv, bench_order = "XYZCT", bench_dir;
    std::uint64_t bench_seed = 7;
    auto* bench = app.add_subcommand("bench", "measure throughput and ratios");
    bench->add_option("--size", bench_size, "image size X,Y,Z,C,T");
    bench->add_option("--block", bench_block, "input block size X,Y,Z,C,T");
    bench->add_option("--threads", bench_threads, "comma list of worker counts");
    bench->add_option("--methods", bench_methods, "comma list of methods");
    bench->add_option("--seed", bench_seed, "synthetic seed");
    bench->add_option("--csv", bench_csv, "also write rows as CSV");
    bench->add_option("--order", bench_order, "block streaming order");
    bench->add_option("--out-dir", bench_dir, "where to put the scratch files");

    // inspect
    std::string inspect_path;
    auto* inspect = app.add_subcommand("inspect", "describe a container");
    inspect->add_option("path", inspect_path, "container file")->required();

    // verify
    std::string verify_path, verify_synth, verify_raw;
    std::uint64_t verify_seed = 0;
    auto* verify = app.add_subcommand("verify", "re-generate the input and compare");
    verify->add_option("path", verify_path, "container file")->required();
    verify->add_option("--synthetic", verify_synth, "zeros|ramp|smooth-noise");
    verify->add_option("--seed", verify_seed, "synthetic generator seed");
    verify->add_option("--raw", verify_raw, "raw voxel stream to compare against");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (convert->parsed()) {
            const auto start = std::chrono::steady_clock::now();
            const WriteSummary summary = run_convert(convert_cfg);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            print_summary(summary, seconds);
            return kExitOk;
        }
        if (bench->parsed())
            return run_bench(bench_size, bench_block, bench_threads, bench_methods,
                             bench_seed, bench_csv, bench_order, bench_dir);
        if (inspect->parsed()) return run_inspect(inspect_path);
        if (verify->parsed()) {
            InputSpec input;
            if (!verify_synth.empty()) {
                input.synthetic = parse_synthetic(verify_synth);
                input.seed = verify_seed;
            } else if (!verify_raw.empty()) {
                input.raw_path = verify_raw;
            } else {
                throw InvalidArgument("verify needs --synthetic NAME or --raw PATH");
            }
            return run_verify(verify_path, input);
        }
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: bad numeric value (" << e.what() << ")\n";
        return kExitUsage;
    } catch (const std::out_of_range& e) {
        std::cerr << "error: numeric value out of range (" << e.what() << ")\n";
        return kExitUsage;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    }
    return kExitUsage;
}
