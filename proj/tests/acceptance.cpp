// Acceptance suite: one criterion per function, one PASS/FAIL line each.
// Returns the number of failed criteria.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include "bwmr/generators.hpp"
#include "bwmr/reader.hpp"
#include "bwmr/writer.hpp"
#include "oracles.hpp"

using namespace bwmr;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::string detail;

    void require(bool condition, const std::string& what) {
        if (!condition && ok) {
            ok = false;
            detail = what;
        }
    }
};

fs::path scratch_dir() {
    static fs::path dir = [] {
        auto p = fs::temp_directory_path() /
                 ("bwmr_acceptance_" + std::to_string(::getpid()));
        fs::create_directories(p);
        return p;
    }();
    return dir;
}

WriteSummary stream_synthetic(const ImageLayout& layout, const std::string& path,
                              const WriterOptions& options, SyntheticKind kind,
                              std::uint64_t seed,
                              const DimensionSequence5D& order = {}) {
    Writer writer(layout, ImageExtent{0, 0, 0, 10, 10, 10}, options, path);
    SyntheticImage synth(kind, seed, layout.image_size, layout.data_type);
    const Size5D counts = block_count(layout.image_size, layout.input_block_size);
    std::vector<std::byte> data(layout.input_block_bytes());
    BlockIndex5D index;
    for (;;) {
        synth.fill_block(index, layout.input_block_size, layout.input_sequence, data);
        writer.copy_block(data, index);
        std::size_t i = 0;
        for (; i < kDimCount; ++i) {
            const Dim d = order[i];
            if (++index[d] < counts[d]) break;
            index[d] = 0;
        }
        if (i == kDimCount) break;
    }
    return writer.finish();
}

/// Reassembles level 0 of an open file into one X-fastest volume.
std::vector<std::byte> reassemble_level0(const ImageHandle& handle) {
    const auto& size = handle.image_size();
    const auto& block = handle.internal_block();
    const std::size_t esize = bytes_per_element(handle.data_type());
    std::vector<std::byte> volume(size.total() * esize);
    const auto& lv0 = handle.plan().levels[0];

    for (std::uint64_t t = 0; t < size[Dim::T]; ++t)
    for (std::uint64_t c = 0; c < size[Dim::C]; ++c)
    for (std::uint64_t bz = 0; bz < lv0.chunk_count[2]; ++bz)
    for (std::uint64_t by = 0; by < lv0.chunk_count[1]; ++by)
    for (std::uint64_t bx = 0; bx < lv0.chunk_count[0]; ++bx) {
        const auto raw = handle.read_chunk(0, ChunkKey{0, t, c, bz, by, bx});
        const std::uint64_t x0 = bx * block[0], y0 = by * block[1], z0 = bz * block[2];
        const std::uint64_t nx = std::min(block[0], size[Dim::X] - x0);
        const std::uint64_t ny = std::min(block[1], size[Dim::Y] - y0);
        const std::uint64_t nz = std::min(block[2], size[Dim::Z] - z0);
        for (std::uint64_t z = 0; z < nz; ++z)
        for (std::uint64_t y = 0; y < ny; ++y) {
            const std::uint64_t src = esize * (block[0] * (y + block[1] * z));
            const std::uint64_t dst =
                esize * (x0 + size[Dim::X] *
                                  ((y0 + y) +
                                   size[Dim::Y] *
                                       ((z0 + z) +
                                        size[Dim::Z] * (c + size[Dim::C] * t))));
            std::memcpy(volume.data() + dst, raw.data() + src, nx * esize);
        }
    }
    return volume;
}

// ---------------------------------------------------------------------------
// 1. Round-trip identity across every compression spec
// ---------------------------------------------------------------------------

Check criterion1() {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    ImageLayout layout;
    layout.image_size = Size5D(128, 128, 32, 2, 2);
    layout.data_type = DataType::u16;
    layout.input_block_size = Size5D(64, 64, 2, 1, 1);
    layout.internal_block_size = {64, 64, 8};

    const SyntheticImage synth(SyntheticKind::smooth_noise, 2024, layout.image_size,
                               DataType::u16);
    const auto expected = synth.generate_volume();

    int runs = 0;
    for (const std::string method : {"none", "gzip:1", "gzip:2", "gzip:9", "lz4"}) {
        for (const bool shuffle : {false, true}) {
            WriterOptions options;
            options.thread_count = 2;
            options.compression = CompressionSpec::parse(method, shuffle);
            const auto path =
                scratch_dir() / ("c1_" + std::to_string(runs++) + ".bwmr");
            stream_synthetic(layout, path.string(), options,
                             SyntheticKind::smooth_noise, 2024);
            const ImageHandle handle = ImageHandle::open(path.string());
            const auto got = reassemble_level0(handle);
            check.require(got == expected,
                          options.compression.name() + ": level 0 differs");
            fs::remove(path);
        }
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    check.require(seconds < 30.0,
                  "took " + std::to_string(seconds) + " s (budget 30 s)");
    return check;
}

// ---------------------------------------------------------------------------
// 2. Pyramid equals the brute-force oracle on random small images
// ---------------------------------------------------------------------------

Check criterion2() {
    Check check;
    std::mt19937_64 rng(42);

    for (int i = 0; i < 10; ++i) {
        ImageLayout layout;
        layout.image_size =
            Size5D(1 + rng() % 40, 1 + rng() % 40, 1 + rng() % 40, 1 + rng() % 2,
                   1 + rng() % 2);
        layout.data_type = DataType::u16;
        layout.input_block_size =
            Size5D(1 + rng() % layout.image_size[Dim::X],
                   1 + rng() % layout.image_size[Dim::Y],
                   1 + rng() % layout.image_size[Dim::Z], 1, 1);
        layout.internal_block_size = {8, 8, 4};

        WriterOptions options;
        options.thread_count = 2;
        options.compression = CompressionSpec::parse("gzip:1", i % 2 == 0);
        const auto path = scratch_dir() / ("c2_" + std::to_string(i) + ".bwmr");
        stream_synthetic(layout, path.string(), options, SyntheticKind::smooth_noise,
                         900 + i);

        const ImageHandle handle = ImageHandle::open(path.string());
        const SyntheticImage synth(SyntheticKind::smooth_noise, 900 + i,
                                   layout.image_size, DataType::u16);
        const auto& size = layout.image_size;
        const oracle::Xyz xyz = {size[Dim::X], size[Dim::Y], size[Dim::Z]};
        const auto& plan = handle.plan();

        for (std::uint64_t t = 0; t < size[Dim::T]; ++t)
        for (std::uint64_t c = 0; c < size[Dim::C]; ++c) {
            std::vector<std::uint16_t> volume(xyz[0] * xyz[1] * xyz[2]);
            for (std::uint64_t z = 0; z < xyz[2]; ++z)
            for (std::uint64_t y = 0; y < xyz[1]; ++y)
            for (std::uint64_t x = 0; x < xyz[0]; ++x)
                volume[x + xyz[0] * (y + xyz[1] * z)] =
                    static_cast<std::uint16_t>(synth.value(x, y, z, c, t));
            const auto want = oracle::pyramid(volume, xyz, {8, 8, 4});
            check.require(want.size() == plan.level_count(),
                          "level count disagrees with the oracle");
            if (!check.ok) return check;

            for (std::uint32_t k = 0; k < plan.level_count(); ++k) {
                const auto& lv = plan.levels[k];
                for (std::uint64_t bz = 0; bz < lv.chunk_count[2]; ++bz)
                for (std::uint64_t by = 0; by < lv.chunk_count[1]; ++by)
                for (std::uint64_t bx = 0; bx < lv.chunk_count[0]; ++bx) {
                    const auto raw = handle.read_chunk(k, ChunkKey{k, t, c, bz, by, bx});
                    const auto* got =
                        reinterpret_cast<const std::uint16_t*>(raw.data());
                    const std::uint64_t x0 = bx * 8, y0 = by * 8, z0 = bz * 4;
                    const std::uint64_t nx = std::min<std::uint64_t>(8, lv.size[0] - x0);
                    const std::uint64_t ny = std::min<std::uint64_t>(8, lv.size[1] - y0);
                    const std::uint64_t nz = std::min<std::uint64_t>(4, lv.size[2] - z0);
                    for (std::uint64_t z = 0; z < nz; ++z)
                    for (std::uint64_t y = 0; y < ny; ++y)
                    for (std::uint64_t x = 0; x < nx; ++x) {
                        const std::uint16_t g = got[x + 8 * (y + 8 * z)];
                        const std::uint16_t w =
                            want[k][(x0 + x) +
                                    lv.size[0] * ((y0 + y) + lv.size[1] * (z0 + z))];
                        if (g != w) {
                            std::ostringstream os;
                            os << "image " << i << " level " << k << " voxel ("
                               << x0 + x << "," << y0 + y << "," << z0 + z
                               << ") c=" << c << " t=" << t << ": got " << g
                               << " want " << w;
                            check.require(false, os.str());
                            return check;
                        }
                    }
                }
            }
        }
        fs::remove(path);
    }
    return check;
}

// ---------------------------------------------------------------------------
// 3. Peak memory depends on the streaming order, not the image size
// ---------------------------------------------------------------------------

Check criterion3() {
    Check check;
    const auto start = std::chrono::steady_clock::now();

    ImageLayout layout;
    layout.image_size = Size5D(512, 512, 64, 3, 1);
    layout.data_type = DataType::u16;
    layout.input_block_size = Size5D(128, 128, 1, 1, 1);
    layout.internal_block_size = {256, 256, 8};

    WriterOptions options;
    options.thread_count = 2;
    options.compression.algorithm = Algorithm::none;

    const DimensionSequence5D xyzct{};
    const DimensionSequence5D xyczt{Dim::X, Dim::Y, Dim::C, Dim::Z, Dim::T};

    const auto path = scratch_dir() / "c3.bwmr";
    const auto sum_xyzct = stream_synthetic(layout, path.string(), options,
                                            SyntheticKind::zeros, 0, xyzct);
    fs::remove(path);
    const auto sum_xyczt = stream_synthetic(layout, path.string(), options,
                                            SyntheticKind::zeros, 0, xyczt);
    fs::remove(path);

    const double order_ratio = static_cast<double>(sum_xyczt.peak_memory_bytes) /
                               static_cast<double>(sum_xyzct.peak_memory_bytes);
    {
        std::ostringstream os;
        os << "XYCZT/XYZCT peak ratio " << order_ratio << " (need >= 1.8)";
        check.require(order_ratio >= 1.8, os.str());
    }

    ImageLayout t4 = layout;
    t4.image_size[Dim::T] = 4;
    const auto sum_t4 =
        stream_synthetic(t4, path.string(), options, SyntheticKind::zeros, 0, xyzct);
    fs::remove(path);
    const double t_ratio = static_cast<double>(sum_t4.peak_memory_bytes) /
                           static_cast<double>(sum_xyzct.peak_memory_bytes);
    {
        std::ostringstream os;
        os << "T=4 vs T=1 peak ratio " << t_ratio << " (need within 5%)";
        check.require(t_ratio >= 0.95 && t_ratio <= 1.05, os.str());
    }

    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    check.require(seconds < 60.0,
                  "took " + std::to_string(seconds) + " s (budget 60 s)");
    return check;
}

// ---------------------------------------------------------------------------
// 4. Compression ratios are strictly ordered across methods
// ---------------------------------------------------------------------------

Check criterion4() {
    Check check;

    ImageLayout layout;
    layout.image_size = Size5D(256, 256, 64, 1, 1);
    layout.data_type = DataType::u16;
    layout.input_block_size = Size5D(256, 256, 4, 1, 1);
    layout.internal_block_size = {256, 256, 8};

    auto measure = [&](const std::string& method, bool shuffle) {
        WriterOptions options;
        options.thread_count = 2;
        options.compression = CompressionSpec::parse(method, shuffle);
        const auto path = scratch_dir() / "c4.bwmr";
        const auto summary = stream_synthetic(layout, path.string(), options,
                                              SyntheticKind::smooth_noise, 77);
        fs::remove(path);
        return summary.compression_ratio;
    };

    const double shuffle_gzip2 = measure("gzip:2", true);
    const double gzip2 = measure("gzip:2", false);
    const double shuffle_lz4 = measure("lz4", true);
    const double lz4 = measure("lz4", false);

    std::ostringstream os;
    os << "shuffle+gzip2 " << shuffle_gzip2 << ", gzip2 " << gzip2
       << ", shuffle+lz4 " << shuffle_lz4 << ", lz4 " << lz4;
    std::printf("       ratios: %s\n", os.str().c_str());

    check.require(shuffle_gzip2 > gzip2, "shuffle+gzip2 <= gzip2 (" + os.str() + ")");
    check.require(gzip2 > shuffle_lz4, "gzip2 <= shuffle+lz4 (" + os.str() + ")");
    check.require(shuffle_lz4 > lz4, "shuffle+lz4 <= lz4 (" + os.str() + ")");
    check.require(lz4 > 1.0, "lz4 <= 1.0 (" + os.str() + ")");
    return check;
}

// ---------------------------------------------------------------------------
// 5. Throughput scales with threads; shuffle+lz4 outruns gzip2
// ---------------------------------------------------------------------------

Check criterion5() {
    Check check;

    ImageLayout layout;
    layout.image_size = Size5D(512, 512, 32, 1, 1);
    layout.data_type = DataType::u16;
    layout.input_block_size = Size5D(256, 256, 2, 1, 1);
    layout.internal_block_size = {256, 256, 8};

    auto throughput = [&](const std::string& method, bool shuffle, unsigned threads) {
        WriterOptions options;
        options.thread_count = threads;
        options.compression = CompressionSpec::parse(method, shuffle);
        double best = 0;
        for (int attempt = 0; attempt < 3; ++attempt) { // flaky-tolerant: best of 3
            const auto path = scratch_dir() / "c5.bwmr";
            const auto start = std::chrono::steady_clock::now();
            const auto summary = stream_synthetic(layout, path.string(), options,
                                                  SyntheticKind::smooth_noise, 5);
            const double seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            fs::remove(path);
            best = std::max(best,
                            static_cast<double>(summary.input_bytes) / seconds);
        }
        return best / (1024.0 * 1024.0);
    };

    const unsigned cores = std::thread::hardware_concurrency();
    if (cores >= 4) {
        const double one = throughput("gzip:2", false, 1);
        const double four = throughput("gzip:2", false, 4);
        std::ostringstream os;
        os << "gzip2 " << one << " MB/s @1 thread, " << four << " MB/s @4";
        std::printf("       %s\n", os.str().c_str());
        check.require(four >= 2.0 * one, os.str() + " (need 2x)");
    } else {
        std::printf("       gzip2 4-thread scaling not measurable here (%u cores)\n",
                    cores);
    }

    const unsigned threads = std::min(4u, std::max(1u, cores));
    const double gzip2 = throughput("gzip:2", false, threads);
    const double shuffle_lz4 = throughput("lz4", true, threads);
    std::ostringstream os;
    os << "shuffle+lz4 " << shuffle_lz4 << " MB/s vs gzip2 " << gzip2 << " MB/s @"
       << threads << " threads";
    std::printf("       %s\n", os.str().c_str());
    check.require(shuffle_lz4 >= gzip2, os.str());
    return check;
}

// ---------------------------------------------------------------------------
// 6. The committed fixture still opens byte-for-byte
// ---------------------------------------------------------------------------

Check criterion6() {
    Check check;
    const fs::path fixture = fs::path(BWMR_FIXTURE_DIR) / "sample.bwmr";
    check.require(fs::exists(fixture), "fixture missing: " + fixture.string());
    if (!check.ok) return check;

    std::ifstream f(fixture, std::ios::binary);
    std::vector<char> bytes((std::istreambuf_iterator<char>(f)),
                            std::istreambuf_iterator<char>());
    check.require(bytes.size() > 32, "fixture implausibly small");
    if (!check.ok) return check;
    check.require(std::memcmp(bytes.data(), "BWMRIMG1", 8) == 0,
                  "fixture header magic wrong");
    check.require(std::memcmp(bytes.data() + bytes.size() - 8, "BWMREND1", 8) == 0,
                  "fixture footer magic wrong");

    const ImageHandle handle = ImageHandle::open(fixture.string());
    check.require(handle.image_size() == Size5D(40, 32, 12, 2, 2),
                  "fixture geometry changed");
    const SyntheticImage synth(SyntheticKind::smooth_noise, 42, handle.image_size(),
                               handle.data_type());
    const auto expected = synth.generate_volume();
    check.require(reassemble_level0(handle) == expected,
                  "fixture content no longer matches its generator");
    check.require(*handle.parameters().find("Image", "Generator") == "smooth-noise",
                  "fixture metadata changed");
    return check;
}

// ---------------------------------------------------------------------------
// 7. Single-byte payload corruption is always detected
// ---------------------------------------------------------------------------

Check criterion7() {
    Check check;
    const fs::path fixture = fs::path(BWMR_FIXTURE_DIR) / "sample.bwmr";
    const fs::path copy = scratch_dir() / "c7.bwmr";

    const ImageHandle clean = ImageHandle::open(fixture.string());
    struct Span {
        ChunkKey key;
        std::uint64_t offset;
        std::uint64_t length;
        std::uint32_t level;
    };
    std::vector<Span> spans;
    for (std::uint32_t k = 0; k < clean.plan().level_count(); ++k) {
        const auto& lv = clean.plan().levels[k];
        for (std::uint64_t t = 0; t < clean.image_size()[Dim::T]; ++t)
        for (std::uint64_t c = 0; c < clean.image_size()[Dim::C]; ++c)
        for (std::uint64_t bz = 0; bz < lv.chunk_count[2]; ++bz)
        for (std::uint64_t by = 0; by < lv.chunk_count[1]; ++by)
        for (std::uint64_t bx = 0; bx < lv.chunk_count[0]; ++bx) {
            const ChunkKey key{k, t, c, bz, by, bx};
            const auto& record = clean.record(k, key);
            spans.push_back({key, record.offset, record.compressed_length, k});
        }
    }

    std::mt19937_64 rng(1234);
    for (int i = 0; i < 100; ++i) {
        fs::copy_file(fixture, copy, fs::copy_options::overwrite_existing);
        const Span& span = spans[rng() % spans.size()];
        const std::uint64_t pos = span.offset + rng() % span.length;
        std::byte flip{static_cast<unsigned char>(1u << (rng() % 8))};
        {
            std::fstream f(copy, std::ios::in | std::ios::out | std::ios::binary);
            f.seekg(static_cast<std::streamoff>(pos));
            char b;
            f.read(&b, 1);
            b = static_cast<char>(b ^ std::to_integer<unsigned char>(flip));
            f.seekp(static_cast<std::streamoff>(pos));
            f.write(&b, 1);
        }
        const ImageHandle handle = ImageHandle::open(copy.string());
        bool detected = false;
        try {
            (void)handle.read_chunk(span.level, span.key);
        } catch (const ChecksumError&) {
            detected = true;
        } catch (const CorruptStreamError&) {
            // never reached: the CRC runs before any decoding
        }
        if (!detected) {
            std::ostringstream os;
            os << "flip " << i << " at file offset " << pos << " went undetected";
            check.require(false, os.str());
            return check;
        }
    }
    fs::remove(copy);
    return check;
}

// ---------------------------------------------------------------------------
// 8. query_region matches a brute-force membership scan
// ---------------------------------------------------------------------------

Check criterion8() {
    Check check;

    ImageLayout layout;
    layout.image_size = Size5D(70, 50, 30, 1, 1);
    layout.data_type = DataType::u8;
    layout.input_block_size = Size5D(70, 50, 30, 1, 1);
    layout.internal_block_size = {16, 16, 8};
    WriterOptions options;
    options.thread_count = 1;
    options.compression.algorithm = Algorithm::none;
    const auto path = scratch_dir() / "c8.bwmr";
    stream_synthetic(layout, path.string(), options, SyntheticKind::zeros, 0);
    const ImageHandle handle = ImageHandle::open(path.string());

    std::mt19937_64 rng(777);
    const oracle::Xyz size = {70, 50, 30};
    for (int i = 0; i < 200; ++i) {
        oracle::Xyz lo{}, hi{};
        for (int d = 0; d < 3; ++d) {
            const std::uint64_t a = rng() % size[d];
            const std::uint64_t b = rng() % size[d];
            lo[d] = std::min(a, b);
            hi[d] = std::max(a, b) + 1;
        }
        const auto keys = handle.query_region(0, lo, hi, 0, 0);
        const auto want = oracle::region_scan(lo, hi, {16, 16, 8});
        std::set<oracle::Xyz> got;
        for (const auto& k : keys) got.insert({k.bx, k.by, k.bz});
        if (got != want) {
            std::ostringstream os;
            os << "region [" << lo[0] << "," << hi[0] << ")x[" << lo[1] << ","
               << hi[1] << ")x[" << lo[2] << "," << hi[2] << ") differs";
            check.require(false, os.str());
            return check;
        }
    }
    fs::remove(path);
    return check;
}

} // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Check()> run;
    };
    const Criterion criteria[] = {
        {"1 round-trip identity across codecs", criterion1},
        {"2 pyramid equals the brute-force oracle", criterion2},
        {"3 peak memory follows the streaming order", criterion3},
        {"4 compression ratio ordering", criterion4},
        {"5 throughput scaling and method speed", criterion5},
        {"6 format fixture forward-stability", criterion6},
        {"7 corruption detection on payload flips", criterion7},
        {"8 query_region equals the voxel scan", criterion8},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        Check check;
        std::string error;
        try {
            check = criterion.run();
        } catch (const std::exception& e) {
            check.ok = false;
            check.detail = std::string("exception: ") + e.what();
        }
        if (check.ok) {
            std::printf("PASS  criterion %s\n", criterion.name);
        } else {
            std::printf("FAIL  criterion %s: %s\n", criterion.name,
                        check.detail.c_str());
            ++failures;
        }
        std::fflush(stdout);
    }

    std::error_code ec;
    fs::remove_all(scratch_dir(), ec);
    return failures;
}
