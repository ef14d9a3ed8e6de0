// Shared scaffolding for the test binaries.
#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "bwmr/generators.hpp"
#include "bwmr/writer.hpp"

namespace testutil {

/// Self-deleting scratch directory.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<unsigned> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("bwmr_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    [[nodiscard]] std::filesystem::path file(const std::string& name) const {
        return path_ / name;
    }
    [[nodiscard]] const std::filesystem::path& path() const noexcept { return path_; }

private:
    std::filesystem::path path_;
};

/// Streams a synthetic image through a Writer in X-fastest block order and
/// returns the summary.
inline bwmr::WriteSummary write_synthetic(
    const bwmr::ImageLayout& layout, const std::string& path,
    const bwmr::WriterOptions& options, bwmr::SyntheticKind kind, std::uint64_t seed,
    const bwmr::Parameters& parameters = {},
    const std::vector<bwmr::TimePointInfo>& time_info = {},
    const std::vector<bwmr::ChannelColorInfo>& color_info = {}) {
    using namespace bwmr;
    Writer writer(layout, ImageExtent{0, 0, 0, 10, 10, 10}, options, path);
    SyntheticImage synth(kind, seed, layout.image_size, layout.data_type);
    const Size5D counts = block_count(layout.image_size, layout.input_block_size);
    std::vector<std::byte> data(layout.input_block_bytes());
    for (std::uint64_t t = 0; t < counts[Dim::T]; ++t)
    for (std::uint64_t c = 0; c < counts[Dim::C]; ++c)
    for (std::uint64_t z = 0; z < counts[Dim::Z]; ++z)
    for (std::uint64_t y = 0; y < counts[Dim::Y]; ++y)
    for (std::uint64_t x = 0; x < counts[Dim::X]; ++x) {
        const BlockIndex5D index(x, y, z, c, t);
        synth.fill_block(index, layout.input_block_size, layout.input_sequence, data);
        writer.copy_block(data, index);
    }
    return writer.finish(parameters, time_info, color_info);
}

} // namespace testutil
