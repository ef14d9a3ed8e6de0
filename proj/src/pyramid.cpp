#include "bwmr/pyramid.hpp"

#include <algorithm>
#include <cstring>

namespace bwmr {

PyramidPlan plan_levels(const std::array<std::uint64_t, 3>& image_xyz,
                        const std::array<std::uint64_t, 3>& internal_block) {
    for (auto v : image_xyz)
        if (v == 0) throw InvalidArgument("image XYZ sizes must all be >= 1");
    for (auto v : internal_block)
        if (v == 0) throw InvalidArgument("internal block sizes must all be >= 1");

    PyramidPlan plan;
    plan.block = internal_block;

    PyramidLevel level;
    level.size = image_xyz;
    level.halved = {false, false, false};
    for (;;) {
        for (int d = 0; d < 3; ++d)
            level.chunk_count[d] = (level.size[d] - 1) / internal_block[d] + 1;
        plan.levels.push_back(level);

        std::array<bool, 3> qualify{};
        bool any = false;
        for (int d = 0; d < 3; ++d) {
            qualify[d] = level.size[d] > internal_block[d];
            any = any || qualify[d];
        }
        if (!any) break;

        PyramidLevel next;
        for (int d = 0; d < 3; ++d)
            next.size[d] = qualify[d] ? (level.size[d] + 1) / 2 : level.size[d];
        next.halved = qualify;
        level = next;
    }
    return plan;
}

std::uint64_t level_voxel_count(const PyramidPlan& plan, std::size_t k) {
    if (k >= plan.levels.size())
        throw InvalidArgument("level index out of range");
    return plan.levels[k].voxels();
}

// ---------------------------------------------------------------------------
// PyramidReducer
// ---------------------------------------------------------------------------

PyramidReducer::PyramidReducer(const PyramidPlan& plan, DataType type,
                               std::uint64_t channels, std::uint64_t timepoints,
                               MemoryAccount* account, Emit emit)
    : plan_(plan),
      type_(type),
      channels_(channels),
      timepoints_(timepoints),
      account_(account),
      emit_(std::move(emit)),
      live_(plan.levels.size()) {
    if (!emit_) throw InvalidArgument("reducer needs an emit callback");
}

std::size_t PyramidReducer::live_accumulators() const {
    std::lock_guard lock(mutex_);
    std::size_t n = 0;
    for (const auto& m : live_) n += m.size();
    return n;
}

std::uint64_t PyramidReducer::expected_sources(std::uint32_t target_level,
                                               std::uint64_t bx, std::uint64_t by,
                                               std::uint64_t bz) const {
    const auto& src = plan_.levels[target_level - 1];
    const auto& dst = plan_.levels[target_level];
    const std::array<std::uint64_t, 3> tb = {bx, by, bz};
    std::uint64_t expected = 1;
    for (int d = 0; d < 3; ++d) {
        const std::uint64_t f = dst.halved[d] ? 2 : 1;
        const std::uint64_t ts = tb[d] * plan_.block[d];
        const std::uint64_t te = std::min((tb[d] + 1) * plan_.block[d], dst.size[d]);
        const std::uint64_t lo = ts * f;
        const std::uint64_t hi = std::min(te * f, src.size[d]);
        expected *= hi - lo;
    }
    return expected;
}

template <typename Elem, typename Sum>
std::vector<std::byte> PyramidReducer::finalize(const Accumulator& acc,
                                                const ChunkKey& key,
                                                std::uint32_t level) const {
    const auto& lv = plan_.levels[level];
    const auto& B = plan_.block;
    std::vector<std::byte> out(plan_.block_voxels() * sizeof(Elem));
    Elem* dst = reinterpret_cast<Elem*>(out.data());

    const std::uint64_t nx = std::min((key.bx + 1) * B[0], lv.size[0]) - key.bx * B[0];
    const std::uint64_t ny = std::min((key.by + 1) * B[1], lv.size[1]) - key.by * B[1];
    const std::uint64_t nz = std::min((key.bz + 1) * B[2], lv.size[2]) - key.bz * B[2];

    for (std::uint64_t z = 0; z < nz; ++z) {
        for (std::uint64_t y = 0; y < ny; ++y) {
            const std::uint64_t row = B[0] * (y + B[1] * z);
            for (std::uint64_t x = 0; x < nx; ++x) {
                const std::uint64_t off = row + x;
                const std::uint64_t n = acc.counts[off];
                if constexpr (std::is_floating_point_v<Elem>) {
                    dst[off] = static_cast<Elem>(acc.sums[off] / static_cast<double>(n));
                } else {
                    // round half away from zero (values are unsigned)
                    const Sum s = acc.isums[off];
                    dst[off] = static_cast<Elem>((2 * s + n) / (2 * n));
                }
            }
        }
    }
    return out;
}

template <typename Elem, typename Sum>
void PyramidReducer::accumulate_typed(
    const ChunkKey& source, std::span<const std::byte> raw,
    std::vector<std::pair<ChunkKey, std::vector<std::byte>>>& done) {
    const std::uint32_t k = source.level;
    const auto& src_lv = plan_.levels[k];
    const auto& dst_lv = plan_.levels[k + 1];
    const auto& B = plan_.block;
    const Elem* src = reinterpret_cast<const Elem*>(raw.data());

    std::array<std::uint64_t, 3> f{};
    for (int d = 0; d < 3; ++d) f[d] = dst_lv.halved[d] ? 2 : 1;

    // In-image source box of this chunk.
    const std::array<std::uint64_t, 3> sb = {source.bx, source.by, source.bz};
    std::array<std::uint64_t, 3> a{}, b{};
    for (int d = 0; d < 3; ++d) {
        a[d] = sb[d] * B[d];
        b[d] = std::min(a[d] + B[d], src_lv.size[d]);
    }

    // Target chunks this source feeds (usually one, at most 2 per axis).
    std::array<std::uint64_t, 3> tb_lo{}, tb_hi{};
    for (int d = 0; d < 3; ++d) {
        tb_lo[d] = (a[d] / f[d]) / B[d];
        tb_hi[d] = ((b[d] - 1) / f[d]) / B[d];
    }

    const std::uint64_t nbx = dst_lv.chunk_count[0];
    const std::uint64_t nby = dst_lv.chunk_count[1];
    const std::uint64_t nbz = dst_lv.chunk_count[2];

    for (std::uint64_t tbz = tb_lo[2]; tbz <= tb_hi[2]; ++tbz)
    for (std::uint64_t tby = tb_lo[1]; tby <= tb_hi[1]; ++tby)
    for (std::uint64_t tbx = tb_lo[0]; tbx <= tb_hi[0]; ++tbx) {
        const std::uint64_t slot =
            (((source.t * channels_ + source.c) * nbz + tbz) * nby + tby) * nbx + tbx;
        auto [it, created] = live_[k + 1].try_emplace(slot);
        Accumulator& acc = it->second;
        if (created) {
            const std::uint64_t voxels = plan_.block_voxels();
            if constexpr (std::is_floating_point_v<Elem>)
                acc.sums.assign(voxels, 0.0);
            else
                acc.isums.assign(voxels, 0);
            acc.counts.assign(voxels, 0);
            acc.remaining = expected_sources(k + 1, tbx, tby, tbz);
            if (account_) account_->charge(voxels * sizeof(Elem));
        }

        // Target voxels of this chunk that this source chunk feeds.
        std::array<std::uint64_t, 3> t_lo{}, t_hi{};
        const std::array<std::uint64_t, 3> tb = {tbx, tby, tbz};
        for (int d = 0; d < 3; ++d) {
            t_lo[d] = std::max(tb[d] * B[d], a[d] / f[d]);
            t_hi[d] = std::min(std::min((tb[d] + 1) * B[d], dst_lv.size[d]),
                               (b[d] - 1) / f[d] + 1);
        }

        std::uint64_t arrived = 0;
        for (std::uint64_t tz = t_lo[2]; tz < t_hi[2]; ++tz) {
            const std::uint64_t sz0 = std::max(tz * f[2], a[2]);
            const std::uint64_t sz1 = std::min(tz * f[2] + f[2], b[2]);
            for (std::uint64_t ty = t_lo[1]; ty < t_hi[1]; ++ty) {
                const std::uint64_t sy0 = std::max(ty * f[1], a[1]);
                const std::uint64_t sy1 = std::min(ty * f[1] + f[1], b[1]);
                for (std::uint64_t tx = t_lo[0]; tx < t_hi[0]; ++tx) {
                    const std::uint64_t sx0 = std::max(tx * f[0], a[0]);
                    const std::uint64_t sx1 = std::min(tx * f[0] + f[0], b[0]);
                    const std::uint64_t toff =
                        (tx - tb[0] * B[0]) +
                        B[0] * ((ty - tb[1] * B[1]) + B[1] * (tz - tb[2] * B[2]));
                    for (std::uint64_t sz = sz0; sz < sz1; ++sz)
                    for (std::uint64_t sy = sy0; sy < sy1; ++sy)
                    for (std::uint64_t sx = sx0; sx < sx1; ++sx) {
                        const std::uint64_t soff =
                            (sx - a[0]) + B[0] * ((sy - a[1]) + B[1] * (sz - a[2]));
                        if constexpr (std::is_floating_point_v<Elem>)
                            acc.sums[toff] += static_cast<double>(src[soff]);
                        else
                            acc.isums[toff] += static_cast<Sum>(src[soff]);
                        ++acc.counts[toff];
                        ++arrived;
                    }
                }
            }
        }

        acc.remaining -= arrived;
        if (acc.remaining == 0) {
            ChunkKey key{k + 1, source.t, source.c, tbz, tby, tbx};
            done.emplace_back(key, finalize<Elem, Sum>(acc, key, k + 1));
            live_[k + 1].erase(it);
            if (account_)
                account_->release(plan_.block_voxels() * sizeof(Elem));
        }
    }
}

void PyramidReducer::accumulate(const ChunkKey& source, std::span<const std::byte> raw) {
    if (source.level + 1 >= plan_.levels.size()) return; // coarsest level
    if (raw.size() != plan_.block_voxels() * bytes_per_element(type_))
        throw InvalidArgument("source chunk has unexpected byte size");

    std::vector<std::pair<ChunkKey, std::vector<std::byte>>> done;
    {
        std::lock_guard lock(mutex_);
        switch (type_) {
            case DataType::u8:
                accumulate_typed<std::uint8_t, std::uint64_t>(source, raw, done);
                break;
            case DataType::u16:
                accumulate_typed<std::uint16_t, std::uint64_t>(source, raw, done);
                break;
            case DataType::u32:
                accumulate_typed<std::uint32_t, std::uint64_t>(source, raw, done);
                break;
            case DataType::f32:
                accumulate_typed<float, double>(source, raw, done);
                break;
        }
    }
    for (auto& [key, buffer] : done)
        emit_(key, std::move(buffer));
}

} // namespace bwmr
