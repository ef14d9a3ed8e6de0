#include <doctest.h>

#include <random>

#include "bwmr/types.hpp"

using namespace bwmr;

TEST_CASE("voxel_size from extent and image size") {
    const ImageExtent extent{0, 0, 0, 10, 10, 10};
    const Size5D size(2048, 2048, 100, 3, 1);
    const auto vs = voxel_size(extent, size);
    CHECK(vs[0] == doctest::Approx(10.0 / 2048.0));
    CHECK(vs[1] == doctest::Approx(10.0 / 2048.0));
    CHECK(vs[2] == doctest::Approx(0.1));

    const auto unit = voxel_size(ImageExtent{0, 0, 0, 1, 1, 1}, Size5D(1, 1, 1, 1, 1));
    CHECK(unit[0] == 1.0);
    CHECK(unit[1] == 1.0);
    CHECK(unit[2] == 1.0);

    // symmetric span around zero
    const auto sym = voxel_size(ImageExtent{-5, 0, 0, 5, 1, 1}, Size5D(10, 1, 1, 1, 1));
    CHECK(sym[0] == 1.0);
}

TEST_CASE("voxel_size is translation invariant") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> span(0.5, 100.0);
    std::uniform_real_distribution<double> shift(-1000.0, 1000.0);
    for (int i = 0; i < 50; ++i) {
        const double sx = span(rng), sy = span(rng), sz = span(rng);
        const double dx = shift(rng);
        const Size5D size(17, 5, 9, 1, 1);
        const auto a = voxel_size(ImageExtent{0, 0, 0, sx, sy, sz}, size);
        const auto b =
            voxel_size(ImageExtent{dx, dx, dx, sx + dx, sy + dx, sz + dx}, size);
        for (int d = 0; d < 3; ++d)
            CHECK(a[d] == doctest::Approx(b[d]).epsilon(1e-12));
    }
}

TEST_CASE("voxel_size rejects degenerate extent") {
    CHECK_THROWS_AS((void)voxel_size(ImageExtent{0, 0, 0, 0, 1, 1}, Size5D(1, 1, 1, 1, 1)),
                    InvalidArgument);
}

TEST_CASE("block_count is per-dimension ceiling division") {
    const Size5D image(2048, 2048, 100, 3, 1);
    const Size5D block(512, 512, 1, 1, 1);
    const Size5D n = block_count(image, block);
    CHECK(n[Dim::X] == 4);
    CHECK(n[Dim::Y] == 4);
    CHECK(n[Dim::Z] == 100);
    CHECK(n[Dim::C] == 3);
    CHECK(n[Dim::T] == 1);

    CHECK(block_count(Size5D(5, 1, 1, 1, 1), Size5D(2, 1, 1, 1, 1))[Dim::X] == 3);
}

TEST_CASE("block_count brackets the image size") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<std::uint64_t> dist(1, 500);
    for (int i = 0; i < 200; ++i) {
        Size5D s, b;
        for (auto d : kAllDims) {
            s[d] = dist(rng);
            b[d] = dist(rng);
        }
        const Size5D n = block_count(s, b);
        for (auto d : kAllDims) {
            CHECK(n[d] * b[d] >= s[d]);
            CHECK((n[d] - 1) * b[d] + 1 <= s[d]);
        }
    }
}

TEST_CASE("linear_offset honors the dimension sequence") {
    const Size5D block(512, 512, 1, 1, 1);
    const DimensionSequence5D xyzct;
    CHECK(linear_offset(Index5D(1, 0, 0, 0, 0), block, xyzct) == 1);
    CHECK(linear_offset(Index5D(0, 1, 0, 0, 0), block, xyzct) == 512);

    const DimensionSequence5D yxzct(Dim::Y, Dim::X, Dim::Z, Dim::C, Dim::T);
    CHECK(linear_offset(Index5D(0, 1, 0, 0, 0), block, yxzct) == 1);

    CHECK_THROWS_AS((void)linear_offset(Index5D(512, 0, 0, 0, 0), block, xyzct),
                    InvalidArgument);
}

TEST_CASE("delinearize round-trips exhaustively on small blocks") {
    const Size5D block(3, 2, 4, 2, 2);
    const DimensionSequence5D sequences[] = {
        DimensionSequence5D{},
        DimensionSequence5D(Dim::Y, Dim::X, Dim::Z, Dim::C, Dim::T),
        DimensionSequence5D(Dim::T, Dim::C, Dim::Z, Dim::Y, Dim::X),
        DimensionSequence5D(Dim::Z, Dim::T, Dim::X, Dim::C, Dim::Y),
    };
    for (const auto& seq : sequences) {
        for (std::uint64_t off = 0; off < block.total(); ++off) {
            const Index5D p = delinearize(off, block, seq);
            CHECK(linear_offset(p, block, seq) == off);
        }
        // and the other direction
        for (std::uint64_t x = 0; x < 3; ++x)
            for (std::uint64_t c = 0; c < 2; ++c) {
                const Index5D p(x, 1, 2, c, 0);
                CHECK(delinearize(linear_offset(p, block, seq), block, seq) == p);
            }
    }
    CHECK_THROWS_AS((void)delinearize(block.total(), block, DimensionSequence5D{}),
                    InvalidArgument);
}

TEST_CASE("data types carry their element widths") {
    CHECK(bytes_per_element(DataType::u8) == 1);
    CHECK(bytes_per_element(DataType::u16) == 2);
    CHECK(bytes_per_element(DataType::u32) == 4);
    CHECK(bytes_per_element(DataType::f32) == 4);
}

TEST_CASE("ImageLayout validation") {
    ImageLayout layout;
    layout.image_size = Size5D(16, 16, 4, 1, 1);
    layout.input_block_size = Size5D(8, 8, 1, 1, 1);
    CHECK_NOTHROW(layout.validate());
    CHECK(layout.internal_block_bytes() == 256 * 256 * 8 * 2);

    ImageLayout bad = layout;
    bad.image_size[Dim::Z] = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    bad = layout;
    bad.internal_block_size[1] = 0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);

    bad = layout;
    bad.input_sequence.order[0] = bad.input_sequence.order[1];
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
}

TEST_CASE("dimension sequence permutation check") {
    CHECK(DimensionSequence5D{}.is_permutation());
    CHECK(DimensionSequence5D{}.to_string() == "XYZCT");
    DimensionSequence5D bad;
    bad.order[4] = Dim::X;
    CHECK_FALSE(bad.is_permutation());
}
