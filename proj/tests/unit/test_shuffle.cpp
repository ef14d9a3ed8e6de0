#include <doctest.h>

#include <algorithm>
#include <random>

#include "bwmr/shuffle.hpp"

using namespace bwmr;

TEST_CASE("shuffle with element size 1 is the identity") {
    std::vector<std::byte> in = {std::byte{9}, std::byte{8}, std::byte{7}};
    CHECK(shuffled(in, 1) == in);
    CHECK(unshuffled(in, 1) == in);
}

TEST_CASE("shuffle transposes byte planes") {
    const std::vector<std::byte> in = {std::byte{0x01}, std::byte{0x02},
                                       std::byte{0x03}, std::byte{0x04}};
    const std::vector<std::byte> expect = {std::byte{0x01}, std::byte{0x03},
                                           std::byte{0x02}, std::byte{0x04}};
    CHECK(shuffled(in, 2) == expect);
    CHECK(unshuffled(expect, 2) == in);
}

TEST_CASE("unshuffle inverts shuffle for random data") {
    std::mt19937_64 rng(44);
    for (const std::size_t esize : {2, 4, 8}) {
        for (int i = 0; i < 20; ++i) {
            std::vector<std::byte> in(esize * (1 + rng() % 500));
            for (auto& b : in) b = static_cast<std::byte>(rng());
            const auto out = shuffled(in, esize);
            CHECK(unshuffled(out, esize) == in);
            // byte permutation: multiset of bytes preserved
            auto a = in, b = out;
            std::sort(a.begin(), a.end());
            std::sort(b.begin(), b.end());
            CHECK(a == b);
        }
    }
}

TEST_CASE("shuffle rejects lengths not divisible by the element size") {
    std::vector<std::byte> in(5);
    std::vector<std::byte> out(5);
    CHECK_THROWS_AS(bwmr::shuffle(in, out, 2), InvalidArgument);
    CHECK_THROWS_AS(bwmr::unshuffle(in, out, 4), InvalidArgument);
    CHECK_THROWS_AS(bwmr::shuffle(in, out, 0), InvalidArgument);
}
