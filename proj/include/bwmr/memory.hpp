#pragma once

#include <cstdint>

#include "bwmr/errors.hpp"

namespace bwmr {

/// Running total and high-water mark of live chunk-buffer bytes. Buffers are
/// charged at their full internal-block byte size from first write until
/// dispatch, at every pyramid level.
class MemoryAccount {
public:
    void charge(std::uint64_t bytes) noexcept {
        current_ += bytes;
        if (current_ > peak_) peak_ = current_;
    }

    void release(std::uint64_t bytes) noexcept {
        current_ = bytes > current_ ? 0 : current_ - bytes;
    }

    [[nodiscard]] std::uint64_t current_bytes() const noexcept { return current_; }
    [[nodiscard]] std::uint64_t peak_bytes() const noexcept { return peak_; }

private:
    std::uint64_t current_ = 0;
    std::uint64_t peak_ = 0;
};

} // namespace bwmr
