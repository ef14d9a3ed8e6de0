#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "bwmr/codec.hpp"

namespace bwmr {

/// A chunk handed to the pipeline: raw voxel bytes plus its address.
struct PendingChunk {
    ChunkKey key;
    std::vector<std::byte> raw;
};

/// Fixed pool of compression workers plus one consumer thread that feeds
/// emissions, serialized, into a sink. Submission is single-producer and
/// blocks once more than 2 * worker_count chunks are in flight, which bounds
/// pipeline memory independently of the writer's chunk accounting.
class ChunkPipeline {
public:
    using Sink = std::function<void(CompressedChunk&&)>;

    ChunkPipeline(std::size_t worker_count, CompressionSpec spec,
                  std::size_t element_size, Sink sink);
    ~ChunkPipeline();

    ChunkPipeline(const ChunkPipeline&) = delete;
    ChunkPipeline& operator=(const ChunkPipeline&) = delete;

    /// Queues one chunk for compression. Throws Error after drain().
    void submit(PendingChunk&& chunk);

    /// Waits until every submitted chunk has passed through the sink, then
    /// stops the pool. Rethrows the first worker or sink exception, if any.
    void drain();

    [[nodiscard]] std::size_t worker_count() const noexcept { return workers_.size(); }
    [[nodiscard]] std::size_t peak_in_flight() const noexcept { return peak_in_flight_; }

private:
    void worker_loop();
    void consumer_loop();
    void record_failure(std::exception_ptr e);

    CompressionSpec spec_;
    std::size_t element_size_;
    Sink sink_;
    std::size_t in_flight_limit_;

    std::mutex mutex_;
    std::condition_variable task_cv_;      // workers wait for tasks
    std::condition_variable emit_cv_;      // consumer waits for emissions
    std::condition_variable capacity_cv_;  // producer waits for room
    std::deque<PendingChunk> tasks_;
    std::deque<CompressedChunk> emissions_;
    std::size_t in_flight_ = 0;
    std::size_t peak_in_flight_ = 0;
    bool stopping_ = false;
    bool drained_ = false;
    std::exception_ptr failure_;

    std::vector<std::thread> workers_;
    std::thread consumer_;
};

} // namespace bwmr
