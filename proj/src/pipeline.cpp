#include "bwmr/pipeline.hpp"

namespace bwmr {

ChunkPipeline::ChunkPipeline(std::size_t worker_count, CompressionSpec spec,
                             std::size_t element_size, Sink sink)
    : spec_(spec),
      element_size_(element_size),
      sink_(std::move(sink)),
      in_flight_limit_(2 * std::max<std::size_t>(worker_count, 1)) {
    spec_.validate();
    if (!sink_) throw InvalidArgument("pipeline needs a sink");
    const std::size_t n = std::max<std::size_t>(worker_count, 1);
    workers_.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        workers_.emplace_back([this] { worker_loop(); });
    consumer_ = std::thread([this] { consumer_loop(); });
}

ChunkPipeline::~ChunkPipeline() {
    try {
        if (!drained_) drain();
    } catch (...) {
        // drain() already recorded the failure; nothing sane to do here.
    }
}

void ChunkPipeline::submit(PendingChunk&& chunk) {
    std::unique_lock lock(mutex_);
    if (drained_) throw Error("pipeline already drained");
    capacity_cv_.wait(lock, [this] { return in_flight_ < in_flight_limit_ || failure_; });
    if (failure_) std::rethrow_exception(failure_);
    ++in_flight_;
    peak_in_flight_ = std::max(peak_in_flight_, in_flight_);
    tasks_.push_back(std::move(chunk));
    task_cv_.notify_one();
}

void ChunkPipeline::drain() {
    {
        std::unique_lock lock(mutex_);
        if (drained_) return;
        capacity_cv_.wait(lock, [this] { return in_flight_ == 0 || failure_; });
        drained_ = true;
        stopping_ = true;
        task_cv_.notify_all();
        emit_cv_.notify_all();
    }
    for (auto& w : workers_)
        if (w.joinable()) w.join();
    if (consumer_.joinable()) consumer_.join();
    std::lock_guard lock(mutex_);
    if (failure_) std::rethrow_exception(failure_);
}

void ChunkPipeline::record_failure(std::exception_ptr e) {
    std::lock_guard lock(mutex_);
    if (!failure_) failure_ = e;
    stopping_ = true;
    task_cv_.notify_all();
    emit_cv_.notify_all();
    capacity_cv_.notify_all();
}

void ChunkPipeline::worker_loop() {
    for (;;) {
        PendingChunk task;
        {
            std::unique_lock lock(mutex_);
            task_cv_.wait(lock, [this] { return !tasks_.empty() || stopping_; });
            if (tasks_.empty()) {
                if (stopping_) return;
                continue;
            }
            task = std::move(tasks_.front());
            tasks_.pop_front();
        }
        try {
            CompressedChunk done =
                compress_chunk(task.raw, task.key, spec_, element_size_);
            task.raw.clear();
            task.raw.shrink_to_fit();
            std::lock_guard lock(mutex_);
            emissions_.push_back(std::move(done));
            emit_cv_.notify_one();
        } catch (...) {
            record_failure(std::current_exception());
            return;
        }
    }
}

void ChunkPipeline::consumer_loop() {
    for (;;) {
        CompressedChunk chunk;
        {
            std::unique_lock lock(mutex_);
            // drain() only raises stopping_ once in_flight_ is zero, so an
            // empty queue here cannot race a compression still in progress.
            emit_cv_.wait(lock, [this] { return !emissions_.empty() || stopping_; });
            if (emissions_.empty()) return;
            chunk = std::move(emissions_.front());
            emissions_.pop_front();
        }
        try {
            sink_(std::move(chunk));
        } catch (...) {
            record_failure(std::current_exception());
            return;
        }
        {
            std::lock_guard lock(mutex_);
            --in_flight_;
            capacity_cv_.notify_all();
        }
    }
}

} // namespace bwmr
