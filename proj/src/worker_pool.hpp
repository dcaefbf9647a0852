#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace tclsim {

/// Persistent workers for chunked loops. The caller thread takes part, so a
/// pool of size 1 runs everything inline.
class WorkerPool {
public:
    explicit WorkerPool(unsigned threads);
    ~WorkerPool();
    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned size() const { return static_cast<unsigned>(workers_.size()) + 1; }

    /// Calls fn(c) for every c in [0, chunks) and waits for all of them.
    void run(std::size_t chunks, const std::function<void(std::size_t)>& fn);

private:
    void worker_loop();
    void drain();

    std::vector<std::thread> workers_;
    std::mutex mu_;
    std::condition_variable start_cv_;
    std::condition_variable done_cv_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t chunks_ = 0;
    std::size_t next_ = 0;
    std::size_t pending_ = 0;
    unsigned long generation_ = 0;
    bool stop_ = false;
};

}  // namespace tclsim
