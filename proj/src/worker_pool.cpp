#include "worker_pool.hpp"

#include <algorithm>

namespace tclsim {

WorkerPool::WorkerPool(unsigned threads)
{
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    for (unsigned i = 1; i < threads; ++i)
        workers_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool()
{
    {
        std::lock_guard lk(mu_);
        stop_ = true;
    }
    start_cv_.notify_all();
    for (auto& w : workers_)
        w.join();
}

void WorkerPool::drain()
{
    std::unique_lock lk(mu_);
    while (next_ < chunks_) {
        const std::size_t c = next_++;
        const auto* job = job_;
        lk.unlock();
        (*job)(c);
        lk.lock();
        if (--pending_ == 0)
            done_cv_.notify_all();
    }
}

void WorkerPool::worker_loop()
{
    unsigned long seen = 0;
    for (;;) {
        {
            std::unique_lock lk(mu_);
            start_cv_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_)
                return;
            seen = generation_;
        }
        drain();
    }
}

void WorkerPool::run(std::size_t chunks, const std::function<void(std::size_t)>& fn)
{
    if (chunks == 0)
        return;
    if (workers_.empty() || chunks == 1) {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c);
        return;
    }
    {
        std::lock_guard lk(mu_);
        job_ = &fn;
        chunks_ = chunks;
        next_ = 0;
        pending_ = chunks;
        ++generation_;
    }
    start_cv_.notify_all();
    drain();
    std::unique_lock lk(mu_);
    done_cv_.wait(lk, [&] { return pending_ == 0; });
    job_ = nullptr;
    chunks_ = 0;
}

}  // namespace tclsim
