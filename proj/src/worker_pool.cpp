#include "sm2batch/worker_pool.hpp"

namespace sm2b {

WorkerPool::WorkerPool(unsigned workers) : workers_(workers == 0 ? 1 : workers) {
    if (workers_ == 1) return;  // inline mode, no threads
    threads_.reserve(workers_);
    for (unsigned i = 0; i < workers_; ++i)
        threads_.emplace_back([this] { worker_loop(); });
}

WorkerPool::~WorkerPool() {
    {
        std::lock_guard<std::mutex> lk(mu_);
        stop_ = true;
    }
    cv_start_.notify_all();
    for (auto& t : threads_) t.join();
}

void WorkerPool::worker_loop() {
    std::uint64_t seen = 0;
    for (;;) {
        const std::function<void(std::size_t)>* job;
        {
            std::unique_lock<std::mutex> lk(mu_);
            cv_start_.wait(lk, [&] { return stop_ || generation_ != seen; });
            if (stop_) return;
            seen = generation_;
            job = job_;
        }

        OpCountLedger before = ledger_snapshot();
        std::exception_ptr err;
        for (;;) {
            std::size_t idx;
            {
                std::lock_guard<std::mutex> lk(mu_);
                if (next_task_ >= job_tasks_) break;
                idx = next_task_++;
            }
            try {
                (*job)(idx);
            } catch (...) {
                if (!err) err = std::current_exception();
            }
        }

        OpCountLedger delta = ledger_snapshot().since(before);
        {
            std::lock_guard<std::mutex> lk(mu_);
            merged_.add(delta);
            if (err && !first_error_) first_error_ = err;
            if (--pending_ == 0) cv_done_.notify_all();
        }
    }
}

void WorkerPool::run(std::size_t task_count,
                     const std::function<void(std::size_t)>& fn) {
    if (task_count == 0) return;
    if (workers_ == 1) {
        for (std::size_t i = 0; i < task_count; ++i) fn(i);
        return;
    }

    std::lock_guard<std::mutex> run_lk(run_mu_);
    OpCountLedger merged;
    std::exception_ptr err;
    {
        std::unique_lock<std::mutex> lk(mu_);
        job_ = &fn;
        job_tasks_ = task_count;
        next_task_ = 0;
        pending_ = workers_;
        merged_ = OpCountLedger{};
        first_error_ = nullptr;
        ++generation_;
        cv_start_.notify_all();
        cv_done_.wait(lk, [&] { return pending_ == 0; });
        merged = merged_;
        err = first_error_;
        job_ = nullptr;
    }
    ledger().add(merged);
    if (err) std::rethrow_exception(err);
}

void run_tasks(WorkerPool* pool, std::size_t task_count,
               const std::function<void(std::size_t)>& fn) {
    if (pool && pool->workers() > 1) {
        pool->run(task_count, fn);
    } else {
        for (std::size_t i = 0; i < task_count; ++i) fn(i);
    }
}

}  // namespace sm2b
