#pragma once

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "sm2batch/field.hpp"

namespace sm2b {

// Small blocking pool used by the batch kernels. Tasks are independent lane
// ranges; run() blocks until all complete. Each worker tallies field
// operations on its own thread-local ledger and the deltas are merged back
// into the caller's ledger at the join, so counts are identical no matter
// how many workers execute.
//
// A pool of one worker runs everything inline on the calling thread.
class WorkerPool {
public:
    explicit WorkerPool(unsigned workers);
    ~WorkerPool();

    WorkerPool(const WorkerPool&) = delete;
    WorkerPool& operator=(const WorkerPool&) = delete;

    unsigned workers() const { return workers_; }

    // Invokes fn(i) for every i in [0, task_count). Exceptions thrown by
    // tasks are rethrown here (first one wins).
    void run(std::size_t task_count, const std::function<void(std::size_t)>& fn);

private:
    void worker_loop();

    unsigned workers_;
    std::vector<std::thread> threads_;

    std::mutex run_mu_;  // serializes concurrent run() callers
    std::mutex mu_;
    std::condition_variable cv_start_;
    std::condition_variable cv_done_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::size_t job_tasks_ = 0;
    std::size_t next_task_ = 0;
    std::size_t pending_ = 0;
    std::uint64_t generation_ = 0;
    bool stop_ = false;
    OpCountLedger merged_;
    std::exception_ptr first_error_;
};

// Runs fn(i) over [0, task_count) on the given pool, or inline when pool is
// null or has a single worker.
void run_tasks(WorkerPool* pool, std::size_t task_count,
               const std::function<void(std::size_t)>& fn);

}  // namespace sm2b
