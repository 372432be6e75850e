#pragma once

// Mini-batch streaming over a shuffled example store. One worker = fully
// deterministic sequential pass. Multiple workers = one reader thread feeding
// a bounded queue of batches, workers applying updates lock-free (racy reads
// and lost updates on shared parameters are tolerated by design).

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "textvec/common.hpp"
#include "textvec/corpus/store.hpp"

namespace textvec::nncore {

struct Batch {
  std::vector<char> bytes;   // records * width
  size_t records = 0;
  uint64_t first_index = 0;  // store position of the first record

  const uint32_t* record(size_t i, uint32_t width) const {
    return reinterpret_cast<const uint32_t*>(bytes.data() + i * width);
  }
};

// process(batch, worker_id, rng) -> summed loss over the batch's records.
// Worker rngs are seeded from (seed, epoch, worker id) and persist across the
// worker's batches, so a single-worker run is bit-reproducible.
inline std::pair<double, uint64_t> run_epoch(
    const corpus::ExampleStore& store, size_t batch_size, int workers, uint64_t seed,
    uint64_t epoch, const std::function<double(const Batch&, int, Rng&)>& process) {
  if (batch_size == 0) throw std::invalid_argument("batch size must be positive");
  if (workers < 1) throw std::invalid_argument("worker count must be >= 1");
  const uint32_t width = store.width();

  if (workers == 1) {
    Rng rng(derive_seed(seed, mix64(epoch * 2654435761ULL + 1)));
    auto reader = store.reader();
    Batch batch;
    double total = 0.0;
    uint64_t count = 0, index = 0;
    for (;;) {
      batch.bytes.resize(batch_size * width);
      batch.records = 0;
      batch.first_index = index;
      while (batch.records < batch_size &&
             reader.next(batch.bytes.data() + batch.records * width))
        ++batch.records;
      if (batch.records == 0) break;
      batch.bytes.resize(batch.records * width);
      total += process(batch, 0, rng);
      count += batch.records;
      index += batch.records;
    }
    return {total, count};
  }

  // bounded queue of ready batches
  std::mutex mu;
  std::condition_variable cv_push, cv_pop;
  std::deque<Batch> queue;
  bool done_reading = false;
  const size_t queue_cap = static_cast<size_t>(workers) * 4;

  std::exception_ptr failure;
  std::mutex failure_mu;
  auto record_failure = [&] {
    std::lock_guard<std::mutex> lk(failure_mu);
    if (!failure) failure = std::current_exception();
  };

  double total = 0.0;
  uint64_t count = 0;
  std::mutex total_mu;

  std::thread reader_thread([&] {
    try {
      auto reader = store.reader();
      uint64_t index = 0;
      for (;;) {
        Batch batch;
        batch.bytes.resize(batch_size * width);
        batch.first_index = index;
        while (batch.records < batch_size &&
               reader.next(batch.bytes.data() + batch.records * width))
          ++batch.records;
        if (batch.records == 0) break;
        batch.bytes.resize(batch.records * width);
        index += batch.records;
        std::unique_lock<std::mutex> lk(mu);
        cv_push.wait(lk, [&] { return queue.size() < queue_cap; });
        queue.push_back(std::move(batch));
        cv_pop.notify_one();
      }
    } catch (...) {
      record_failure();
    }
    std::lock_guard<std::mutex> lk(mu);
    done_reading = true;
    cv_pop.notify_all();
  });

  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        Rng rng(derive_seed(seed, mix64(epoch * 2654435761ULL + 1) ^
                                      mix64(0x70cabULL + static_cast<uint64_t>(w))));
        double local_total = 0.0;
        uint64_t local_count = 0;
        for (;;) {
          std::optional<Batch> batch;
          {
            std::unique_lock<std::mutex> lk(mu);
            cv_pop.wait(lk, [&] { return !queue.empty() || done_reading; });
            if (queue.empty()) break;
            batch = std::move(queue.front());
            queue.pop_front();
            cv_push.notify_one();
          }
          local_total += process(*batch, w, rng);
          local_count += batch->records;
        }
        std::lock_guard<std::mutex> lk(total_mu);
        total += local_total;
        count += local_count;
      } catch (...) {
        record_failure();
      }
    });
  }
  reader_thread.join();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return {total, count};
}

}  // namespace textvec::nncore
