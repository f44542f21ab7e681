#ifndef BIH_PARALLEL_HPP
#define BIH_PARALLEL_HPP

#include <condition_variable>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bih {

// Work is always split into kChunks fixed ranges and reductions combine
// partials in chunk order, so results are bitwise independent of the
// thread count.
class ThreadPool {
 public:
  static constexpr std::size_t kChunks = 256;

  static ThreadPool& instance() {
    static ThreadPool pool;
    return pool;
  }

  void set_threads(unsigned n) {
    std::lock_guard<std::mutex> lk(config_mutex_);
    stop_workers();
    threads_ = n == 0 ? std::max(1u, std::thread::hardware_concurrency()) : n;
    if (threads_ > 1) start_workers();
  }

  unsigned threads() const { return threads_; }

  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
    if (n == 0) return;
    if (threads_ <= 1 || n < 4096) {
      body(0, n);
      return;
    }
    std::size_t nchunks = std::min<std::size_t>(kChunks, n);
    {
      std::unique_lock<std::mutex> lk(mutex_);
      body_ = &body;
      total_ = n;
      nchunks_ = nchunks;
      next_chunk_ = 0;
      pending_ = nchunks;
      ++generation_;
    }
    cv_.notify_all();
    run_chunks();  // the calling thread participates
    std::unique_lock<std::mutex> lk(mutex_);
    done_cv_.wait(lk, [&] { return pending_ == 0; });
    body_ = nullptr;
  }

  // Deterministic sum reduction: per-chunk partials combined in index order.
  double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum) {
    if (n == 0) return 0.0;
    std::size_t nchunks = std::min<std::size_t>(kChunks, std::max<std::size_t>(1, n));
    std::vector<double> partial(nchunks, 0.0);
    std::function<void(std::size_t, std::size_t)> body = [&](std::size_t, std::size_t) {};
    // reuse parallel_for over chunk indices
    parallel_for_chunked(n, nchunks, [&](std::size_t c, std::size_t lo, std::size_t hi) {
      partial[c] = chunk_sum(lo, hi);
    });
    double s = 0.0;
    for (double p : partial) s += p;
    return s;
  }

  void parallel_for_chunked(std::size_t n, std::size_t nchunks,
                            const std::function<void(std::size_t, std::size_t, std::size_t)>& body) {
    std::function<void(std::size_t, std::size_t)> wrap = [&](std::size_t lo, std::size_t hi) {
      // map [lo,hi) back to chunk ids (ranges align with chunk boundaries)
      std::size_t c0 = chunk_of(lo, n, nchunks);
      std::size_t c1 = chunk_of(hi - 1, n, nchunks);
      for (std::size_t c = c0; c <= c1; ++c) {
        auto [clo, chi] = chunk_range(c, n, nchunks);
        body(c, clo, chi);
      }
    };
    if (threads_ <= 1 || n < 4096) {
      for (std::size_t c = 0; c < nchunks; ++c) {
        auto [clo, chi] = chunk_range(c, n, nchunks);
        body(c, clo, chi);
      }
      return;
    }
    {
      std::unique_lock<std::mutex> lk(mutex_);
      body_ = &wrap;
      total_ = n;
      nchunks_ = nchunks;
      next_chunk_ = 0;
      pending_ = nchunks;
      ++generation_;
    }
    cv_.notify_all();
    run_chunks();
    std::unique_lock<std::mutex> lk(mutex_);
    done_cv_.wait(lk, [&] { return pending_ == 0; });
    body_ = nullptr;
  }

  static std::pair<std::size_t, std::size_t> chunk_range(std::size_t c, std::size_t n, std::size_t nchunks) {
    std::size_t lo = c * n / nchunks;
    std::size_t hi = (c + 1) * n / nchunks;
    return {lo, hi};
  }

  ~ThreadPool() { stop_workers(); }

 private:
  ThreadPool() = default;

  static std::size_t chunk_of(std::size_t i, std::size_t n, std::size_t nchunks) {
    // inverse of chunk_range's lower bound; linear scan is fine at 256 chunks
    std::size_t c = i * nchunks / n;
    while (c + 1 < nchunks && chunk_range(c + 1, n, nchunks).first <= i) ++c;
    while (c > 0 && chunk_range(c, n, nchunks).first > i) --c;
    return c;
  }

  void run_chunks() {
    for (;;) {
      std::size_t c;
      {
        std::unique_lock<std::mutex> lk(mutex_);
        if (next_chunk_ >= nchunks_) return;
        c = next_chunk_++;
      }
      auto [lo, hi] = chunk_range(c, total_, nchunks_);
      if (lo < hi) (*body_)(lo, hi);
      {
        std::unique_lock<std::mutex> lk(mutex_);
        if (--pending_ == 0) done_cv_.notify_all();
      }
    }
  }

  void start_workers() {
    stopping_ = false;
    for (unsigned t = 0; t + 1 < threads_; ++t) {
      workers_.emplace_back([this] {
        std::size_t seen = 0;
        for (;;) {
          {
            std::unique_lock<std::mutex> lk(mutex_);
            cv_.wait(lk, [&] { return stopping_ || generation_ != seen; });
            if (stopping_) return;
            seen = generation_;
          }
          run_chunks();
        }
      });
    }
  }

  void stop_workers() {
    {
      std::unique_lock<std::mutex> lk(mutex_);
      stopping_ = true;
    }
    cv_.notify_all();
    for (auto& w : workers_) w.join();
    workers_.clear();
  }

  unsigned threads_ = 1;
  std::mutex config_mutex_;
  std::mutex mutex_;
  std::condition_variable cv_, done_cv_;
  std::vector<std::thread> workers_;
  const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
  std::size_t total_ = 0, nchunks_ = 0, next_chunk_ = 0, pending_ = 0;
  std::size_t generation_ = 0;
  bool stopping_ = false;
};

inline void set_threads(unsigned n) { ThreadPool::instance().set_threads(n); }

inline void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body) {
  ThreadPool::instance().parallel_for(n, body);
}

inline double parallel_sum(std::size_t n, const std::function<double(std::size_t, std::size_t)>& chunk_sum) {
  return ThreadPool::instance().parallel_sum(n, chunk_sum);
}

}  // namespace bih

#endif
