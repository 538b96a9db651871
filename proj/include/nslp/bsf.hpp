#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <concepts>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

namespace nslp::bsf {

using Bytes = std::vector<std::uint8_t>;
using Clock = std::chrono::steady_clock;

enum class Backend { sequential_sim, worker_pool };

/// Contiguous block of item indices owned by one worker.
struct Range {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const noexcept { return end - begin; }
  friend bool operator==(const Range&, const Range&) = default;
};

/// Static block partition by worker id; the first (items % workers) workers get one extra item.
inline Range block_partition(std::size_t items, std::size_t workers, std::size_t worker_id) {
  if (workers == 0 || worker_id >= workers) throw std::out_of_range("block_partition: bad worker id");
  const std::size_t base = items / workers;
  const std::size_t extra = items % workers;
  const std::size_t begin = worker_id * base + std::min(worker_id, extra);
  return {begin, begin + base + (worker_id < extra ? 1 : 0)};
}

struct Options {
  std::size_t workers = 1;
  Backend backend = Backend::worker_pool;
  double sim_latency_ns = 1e4;  ///< latency charged per message by the simulator
  std::size_t thread_cap = 0;   ///< pool threads; 0 means one per worker
  std::size_t latency_samples = 1000;
  /// Sees each iteration's encoded order once, e.g. to record a replayable stream.
  std::function<void(std::span<const std::uint8_t>)> order_tap;
};

/// Cost-model inputs measured over a run, in nanoseconds, averaged per iteration.
struct RunMetrics {
  std::size_t workers = 1;      ///< P
  std::uint64_t iterations = 0;
  double latency_ns = 0.0;      ///< L
  double t_s_ns = 0.0;          ///< master time sending one order to one worker
  double t_v_ns = 0.0;          ///< one worker's order-execution time
  double t_w_ns = 0.0;          ///< P * t_v
  double t_r_ns = 0.0;          ///< total master receive time
  double t_p_ns = 0.0;          ///< total master evaluation time, including building the order
  double t_v_spread_ns = 0.0;   ///< standard deviation of the per-worker mean t_v
  double iteration_ns = 0.0;    ///< wall time (pool) or modeled time (simulator) per iteration
  double order_bytes = 0.0;     ///< mean encoded order size
};

// clang-format off
template <class W>
concept Workload = requires(W& w, const W& cw, typename W::WorkerState& state, const typename W::Order& order,
                            const typename W::Result& result, std::vector<typename W::Result> results,
                            typename W::Merged merged, std::span<const std::uint8_t> bytes, std::size_t id, Range range) {
  { cw.item_count() } -> std::convertible_to<std::size_t>;
  { cw.init_worker(id, range) } -> std::same_as<typename W::WorkerState>;
  { w.make_order() } -> std::same_as<typename W::Order>;
  { W::encode_order(order) } -> std::same_as<Bytes>;
  { W::decode_order(bytes) } -> std::same_as<typename W::Order>;
  { W::process_order(state, order) } -> std::same_as<typename W::Result>;
  { W::encode_result(result) } -> std::same_as<Bytes>;
  { W::decode_result(bytes) } -> std::same_as<typename W::Result>;
  { w.merge_results(std::move(results)) } -> std::same_as<typename W::Merged>;
  w.evaluate(std::move(merged));
  { cw.exit_check() } -> std::convertible_to<bool>;
  w.finalize();
};
// clang-format on

namespace detail {

inline double elapsed_ns(Clock::time_point since) {
  return std::chrono::duration<double, std::nano>(Clock::now() - since).count();
}

struct Envelope {
  Bytes payload;
  bool stop = false;
  std::exception_ptr error;
  double busy_ns = 0.0;

  static Envelope message(Bytes payload) {
    Envelope e;
    e.payload = std::move(payload);
    return e;
  }
  static Envelope stop_signal() {
    Envelope e;
    e.stop = true;
    return e;
  }
};

/// Unbounded single-consumer queue; the only channel between master and a worker.
class Mailbox {
 public:
  void push(Envelope e) {
    {
      std::lock_guard lock(mu_);
      queue_.push_back(std::move(e));
    }
    cv_.notify_one();
  }

  Envelope pop() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [this] { return !queue_.empty(); });
    Envelope e = std::move(queue_.front());
    queue_.pop_front();
    return e;
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Envelope> queue_;
};

inline std::string describe(const std::exception_ptr& error) {
  try {
    std::rethrow_exception(error);
  } catch (const std::exception& e) {
    return e.what();
  } catch (...) {
    return "unknown exception";
  }
}

class Accumulator {
 public:
  void add_iteration(double t_s_total, const std::vector<double>& t_v, double t_r, double t_p, double iteration,
                     double order_bytes) {
    ++iterations_;
    t_s_ += t_s_total / static_cast<double>(t_v.size());
    double tv_sum = 0.0;
    for (std::size_t w = 0; w < t_v.size(); ++w) {
      tv_sum += t_v[w];
      per_worker_[w] += t_v[w];
    }
    t_v_ += tv_sum / static_cast<double>(t_v.size());
    t_r_ += t_r;
    t_p_ += t_p;
    iteration_ += iteration;
    order_bytes_ += order_bytes;
  }

  explicit Accumulator(std::size_t workers) : per_worker_(workers, 0.0) {}

  RunMetrics finish(std::size_t workers, double latency) const {
    RunMetrics m;
    m.workers = workers;
    m.iterations = iterations_;
    m.latency_ns = latency;
    if (iterations_ == 0) return m;
    const double k = static_cast<double>(iterations_);
    m.t_s_ns = t_s_ / k;
    m.t_v_ns = t_v_ / k;
    m.t_w_ns = static_cast<double>(workers) * m.t_v_ns;
    m.t_r_ns = t_r_ / k;
    m.t_p_ns = t_p_ / k;
    m.iteration_ns = iteration_ / k;
    m.order_bytes = order_bytes_ / k;
    double var = 0.0;
    for (double total : per_worker_) {
      const double d = total / k - m.t_v_ns;
      var += d * d;
    }
    m.t_v_spread_ns = std::sqrt(var / static_cast<double>(workers));
    return m;
  }

 private:
  std::vector<double> per_worker_;
  std::uint64_t iterations_ = 0;
  double t_s_ = 0.0, t_v_ = 0.0, t_r_ = 0.0, t_p_ = 0.0, iteration_ = 0.0, order_bytes_ = 0.0;
};

}  // namespace detail

/// One-byte message latency L of a backend: the simulator's configured value, or half the
/// median of `latency_samples` ping-pong round trips with a pool thread.
inline double measure_latency(const Options& opt) {
  if (opt.backend == Backend::sequential_sim) return opt.sim_latency_ns;

  const std::size_t samples = std::max<std::size_t>(opt.latency_samples, 1000);
  detail::Mailbox ping, pong;
  std::jthread echo([&] {
    for (;;) {
      detail::Envelope e = ping.pop();
      if (e.stop) return;
      pong.push(std::move(e));
    }
  });
  std::vector<double> round_trips;
  round_trips.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    const auto t0 = Clock::now();
    ping.push(detail::Envelope::message(Bytes{0x5A}));
    (void)pong.pop();
    round_trips.push_back(detail::elapsed_ns(t0));
  }
  ping.push(detail::Envelope::stop_signal());
  auto mid = round_trips.begin() + static_cast<std::ptrdiff_t>(round_trips.size() / 2);
  std::nth_element(round_trips.begin(), mid, round_trips.end());
  return *mid / 2.0;
}

namespace detail {

inline void check_barrier(std::size_t received, std::size_t workers) {
  if (received != workers) {
    throw std::logic_error("bsf: evaluation reached with " + std::to_string(received) + " of " +
                           std::to_string(workers) + " results");
  }
}

template <Workload W>
RunMetrics run_sequential(W& w, const Options& opt, const std::vector<Range>& ranges, double latency) {
  const std::size_t p = opt.workers;
  std::vector<typename W::WorkerState> states;
  states.reserve(p);
  for (std::size_t id = 0; id < p; ++id) states.push_back(w.init_worker(id, ranges[id]));

  Accumulator acc(p);
  std::vector<Bytes> inbox(p), outbox(p);
  std::vector<double> t_v(p);
  while (!w.exit_check()) {
    auto t0 = Clock::now();
    const typename W::Order order = w.make_order();
    double t_p = elapsed_ns(t0);

    double t_s = 0.0;
    double bytes = 0.0;
    for (std::size_t id = 0; id < p; ++id) {
      t0 = Clock::now();
      inbox[id] = W::encode_order(order);
      t_s += elapsed_ns(t0);
      if (id == 0) {
        bytes = static_cast<double>(inbox[0].size());
        if (opt.order_tap) opt.order_tap(inbox[0]);
      }
    }

    for (std::size_t id = 0; id < p; ++id) {
      t0 = Clock::now();
      try {
        outbox[id] = W::encode_result(W::process_order(states[id], W::decode_order(inbox[id])));
      } catch (const std::exception& e) {
        throw std::runtime_error("bsf: worker " + std::to_string(id) + " failed: " + e.what());
      }
      t_v[id] = elapsed_ns(t0);
    }

    double t_r = 0.0;
    std::vector<typename W::Result> results;
    results.reserve(p);
    for (std::size_t id = 0; id < p; ++id) {
      t0 = Clock::now();
      results.push_back(W::decode_result(outbox[id]));
      t_r += elapsed_ns(t0);
    }
    check_barrier(results.size(), p);

    t0 = Clock::now();
    w.evaluate(w.merge_results(std::move(results)));
    t_p += elapsed_ns(t0);

    const double modeled = static_cast<double>(p) * 2.0 * latency + t_s + *std::max_element(t_v.begin(), t_v.end()) +
                           t_r + t_p;
    acc.add_iteration(t_s, t_v, t_r, t_p, modeled, bytes);
  }
  return acc.finish(p, latency);
}

template <Workload W>
class Pool {
 public:
  Pool(const W& w, const Options& opt, const std::vector<Range>& ranges) : inbox_(opt.workers), outbox_(opt.workers) {
    const std::size_t p = opt.workers;
    const std::size_t threads = opt.thread_cap == 0 ? p : std::min(p, opt.thread_cap);
    threads_.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
      threads_.emplace_back([this, &w, &ranges, t, threads, p] { serve(w, ranges, t, threads, p); });
    }
  }

  Pool(const Pool&) = delete;
  Pool& operator=(const Pool&) = delete;

  ~Pool() {
    for (auto& box : inbox_) box.push(Envelope::stop_signal());
  }

  Mailbox& inbox(std::size_t id) { return inbox_[id]; }
  Mailbox& outbox(std::size_t id) { return outbox_[id]; }

 private:
  void serve(const W& w, const std::vector<Range>& ranges, std::size_t t, std::size_t threads, std::size_t p) {
    std::vector<std::size_t> mine;
    std::vector<std::optional<typename W::WorkerState>> states;
    for (std::size_t id = t; id < p; id += threads) {
      mine.push_back(id);
      Envelope ready;
      try {
        states.emplace_back(w.init_worker(id, ranges[id]));
      } catch (...) {
        states.emplace_back(std::nullopt);
        ready.error = std::current_exception();
      }
      outbox_[id].push(std::move(ready));
    }
    for (;;) {
      for (std::size_t k = 0; k < mine.size(); ++k) {
        Envelope e = inbox_[mine[k]].pop();
        if (e.stop) return;
        Envelope reply;
        const auto t0 = Clock::now();
        try {
          if (!states[k]) throw std::runtime_error("worker state was not initialized");
          reply.payload = W::encode_result(W::process_order(*states[k], W::decode_order(e.payload)));
        } catch (...) {
          reply.error = std::current_exception();
        }
        reply.busy_ns = elapsed_ns(t0);
        outbox_[mine[k]].push(std::move(reply));
      }
    }
  }

  std::vector<Mailbox> inbox_;
  std::vector<Mailbox> outbox_;
  std::vector<std::jthread> threads_;  // declared last: joined before the mailboxes go away
};

template <Workload W>
RunMetrics run_pool(W& w, const Options& opt, const std::vector<Range>& ranges, double latency) {
  const std::size_t p = opt.workers;
  Pool<W> pool(w, opt, ranges);

  // Initialization barrier.
  for (std::size_t id = 0; id < p; ++id) {
    Envelope ready = pool.outbox(id).pop();
    if (ready.error) {
      throw std::runtime_error("bsf: worker " + std::to_string(id) + " failed to initialize: " + describe(ready.error));
    }
  }

  Accumulator acc(p);
  std::vector<double> t_v(p);
  while (!w.exit_check()) {
    const auto start = Clock::now();
    auto t0 = start;
    const typename W::Order order = w.make_order();
    double t_p = elapsed_ns(t0);

    double t_s = 0.0;
    double bytes = 0.0;
    for (std::size_t id = 0; id < p; ++id) {
      t0 = Clock::now();
      Bytes payload = W::encode_order(order);
      if (id == 0) {
        bytes = static_cast<double>(payload.size());
        if (opt.order_tap) opt.order_tap(payload);
      }
      pool.inbox(id).push(Envelope::message(std::move(payload)));
      t_s += elapsed_ns(t0);
    }

    double t_r = 0.0;
    std::vector<typename W::Result> results;
    results.reserve(p);
    for (std::size_t id = 0; id < p; ++id) {
      Envelope reply = pool.outbox(id).pop();
      if (reply.error) {
        throw std::runtime_error("bsf: worker " + std::to_string(id) + " failed: " + describe(reply.error));
      }
      t0 = Clock::now();
      results.push_back(W::decode_result(reply.payload));
      t_r += elapsed_ns(t0);
      t_v[id] = reply.busy_ns;
    }
    check_barrier(results.size(), p);

    t0 = Clock::now();
    w.evaluate(w.merge_results(std::move(results)));
    t_p += elapsed_ns(t0);

    acc.add_iteration(t_s, t_v, t_r, t_p, elapsed_ns(start), bytes);
  }
  return acc.finish(p, latency);
}

}  // namespace detail

/// Runs a workload through the BSF lifecycle: initialization, then (send orders, process,
/// receive results, barrier, evaluate, exit check) until the master's exit check holds,
/// then finalization. Items are block-partitioned across workers by worker id.
template <Workload W>
RunMetrics run_bsf(W& workload, const Options& opt) {
  if (opt.workers < 1) throw std::invalid_argument("run_bsf: need at least one worker");
  const std::size_t items = workload.item_count();
  if (items < opt.workers) {
    throw std::invalid_argument("run_bsf: " + std::to_string(opt.workers) + " workers for only " +
                                std::to_string(items) + " items");
  }
  std::vector<Range> ranges;
  for (std::size_t id = 0; id < opt.workers; ++id) ranges.push_back(block_partition(items, opt.workers, id));

  const double latency = measure_latency(opt);
  RunMetrics metrics = opt.backend == Backend::sequential_sim ? detail::run_sequential(workload, opt, ranges, latency)
                                                              : detail::run_pool(workload, opt, ranges, latency);
  workload.finalize();
  return metrics;
}

}  // namespace nslp::bsf
