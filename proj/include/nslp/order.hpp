#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <vector>

#include "nslp/lp.hpp"
#include "nslp/targeting.hpp"

namespace nslp {

using Bytes = std::vector<std::uint8_t>;

/// Master-to-worker message: new cross center (theta) and new values of changed A entries
/// (alpha), b elements (beta) and objective coefficients (gamma).
struct Order {
  Vector theta;
  SparseDelta delta;
  std::uint64_t clock = 0;
  friend bool operator==(const Order&, const Order&) = default;
};

struct WorkerResult {
  std::uint32_t worker_id = 0;
  std::vector<CohortBest> bests;
  friend bool operator==(const WorkerResult&, const WorkerResult&) = default;
};

inline Order make_order(const DenseLP& prev, const DenseLP& next, Vector center, std::uint64_t clock) {
  require_length(center, next.n(), "make_order: center");
  return Order{std::move(center), delta_between(prev, next), clock};
}

/// Little-endian encoder.
class ByteWriter {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int s = 0; s < 32; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void u64(std::uint64_t v) {
    for (int s = 0; s < 64; s += 8) out_.push_back(static_cast<std::uint8_t>(v >> s));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  Bytes take() && { return std::move(out_); }

 private:
  Bytes out_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8() {
    need(1);
    return in_[pos_++];
  }
  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int s = 0; s < 32; s += 8) v |= static_cast<std::uint32_t>(in_[pos_++]) << s;
    return v;
  }
  std::uint64_t u64() {
    need(8);
    std::uint64_t v = 0;
    for (int s = 0; s < 64; s += 8) v |= static_cast<std::uint64_t>(in_[pos_++]) << s;
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }

  bool done() const noexcept { return pos_ == in_.size(); }

 private:
  void need(std::size_t k) const {
    if (pos_ + k > in_.size()) throw std::runtime_error("wire: truncated message");
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

namespace detail {

inline std::uint32_t checked_u32(std::size_t v) {
  if (v > 0xFFFFFFFFull) throw std::length_error("wire: value does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace detail

// Order layout: u32 n, n x f64 theta, then three sections (A, b, c), each a u32 count followed
// by (u32 index, f64 value) pairs, A indices flattened as row * n + col; finally u64 clock.
inline Bytes encode_order(const Order& order) {
  ByteWriter w;
  const std::size_t n = order.theta.size();
  w.u32(detail::checked_u32(n));
  for (double v : order.theta) w.f64(v);
  w.u32(detail::checked_u32(order.delta.a_changes.size()));
  for (const auto& e : order.delta.a_changes) {
    w.u32(detail::checked_u32(e.row * n + e.col));
    w.f64(e.value);
  }
  for (const auto* section : {&order.delta.b_changes, &order.delta.c_changes}) {
    w.u32(detail::checked_u32(section->size()));
    for (const auto& e : *section) {
      w.u32(detail::checked_u32(e.index));
      w.f64(e.value);
    }
  }
  w.u64(order.clock);
  return std::move(w).take();
}

inline Order decode_order(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  Order order;
  const std::size_t n = r.u32();
  if (n == 0) throw std::runtime_error("wire: order with empty theta");
  order.theta.resize(n);
  for (double& v : order.theta) v = r.f64();
  const std::uint32_t a_count = r.u32();
  order.delta.a_changes.reserve(a_count);
  for (std::uint32_t k = 0; k < a_count; ++k) {
    const std::size_t flat = r.u32();
    order.delta.a_changes.push_back({flat / n, flat % n, r.f64()});
  }
  for (auto* section : {&order.delta.b_changes, &order.delta.c_changes}) {
    const std::uint32_t count = r.u32();
    section->reserve(count);
    for (std::uint32_t k = 0; k < count; ++k) {
      const std::size_t index = r.u32();
      section->push_back({index, r.f64()});
    }
  }
  order.clock = r.u64();
  if (!r.done()) throw std::runtime_error("wire: trailing bytes after order");
  return order;
}

// Result layout: u32 worker id, u32 count, then per cohort u32 cohort, u8 present and, when
// present, f64 value, u32 n and n x f64 point.
inline Bytes encode_result(const WorkerResult& result) {
  ByteWriter w;
  w.u32(result.worker_id);
  w.u32(detail::checked_u32(result.bests.size()));
  for (const auto& b : result.bests) {
    w.u32(detail::checked_u32(static_cast<std::size_t>(b.cohort)));
    w.u8(b.present() ? 1 : 0);
    if (!b.present()) continue;
    w.f64(*b.value);
    w.u32(detail::checked_u32(b.point->size()));
    for (double v : *b.point) w.f64(v);
  }
  return std::move(w).take();
}

inline WorkerResult decode_result(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  WorkerResult result;
  result.worker_id = r.u32();
  const std::uint32_t count = r.u32();
  result.bests.reserve(count);
  for (std::uint32_t k = 0; k < count; ++k) {
    CohortBest b;
    b.cohort = static_cast<int>(r.u32());
    if (r.u8() != 0) {
      b.value = r.f64();
      Vector p(r.u32());
      for (double& v : p) v = r.f64();
      b.point = std::move(p);
    }
    result.bests.push_back(std::move(b));
  }
  if (!r.done()) throw std::runtime_error("wire: trailing bytes after result");
  return result;
}

}  // namespace nslp
