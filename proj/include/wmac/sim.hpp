#pragma once

// Deterministic discrete-event core: integer-microsecond clock, an event
// queue ordered by (time, insertion sequence), cancellable handles, a
// line-oriented trace sink and portable per-node random streams.

#include <cstdint>
#include <functional>
#include <limits>
#include <ostream>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace wmac {

using Micros = std::int64_t;

inline constexpr Micros kNever = std::numeric_limits<Micros>::max();

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// ---------------------------------------------------------------------------
// RandomStream
//
// SplitMix64 (Steele, Lea, Flood 2014).  A stream is keyed by (seed, node);
// the initial state is mix(seed) ^ mix(node + golden), so every node owns an
// independent substream and the draw sequence depends only on integer
// arithmetic.  Integer draws use rejection sampling so the sequence is the
// same on every platform (std::uniform_int_distribution is not portable).
// ---------------------------------------------------------------------------
class RandomStream {
 public:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  RandomStream() : RandomStream(0, 0) {}
  RandomStream(std::uint64_t seed, std::int64_t node)
      : seed_(seed), node_(node),
        state_(mix(seed) ^ mix(static_cast<std::uint64_t>(node) + kGolden)) {}

  std::uint64_t seed() const { return seed_; }
  std::int64_t node() const { return node_; }

  std::uint64_t next_u64() {
    state_ += kGolden;
    return mix(state_);
  }

  // Uniform integer in [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw ContractViolation("uniform_int: lo > hi");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == std::numeric_limits<std::uint64_t>::max()) {
      return static_cast<std::int64_t>(next_u64());
    }
    const std::uint64_t range = span + 1;
    // 2^64 mod range; rejecting values below it leaves a multiple of range.
    const std::uint64_t threshold = (0 - range) % range;
    std::uint64_t x = next_u64();
    while (x < threshold) x = next_u64();
    return lo + static_cast<std::int64_t>(x % range);
  }

  // Uniform real in [0, 1) with 53 bits of precision.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform01() < p;
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::int64_t node_;
  std::uint64_t state_;
};

inline std::int64_t draw_uniform_int(RandomStream& stream, std::int64_t lo, std::int64_t hi) {
  return stream.uniform_int(lo, hi);
}

// ---------------------------------------------------------------------------
// Trace output: `time_us<TAB>node<TAB>kind<TAB>detail`.
// ---------------------------------------------------------------------------
class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void line(Micros time, std::int64_t node, std::string_view kind,
                    std::string_view detail) = 0;
};

class StreamTrace : public TraceSink {
 public:
  explicit StreamTrace(std::ostream& os) : os_(os) {}
  void line(Micros time, std::int64_t node, std::string_view kind,
            std::string_view detail) override {
    os_ << time << '\t' << node << '\t' << kind << '\t' << detail << '\n';
  }

 private:
  std::ostream& os_;
};

// FNV-1a over the exact bytes a StreamTrace would write; lets long runs be
// compared for byte identity without holding the text.
class HashTrace : public TraceSink {
 public:
  void line(Micros time, std::int64_t node, std::string_view kind,
            std::string_view detail) override {
    std::string s = std::to_string(time);
    s += '\t';
    s += std::to_string(node);
    s += '\t';
    s.append(kind);
    s += '\t';
    s.append(detail);
    s += '\n';
    for (unsigned char c : s) {
      hash_ ^= c;
      hash_ *= 0x100000001B3ULL;
    }
    bytes_ += s.size();
    ++lines_;
  }
  std::uint64_t hash() const { return hash_; }
  std::uint64_t bytes() const { return bytes_; }
  std::uint64_t lines() const { return lines_; }

 private:
  std::uint64_t hash_ = 0xCBF29CE484222325ULL;
  std::uint64_t bytes_ = 0;
  std::uint64_t lines_ = 0;
};

// ---------------------------------------------------------------------------
// Engine
// ---------------------------------------------------------------------------
struct EventHandle {
  std::uint64_t seq = 0;  // 0 = empty handle
  bool valid() const { return seq != 0; }
};

inline constexpr std::int64_t kMediumTarget = -1;

class Engine {
 public:
  using Callback = std::function<void()>;

  Micros now() const { return clock_; }
  std::size_t pending() const { return pending_.size(); }

  void set_trace(TraceSink* sink) { trace_ = sink; }
  bool tracing() const { return trace_ != nullptr; }

  EventHandle schedule(Micros time, std::string_view kind, std::int64_t target, Callback cb,
                       std::string detail = {}) {
    if (time < clock_) {
      throw ContractViolation("schedule: time " + std::to_string(time) +
                              " is before the clock " + std::to_string(clock_));
    }
    const std::uint64_t seq = ++next_seq_;
    queue_.push(Entry{time, seq, kind, target, std::move(cb), std::move(detail)});
    pending_.insert(seq);
    return EventHandle{seq};
  }

  // Returns true if the handle referred to a still-pending event.
  bool cancel(EventHandle& h) {
    if (!h.valid()) return false;
    const bool fresh = pending_.erase(h.seq) > 0;
    if (fresh) cancelled_.insert(h.seq);
    h = EventHandle{};
    return fresh;
  }

  std::uint64_t run_until(Micros t_end) {
    if (t_end < clock_) throw ContractViolation("run_until: t_end before clock");
    std::uint64_t count = 0;
    while (!queue_.empty() && queue_.top().time <= t_end) {
      Entry e = std::move(const_cast<Entry&>(queue_.top()));
      queue_.pop();
      if (auto it = cancelled_.find(e.seq); it != cancelled_.end()) {
        cancelled_.erase(it);
        continue;
      }
      pending_.erase(e.seq);
      clock_ = e.time;
      if (trace_) trace_->line(e.time, e.target, e.kind, e.detail);
      ++count;
      e.cb();
    }
    clock_ = t_end;
    return count;
  }

 private:
  struct Entry {
    Micros time;
    std::uint64_t seq;
    std::string_view kind;  // static storage (string literal)
    std::int64_t target;
    Callback cb;
    std::string detail;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  Micros clock_ = 0;
  std::uint64_t next_seq_ = 0;
  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  std::unordered_set<std::uint64_t> cancelled_;
  std::unordered_set<std::uint64_t> pending_;
  TraceSink* trace_ = nullptr;
};

}  // namespace wmac
