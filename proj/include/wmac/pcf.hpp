#pragma once

// Point coordination: superframe layout checks, the poll cursor and the
// pieces of the polling timeline that do not depend on the medium.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmac/dcf.hpp"
#include "wmac/frame.hpp"

namespace wmac {

struct SuperframeConfig {
  int coordinator = 0;
  Micros period = 100'000;
  Micros cfp_max = 40'000;
  Micros cp_min = 20'000;
  std::vector<int> pollable;
};

// Longest single DCF exchange: DIFS, the largest backoff, and a full
// four-way handshake for a maximum-size packet at `rate`.
inline Micros max_dcf_exchange(const MacTiming& t, const MacParams& p, std::int64_t max_bytes, Rate rate) {
  return t.difs + static_cast<Micros>(p.cw_max - 1) * t.slot + t.rts_air() + t.cts_air() +
         airtime(max_bytes, rate) + t.ack_air() + 3 * t.sifs;
}

inline void validate_superframe(const SuperframeConfig& c, const MacTiming& t, const MacParams& p,
                                std::int64_t max_bytes, Rate rate) {
  if (c.period <= 0 || c.cfp_max <= 0) throw std::invalid_argument("superframe period and cfp_max must be positive");
  const Micros need = max_dcf_exchange(t, p, max_bytes, rate);
  if (c.cp_min < need) {
    throw std::invalid_argument("cp_min " + std::to_string(c.cp_min) + " is shorter than one DCF exchange (" +
                                std::to_string(need) + " us)");
  }
  if (c.cfp_max + c.cp_min > c.period) throw std::invalid_argument("cfp_max + cp_min exceeds the superframe period");
  for (int id : c.pollable) {
    if (id == c.coordinator) throw std::invalid_argument("the coordinator cannot poll itself");
  }
}

enum class PollResponse { DataCfAck, CfAck, None };

// Round-robin position over the pollable list; survives across superframes.
class PollCursor {
 public:
  explicit PollCursor(std::size_t list_size = 0) : size_(list_size) {}

  std::size_t position() const { return pos_; }
  std::size_t polled_this_cfp() const { return polled_; }
  bool cycle_complete() const { return polled_ >= size_; }

  void begin_cfp() { polled_ = 0; }
  std::size_t take() {
    if (size_ == 0) throw ContractViolation("PollCursor: empty list");
    const std::size_t p = pos_;
    pos_ = (pos_ + 1) % size_;
    ++polled_;
    return p;
  }

 private:
  std::size_t size_ = 0;
  std::size_t pos_ = 0;
  std::size_t polled_ = 0;
};

// Gap between the end of the previous CFP frame and the next poll.
inline Micros next_poll_gap(const MacTiming& t, PollResponse last) {
  return last == PollResponse::None ? t.pifs : t.sifs;
}

// Worst case for one more poll: gap, the poll, a maximum DATA+CF-ACK reply,
// its ACK, and the closing CF-END.
inline Micros worst_poll_cycle(const MacTiming& t, std::int64_t max_bytes, Rate rate) {
  return t.pifs + airtime(kCfPollBytes, Rate::R1) + t.sifs + airtime(max_bytes, rate) + t.sifs + t.ack_air() +
         t.sifs + airtime(kCfEndBytes, Rate::R1);
}

// One frame answers a poll: the head packet if there is one, otherwise a
// bare CF-ACK back to the coordinator.
inline Frame handle_poll(int self, int coordinator, std::optional<std::int64_t> head_bytes, int head_dst, Rate rate) {
  if (!head_bytes) return make_control(FrameKind::CfAck, self, coordinator, 0);
  Frame f;
  f.kind = FrameKind::DataCfAck;
  f.src = self;
  f.dst = head_dst;
  f.payload_bytes = *head_bytes;
  f.rate = rate;
  return f;
}

}  // namespace wmac
