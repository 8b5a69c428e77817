#pragma once

// Distributed coordination function building blocks: inter-frame spaces,
// contention-window evolution, backoff draws, NAV arithmetic, the RTS
// threshold rule, fragmentation and the duration fields of each frame.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "wmac/frame.hpp"
#include "wmac/phy.hpp"
#include "wmac/sim.hpp"

namespace wmac {

struct MacTiming {
  Micros slot = 20;
  Micros sifs = 10;
  Micros pifs = 30;  // sifs + slot
  Micros difs = 50;  // sifs + 2 slot

  static MacTiming from_slot_sifs(Micros slot, Micros sifs) {
    return MacTiming{slot, sifs, sifs + slot, sifs + 2 * slot};
  }

  void validate() const {
    if (slot <= 0 || sifs <= 0) throw std::invalid_argument("slot and SIFS must be positive");
    if (!(sifs < pifs && pifs < difs)) throw std::invalid_argument("need SIFS < PIFS < DIFS");
  }

  Micros cts_air() const { return airtime(kCtsBytes, Rate::R1); }
  Micros ack_air() const { return airtime(kAckBytes, Rate::R1); }
  Micros rts_air() const { return airtime(kRtsBytes, Rate::R1); }

  // Earliest instant the response could have fully arrived, plus one slot.
  Micros cts_timeout() const { return sifs + cts_air() + slot; }
  Micros ack_timeout() const { return sifs + ack_air() + slot; }
};

struct MacParams {
  std::int64_t rts_threshold = 500;
  std::int64_t frag_threshold = 2346;
  int retry_limit = 7;
  int cw_min = 16;
  int cw_max = 256;
  Rate data_rate = Rate::R11;

  void validate() const {
    if (cw_min < 1 || cw_max < cw_min) throw std::invalid_argument("need 1 <= cw_min <= cw_max");
    if (retry_limit < 0) throw std::invalid_argument("retry_limit must be >= 0");
    if (frag_threshold < 1) throw std::invalid_argument("frag_threshold must be >= 1");
    if (rts_threshold < 0) throw std::invalid_argument("rts_threshold must be >= 0");
  }
};

enum class TxOutcome { Success, Failure };

// Binary exponential backoff.
inline int cw_after(int cw, TxOutcome outcome, int cw_min = 16, int cw_max = 256) {
  if (outcome == TxOutcome::Success) return cw_min;
  return std::min(2 * cw, cw_max);
}

// Uniform slot count in [0, cw-1].
inline int draw_backoff(int cw, RandomStream& stream) {
  if (cw < 1) throw ContractViolation("draw_backoff: cw < 1");
  return static_cast<int>(stream.uniform_int(0, cw - 1));
}

// The NAV only ever extends.
inline Micros nav_merge(Micros nav_until, Micros heard_duration, Micros now) {
  return std::max(nav_until, now + heard_duration);
}

// Inclusive threshold: payloads at or above it use RTS/CTS.
inline bool should_use_rts(std::int64_t payload_bytes, std::int64_t rts_threshold) {
  return payload_bytes >= rts_threshold;
}

struct FragmentSpec {
  std::int64_t size = 0;
  bool more_fragments = false;
  int fragment_number = 0;

  friend bool operator==(const FragmentSpec&, const FragmentSpec&) = default;
};

inline std::vector<FragmentSpec> fragment_plan(std::int64_t payload_bytes, std::int64_t frag_threshold) {
  if (frag_threshold < 1) throw ContractViolation("fragment_plan: threshold < 1");
  std::vector<FragmentSpec> plan;
  if (payload_bytes <= 0) {
    plan.push_back({0, false, 0});
    return plan;
  }
  const std::int64_t count = (payload_bytes + frag_threshold - 1) / frag_threshold;
  std::int64_t left = payload_bytes;
  for (std::int64_t i = 0; i < count; ++i) {
    const std::int64_t sz = std::min(left, frag_threshold);
    left -= sz;
    plan.push_back({sz, i + 1 < count, static_cast<int>(i)});
  }
  return plan;
}

// Duration fields.  Every value is measured from the end of the frame that
// carries it.
inline Micros rts_duration(const MacTiming& t, Micros data_air) {
  return 3 * t.sifs + t.cts_air() + data_air + t.ack_air();
}
inline Micros cts_duration_from_rts(const MacTiming& t, Micros rts_dur) {
  return std::max<Micros>(0, rts_dur - t.sifs - t.cts_air());
}
// DATA covers its ACK, and when another frame follows in the same burst,
// that frame and its ACK too.
inline Micros data_duration(const MacTiming& t, Micros next_data_air = -1) {
  Micros d = t.sifs + t.ack_air();
  if (next_data_air >= 0) d += 2 * t.sifs + next_data_air + t.ack_air();
  return d;
}
inline Micros ack_duration_from_data(const MacTiming& t, Micros data_dur) {
  return std::max<Micros>(0, data_dur - t.sifs - t.ack_air());
}

}  // namespace wmac
