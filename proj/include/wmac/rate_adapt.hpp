#pragma once

// Rate selection: sender-side auto rate fallback (ARF), receiver-selected
// rates carried in CTS (RBAR) and opportunistic bursts sized by the ratio
// of selected to base rate (OAR).

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "wmac/dcf.hpp"
#include "wmac/frame.hpp"
#include "wmac/phy.hpp"

namespace wmac {

// ---------------------------------------------------------------------------
// ARF
// ---------------------------------------------------------------------------
struct ArfConfig {
  int success_threshold = 10;
  Micros recovery_timer = 60'000;
};

struct ArfState {
  Rate current_rate = Rate::R11;
  int consecutive_successes = 0;
  int consecutive_failures = 0;
  std::optional<Micros> recovery_deadline;  // armed while below the top rate
  bool just_upgraded = false;
};

enum class AckResult { Ack, NoAck };

namespace detail {
inline void arf_upgrade(ArfState& s, Micros now, const ArfConfig& cfg) {
  s.current_rate = step_up(s.current_rate);
  s.just_upgraded = true;
  s.consecutive_successes = 0;
  s.consecutive_failures = 0;
  s.recovery_deadline = has_higher(s.current_rate) ? std::optional<Micros>(now + cfg.recovery_timer)
                                                    : std::nullopt;
}
inline void arf_downgrade(ArfState& s, Micros now, const ArfConfig& cfg) {
  s.current_rate = step_down(s.current_rate);
  s.just_upgraded = false;
  s.consecutive_successes = 0;
  s.consecutive_failures = 0;
  s.recovery_deadline = now + cfg.recovery_timer;
}
}  // namespace detail

// Applies recovery-timer expiry and returns the rate for the next attempt.
inline Rate arf_rate(ArfState& s, Micros now, const ArfConfig& cfg = {}) {
  if (s.recovery_deadline && now >= *s.recovery_deadline && has_higher(s.current_rate)) {
    detail::arf_upgrade(s, now, cfg);
  }
  return s.current_rate;
}

inline std::pair<ArfState, Rate> arf_on_result(ArfState s, AckResult result, Micros now,
                                               const ArfConfig& cfg = {}) {
  arf_rate(s, now, cfg);
  if (result == AckResult::Ack) {
    s.consecutive_failures = 0;
    s.just_upgraded = false;
    ++s.consecutive_successes;
    if (s.consecutive_successes >= cfg.success_threshold && has_higher(s.current_rate)) {
      detail::arf_upgrade(s, now, cfg);
    }
  } else {
    s.consecutive_successes = 0;
    if (s.just_upgraded) {
      detail::arf_downgrade(s, now, cfg);
    } else if (++s.consecutive_failures >= 2) {
      if (has_lower(s.current_rate)) {
        detail::arf_downgrade(s, now, cfg);
      } else {
        s.consecutive_failures = 0;
      }
    }
  }
  return {s, s.current_rate};
}

// ---------------------------------------------------------------------------
// RBAR
// ---------------------------------------------------------------------------
inline Rate rbar_select_rate(Quality observed) { return max_rate(observed); }

inline bool rbar_needs_rsh(Rate tentative, Rate selected) { return tentative != selected; }

// Reservation a third party derives from the (rate, size) pair on an RTS.
inline Micros rbar_rts_duration(const MacTiming& t, Rate rate, std::int64_t size) {
  return rts_duration(t, airtime(size, rate));
}
// ... and on a CTS. The CTS echoes the tentative rate, so a bystander knows
// whether the DATA will carry the RSH prefix.
inline Micros rbar_cts_duration(const MacTiming& t, Rate rate, std::int64_t size, bool rsh = false) {
  return 2 * t.sifs + airtime(size, rate) + (rsh ? payload_micros(kRshBytes, Rate::R1) : 0) + t.ack_air();
}

// ---------------------------------------------------------------------------
// OAR
// ---------------------------------------------------------------------------
inline constexpr Rate kOarBaseRate = Rate::R2;

inline int oar_burst_len(Rate selected, Rate base = kOarBaseRate) {
  return std::max(1, static_cast<int>(std::floor(mbps(selected) / mbps(base))));
}

// more_fragments on all but the last frame, fragment number 0 everywhere so
// the receiver never tries to reassemble.
inline std::vector<Frame> oar_mark_burst(std::vector<Frame> frames) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].dst != frames[0].dst) throw ContractViolation("oar_mark_burst: mixed destinations");
  }
  for (std::size_t i = 0; i < frames.size(); ++i) {
    frames[i].more_fragments = i + 1 < frames.size();
    frames[i].fragment_number = 0;
  }
  return frames;
}

// Sum of post-PLCP airtimes must not exceed that of one maximum-size packet
// at the base rate.
inline bool oar_burst_within_share(const std::vector<std::int64_t>& sizes, Rate rate,
                                   std::int64_t max_packet_bytes, Rate base = kOarBaseRate) {
  Micros total = 0;
  for (auto s : sizes) total += payload_micros(s, rate);
  return total <= payload_micros(max_packet_bytes, base);
}

}  // namespace wmac
