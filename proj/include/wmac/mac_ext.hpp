#pragma once

// DCF extensions: DCF+ (the ACK reserves the channel for reverse traffic),
// EDCF traffic categories with per-category AIFS and persistence factor,
// and Intelligent Collision Avoidance (exposed-node parallel transmission).

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "wmac/dcf.hpp"
#include "wmac/frame.hpp"
#include "wmac/phy.hpp"

namespace wmac {

// ---------------------------------------------------------------------------
// DCF+
// ---------------------------------------------------------------------------

// Duration carried by the ACK for an inbound DATA frame: zero for a plain
// ACK, otherwise enough to cover CTS, the reverse DATA and its ACK.  A
// fragmented primary exchange uses the duration field for the next
// fragment, so DCF+ stays out of it.
inline Micros dcfplus_ack_duration(const MacTiming& t, std::optional<std::int64_t> reverse_bytes, Rate rate,
                                   bool primary_fragmented = false) {
  if (!reverse_bytes || primary_fragmented) return 0;
  return 3 * t.sifs + t.cts_air() + airtime(*reverse_bytes, rate) + t.ack_air();
}

// ---------------------------------------------------------------------------
// EDCF
// ---------------------------------------------------------------------------
inline constexpr int kMaxCategories = 8;

struct EdcfCategory {
  int id = 0;
  Micros aifs = 50;
  double pf = 2.0;
  int cw_min = 16;
  int cw_max = 256;

  void validate(const MacTiming& t) const {
    if (id < 0 || id >= kMaxCategories) throw std::invalid_argument("category id must be 0..7");
    if (aifs < t.difs) throw std::invalid_argument("AIFS must be at least DIFS");
    if (pf < 1.0) throw std::invalid_argument("persistence factor must be >= 1");
    if (cw_min < 1 || cw_max < cw_min) throw std::invalid_argument("bad category cw bounds");
  }
};

inline int edcf_expand(int cw, double pf, int cw_max) {
  return std::min(static_cast<int>(std::lround(cw * pf)), cw_max);
}

struct CategoryCountdown {
  Micros aifs = 50;
  int backoff_slots = 0;
  bool has_traffic = false;
};

struct EdcfResolution {
  int winner = -1;
  std::vector<int> losers;  // tied categories that suffer a virtual collision
  Micros ready_after = 0;   // idle time, from the start of the idle period
};

// Every category counts AIFS then its backoff over one shared idle period.
// The earliest to finish wins; simultaneous finishers are resolved in
// favour of the lowest AIFS, then the lowest index.
inline EdcfResolution edcf_contend(const std::vector<CategoryCountdown>& cats, Micros slot) {
  EdcfResolution r;
  Micros best = kNever;
  for (const auto& c : cats) {
    if (c.has_traffic) best = std::min(best, c.aifs + c.backoff_slots * slot);
  }
  if (best == kNever) return r;
  r.ready_after = best;
  std::vector<int> tied;
  for (std::size_t i = 0; i < cats.size(); ++i) {
    if (cats[i].has_traffic && cats[i].aifs + cats[i].backoff_slots * slot == best) {
      tied.push_back(static_cast<int>(i));
    }
  }
  auto win = std::min_element(tied.begin(), tied.end(), [&](int a, int b) {
    if (cats[a].aifs != cats[b].aifs) return cats[a].aifs < cats[b].aifs;
    return a < b;
  });
  r.winner = *win;
  for (int i : tied) {
    if (i != r.winner) r.losers.push_back(i);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Intelligent Collision Avoidance
// ---------------------------------------------------------------------------
struct OverheardRts {
  int sender = 0;
  int receiver = 0;
  Micros duration = 0;
  Micros heard_at = 0;
  std::int64_t packet = -1;
};

struct IcaState {
  std::optional<OverheardRts> overheard_rts;
  Micros cts_timeout_at = 0;
  bool exposed = false;
  Micros parallel_budget_end = 0;  // end of the primary DATA frame
};

// End of the primary DATA frame implied by an RTS duration that covers
// CTS + DATA + ACK and three SIFS gaps.
inline Micros ica_primary_data_end(const MacTiming& t, Micros heard_at, Micros rts_duration) {
  return heard_at + rts_duration - t.sifs - t.ack_air();
}

// `frame` was decoded by a station it was not addressed to.
inline IcaState ica_on_overhear(IcaState s, const Frame& frame, Micros now, const MacTiming& t,
                                std::optional<Micros> cts_timeout = std::nullopt) {
  if (frame.kind == FrameKind::Rts) {
    s.overheard_rts = OverheardRts{frame.src, frame.dst, frame.duration, now, frame.packet};
    s.cts_timeout_at = now + cts_timeout.value_or(t.cts_timeout());
    s.exposed = false;
    s.parallel_budget_end = ica_primary_data_end(t, now, frame.duration);
  } else if (frame.kind == FrameKind::Cts) {
    // Either the CTS answering the RTS, or a CTS without one: ordinary NAV.
    s.overheard_rts.reset();
    s.exposed = false;
  }
  return s;
}

// The CTS timeout elapsed without a CTS being decoded.
inline IcaState ica_on_cts_timeout(IcaState s, Micros now) {
  if (s.overheard_rts && now >= s.cts_timeout_at) s.exposed = true;
  return s;
}

// Fragment sizes for a parallel transmission starting at `now` that ends no
// later than the primary DATA.  Fragments are frag_size bytes (the last one
// shorter), separated by SIFS + ACK + SIFS.  A single fragment that does not
// fit is shrunk to the largest size that does.
inline std::optional<std::vector<std::int64_t>> ica_plan_parallel(const IcaState& s, std::int64_t remaining_bytes,
                                                                   std::int64_t frag_size, Rate rate, Micros now,
                                                                   const MacTiming& t) {
  if (!s.exposed || remaining_bytes <= 0 || frag_size < 1) return std::nullopt;
  const Micros end = s.parallel_budget_end;
  std::vector<std::int64_t> plan;
  Micros cursor = now;
  std::int64_t left = remaining_bytes;
  while (left > 0) {
    const std::int64_t sz = std::min(left, frag_size);
    const Micros start = plan.empty() ? cursor : cursor + 2 * t.sifs + t.ack_air();
    if (start + airtime(sz, rate) <= end) {
      plan.push_back(sz);
      cursor = start + airtime(sz, rate);
      left -= sz;
      continue;
    }
    if (plan.empty()) {
      const Micros room = end - start - kPlcpMicros;
      if (room < 1) return std::nullopt;
      const std::int64_t fit = room * half_mbps(rate) / 16;
      if (fit < 1) return std::nullopt;
      plan.push_back(std::min(fit, sz));
    }
    break;
  }
  return plan;
}

// Air time from the first fragment's start to the last one's end.
inline Micros ica_plan_span(const std::vector<std::int64_t>& plan, Rate rate, const MacTiming& t) {
  Micros span = 0;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (i > 0) span += 2 * t.sifs + t.ack_air();
    span += airtime(plan[i], rate);
  }
  return span;
}

}  // namespace wmac
