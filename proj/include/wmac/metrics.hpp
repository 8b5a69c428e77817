#pragma once

// Per-run measurements and the windowed fairness series.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "wmac/fair_sched.hpp"
#include "wmac/sim.hpp"

namespace wmac {

struct FlowMetrics {
  int src = 0;
  int dst = 0;
  double share = 0.0;
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t queued_at_end = 0;
  double generated_bits = 0.0;
  double delivered_bits = 0.0;
  double throughput_bps = 0.0;
  double mean_delay_us = 0.0;
  double p95_delay_us = 0.0;
};

struct PcfStats {
  std::uint64_t beacons = 0;
  std::uint64_t polls = 0;
  std::uint64_t cf_ends = 0;
  Micros min_cp = kNever;  // shortest contention period seen
};

struct RunMetrics {
  std::string variant;
  Micros duration = 0;
  std::vector<FlowMetrics> flows;

  std::uint64_t transmissions = 0;  // every frame put on the air
  std::uint64_t collisions = 0;       // collision events: overlapping frames, at least one lost
  std::uint64_t collided_frames = 0;  // unicast frames lost to overlap at their destination
  double collision_fraction = 0.0;    // collision events per transmission
  double aggregate_throughput_bps = 0.0;

  std::vector<double> fairness_series;
  double fairness_mean = 0.0;

  std::uint64_t data_frames = 0;
  std::uint64_t rts_frames = 0;
  std::uint64_t reverse_exchanges = 0;     // DCF+ reverse DATA frames sent
  std::uint64_t reverse_collisions = 0;    // DCF+ reverse DATA frames collided
  std::uint64_t parallel_frames = 0;       // exposed-node DATA frames
  std::uint64_t parallel_overruns = 0;     // parallel DATA ending after the primary
  std::uint64_t primary_ack_collisions = 0;
  PcfStats pcf;
  std::uint64_t events = 0;
};

inline double percentile(std::vector<double> v, double p) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double rank = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(rank));
  const auto hi = static_cast<std::size_t>(std::ceil(rank));
  return v[lo] + (v[hi] - v[lo]) * (rank - static_cast<double>(lo));
}

// One index value per window, over the flows active in that window (shares
// renormalized to them).  Windows with fewer than two active flows, or in
// which no active flow delivered anything, are skipped.
inline std::vector<double> fairness_series(const std::vector<std::vector<double>>& window_bits,
                                           const std::vector<std::vector<bool>>& active,
                                           const std::vector<double>& shares) {
  std::vector<double> out;
  for (std::size_t w = 0; w < window_bits.size(); ++w) {
    std::vector<double> phi;
    std::vector<double> bits;
    bool any = false;
    for (std::size_t f = 0; f < shares.size(); ++f) {
      if (!active[w][f]) continue;
      phi.push_back(shares[f]);
      bits.push_back(window_bits[w][f]);
      if (window_bits[w][f] > 0.0) any = true;
    }
    if (phi.size() < 2 || !any) continue;
    out.push_back(fairness_index(phi, bits));
  }
  return out;
}

}  // namespace wmac
