#pragma once

// Fairness-oriented contention: shared-window MILD backoff, the estimation
// based backoff driven by the pairwise fairness index, and distributed fair
// scheduling (backoff proportional to packet length over share) together
// with a centralized self-clocked fair queueing reference.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wmac/sim.hpp"

namespace wmac {

// ---------------------------------------------------------------------------
// MILD
// ---------------------------------------------------------------------------
enum class ContentionOutcome { Collision, Success };

inline int mild_update(int cw, ContentionOutcome outcome, double factor, int cw_min = 16,
                       int cw_max = 256) {
  if (outcome == ContentionOutcome::Collision) {
    return std::min(static_cast<int>(std::lround(cw * factor)), cw_max);
  }
  return std::max(cw - 1, cw_min);
}

// Copy semantics: the advertised window replaces the local one.
inline int share_cw_on_hear(int /*local_cw*/, int advertised_cw) { return advertised_cw; }

// ---------------------------------------------------------------------------
// Fairness index
// ---------------------------------------------------------------------------
enum class FairnessReading {
  WorstPair,  // min over pairs of min/max: 1 only when every normalized share matches
  BestPair,   // max over pairs, the literal outer max
};

inline double fairness_index(const std::vector<double>& shares, const std::vector<double>& throughputs,
                             FairnessReading reading = FairnessReading::WorstPair) {
  if (shares.size() != throughputs.size()) throw std::invalid_argument("fairness_index: size mismatch");
  if (shares.size() < 2) throw std::invalid_argument("fairness_index: need at least two entries");
  std::vector<double> norm;
  norm.reserve(shares.size());
  bool any = false;
  for (std::size_t i = 0; i < shares.size(); ++i) {
    if (!(shares[i] > 0.0)) throw std::invalid_argument("fairness_index: share must be positive");
    if (throughputs[i] < 0.0) throw std::invalid_argument("fairness_index: negative throughput");
    if (throughputs[i] > 0.0) any = true;
    norm.push_back(throughputs[i] / shares[i]);
  }
  if (!any) throw std::invalid_argument("fairness_index: all throughputs are zero");
  std::sort(norm.begin(), norm.end());
  if (reading == FairnessReading::WorstPair) return norm.front() / norm.back();
  double best = 0.0;
  for (std::size_t i = 1; i < norm.size(); ++i) {
    if (norm[i] > 0.0) best = std::max(best, norm[i - 1] / norm[i]);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Estimation-based backoff
// ---------------------------------------------------------------------------

// Sliding-window bit counts for own traffic and for traffic inferred by
// snooping on other stations' CTS/ACK frames.
class TrafficEstimate {
 public:
  explicit TrafficEstimate(Micros window = 100'000) : window_(window) {}

  Micros window() const { return window_; }
  void add_self(Micros t, double bits) { self_.push_back({t, bits}); }
  void add_others(Micros t, double bits) { others_.push_back({t, bits}); }

  double self_bits(Micros now) { return sum(self_, now); }
  double others_bits(Micros now) { return sum(others_, now); }

 private:
  struct Sample {
    Micros t;
    double bits;
  };
  double sum(std::deque<Sample>& q, Micros now) {
    while (!q.empty() && q.front().t <= now - window_) q.pop_front();
    double s = 0.0;
    for (const auto& x : q) s += x.bits;
    return s;
  }

  Micros window_;
  std::deque<Sample> self_;
  std::deque<Sample> others_;
};

// Double the window when over the fair share, halve it when under, hold on a tie.
inline int estimation_backoff_update(int cw, double w_self, double w_others, double phi_self,
                                     int cw_min = 16, int cw_max = 256) {
  if (!(phi_self > 0.0 && phi_self < 1.0)) throw ContractViolation("estimation_backoff_update: phi outside (0,1)");
  const double mine = w_self / phi_self;
  const double theirs = w_others / (1.0 - phi_self);
  if (mine > theirs) return std::min(2 * cw, cw_max);
  if (mine < theirs) return std::max(cw / 2, cw_min);
  return cw;
}

// Share claimed by a station carrying `own_streams` streams when all other
// traffic is treated as a single stream.
inline double stream_share(int own_streams) {
  return static_cast<double>(own_streams) / static_cast<double>(own_streams + 1);
}

// ---------------------------------------------------------------------------
// SCFQ tags
// ---------------------------------------------------------------------------
class ScfqTags {
 public:
  void set_share(int flow, double phi) {
    if (!(phi > 0.0)) throw ContractViolation("ScfqTags: share must be positive");
    phi_[flow] = phi;
  }
  double share(int flow) const { return phi_.at(flow); }
  double previous_finish(int flow) const {
    auto it = prev_.find(flow);
    return it == prev_.end() ? 0.0 : it->second;
  }

  friend std::pair<double, double> scfq_assign_tags(ScfqTags& tags, int flow, double length_bits,
                                                     double arrival_v);

 private:
  std::map<int, double> phi_;
  std::map<int, double> prev_;
};

inline std::pair<double, double> scfq_assign_tags(ScfqTags& tags, int flow, double length_bits,
                                                  double arrival_v) {
  const double phi = tags.share(flow);
  const double start = std::max(arrival_v, tags.previous_finish(flow));
  const double finish = start + length_bits / phi;
  tags.prev_[flow] = finish;
  return {start, finish};
}

struct ScfqPacket {
  double length_bits = 0.0;
  double arrival = 0.0;  // real time, in the same unit as length/link_rate
};

struct ScfqFlow {
  double phi = 1.0;
  std::vector<ScfqPacket> packets;  // in arrival order
};

struct ScfqPick {
  int flow = 0;
  int packet = 0;
  friend bool operator==(const ScfqPick&, const ScfqPick&) = default;
};

// Centralized SCFQ over one link: tags stamped at arrival from the virtual
// clock, service in ascending finish tag (ties: flow id, then arrival
// order), and the clock set to the finish tag of each packet as it ends.
inline std::vector<ScfqPick> scfq_oracle(const std::vector<ScfqFlow>& flows, double link_rate = 1.0) {
  if (!(link_rate > 0.0)) throw std::invalid_argument("scfq_oracle: link rate must be positive");
  ScfqTags tags;
  struct Pending {
    double finish;
    int flow;
    int packet;
  };
  struct Arrival {
    double time;
    int flow;
    int packet;
  };
  std::vector<Arrival> arrivals;
  for (std::size_t f = 0; f < flows.size(); ++f) {
    tags.set_share(static_cast<int>(f), flows[f].phi);
    for (std::size_t k = 0; k < flows[f].packets.size(); ++k) {
      arrivals.push_back({flows[f].packets[k].arrival, static_cast<int>(f), static_cast<int>(k)});
    }
  }
  std::stable_sort(arrivals.begin(), arrivals.end(), [](const Arrival& a, const Arrival& b) {
    if (a.time != b.time) return a.time < b.time;
    if (a.flow != b.flow) return a.flow < b.flow;
    return a.packet < b.packet;
  });

  auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-9 * std::max({1.0, std::abs(a), std::abs(b)});
  };

  std::vector<ScfqPick> order;
  std::vector<Pending> queue;
  double now = 0.0;
  double v = 0.0;
  std::size_t next = 0;
  while (next < arrivals.size() || !queue.empty()) {
    if (queue.empty() && arrivals[next].time > now) now = arrivals[next].time;
    while (next < arrivals.size() && arrivals[next].time <= now) {
      const auto& a = arrivals[next++];
      const auto& pkt = flows[a.flow].packets[a.packet];
      const auto tag = scfq_assign_tags(tags, a.flow, pkt.length_bits, v);
      queue.push_back({tag.second, a.flow, a.packet});
    }
    auto best = queue.begin();
    for (auto it = queue.begin(); it != queue.end(); ++it) {
      if (close(it->finish, best->finish)) {
        if (it->flow < best->flow || (it->flow == best->flow && it->packet < best->packet)) best = it;
      } else if (it->finish < best->finish) {
        best = it;
      }
    }
    const Pending p = *best;
    queue.erase(best);
    order.push_back({p.flow, p.packet});
    now += flows[p.flow].packets[p.packet].length_bits / link_rate;
    v = p.finish;
  }
  return order;
}

// ---------------------------------------------------------------------------
// DFS backoff
// ---------------------------------------------------------------------------
struct DfsParams {
  double scaling = 16.0 / 12000.0;     // max-size (1500 B) packet at share 1 -> 16 slots
  std::int64_t compress_threshold = 0; // slots; 0 disables compression
  bool randomize = true;               // multiply by U[0.5, 1.5)
};

// Maps intervals above the threshold onto a logarithmic range; continuous
// at the threshold and monotone.
inline std::int64_t dfs_compress(std::int64_t slots, std::int64_t threshold) {
  if (threshold <= 0 || slots <= threshold) return slots;
  const double t = static_cast<double>(threshold);
  return threshold + static_cast<std::int64_t>(std::floor(t * std::log2(static_cast<double>(slots) / t)));
}

inline std::int64_t dfs_backoff(double length_bits, double phi, const DfsParams& p, RandomStream& stream) {
  if (!(phi > 0.0) || !(p.scaling > 0.0)) throw ContractViolation("dfs_backoff: phi and scaling must be positive");
  // Guard against 2.9999999 when the exact product is integral.
  auto b = static_cast<std::int64_t>(std::floor(p.scaling * length_bits / phi + 1e-9));
  if (p.randomize) {
    const double u = 0.5 + stream.uniform01();
    b = static_cast<std::int64_t>(std::floor(static_cast<double>(b) * u));
  }
  return dfs_compress(b, p.compress_threshold);
}

}  // namespace wmac
