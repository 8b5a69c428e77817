#pragma once

// Geometry, transmissions in flight and the reception/capture rule.

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmac/frame.hpp"
#include "wmac/phy.hpp"
#include "wmac/sim.hpp"

namespace wmac {

struct NodePosition {
  int id = 0;
  double x = 0.0;
  double y = 0.0;
};

// Reachability is a function of distance only, hence symmetric.
class Topology {
 public:
  Topology() = default;
  Topology(std::vector<NodePosition> nodes, double hear_range, double sense_range)
      : nodes_(std::move(nodes)), hear_(hear_range), sense_(sense_range) {
    if (hear_ <= 0.0) throw std::invalid_argument("hear_range must be positive");
    if (sense_ < hear_) throw std::invalid_argument("sense_range must be >= hear_range");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      if (nodes_[i].id != static_cast<int>(i)) {
        throw std::invalid_argument("node ids must be 0..n-1 in order");
      }
    }
  }

  int size() const { return static_cast<int>(nodes_.size()); }
  const NodePosition& node(int id) const { return nodes_.at(static_cast<std::size_t>(id)); }
  double hear_range() const { return hear_; }
  double sense_range() const { return sense_; }

  double distance(int a, int b) const {
    const auto& p = node(a);
    const auto& q = node(b);
    return std::hypot(p.x - q.x, p.y - q.y);
  }
  bool can_hear(int a, int b) const { return a != b && distance(a, b) <= hear_; }
  bool can_sense(int a, int b) const { return a != b && distance(a, b) <= sense_; }

  // Unit transmit power, 1/d^2 path loss, distances clamped at 1 m.
  double received_power(int sender, int receiver) const {
    const double d = std::max(1.0, distance(sender, receiver));
    return 1.0 / (d * d);
  }

 private:
  std::vector<NodePosition> nodes_;
  double hear_ = 250.0;
  double sense_ = 250.0;
};

struct Transmission {
  std::uint64_t id = 0;
  int sender = 0;
  Frame frame;
  Micros start = 0;
  Micros end = 0;
  Rate rate = Rate::R1;
};

enum class Reception { Received, Collided, Errored, NotHeard };

inline std::string_view reception_name(Reception r) {
  switch (r) {
    case Reception::Received: return "RECEIVED";
    case Reception::Collided: return "COLLIDED";
    case Reception::Errored: return "ERRORED";
    case Reception::NotHeard: return "NOT_HEARD";
  }
  return "?";
}

// Outcome of every transmission in `overlapping` at `receiver`.  Frames the
// receiver cannot decode are NOT_HEARD; energy from anything within sense
// range interferes.  A lone frame survives unless the FER draw fails; with
// several, the strongest decodable frame is captured only if it started
// first and its power beats the sum of the rest by `capture_ratio`.
// `fer(i)` gives the error probability for overlapping[i]; Bernoulli draws
// come from `stream` in index order, and only for frames that could survive.
inline std::vector<Reception> resolve_reception(int receiver, const Topology& topo,
                                                std::span<const Transmission> overlapping,
                                                double capture_ratio, bool receiver_transmitting,
                                                const std::function<double(std::size_t)>& fer,
                                                RandomStream& stream) {
  std::vector<Reception> out(overlapping.size(), Reception::NotHeard);
  if (receiver_transmitting) return out;

  std::vector<std::size_t> energetic;
  for (std::size_t i = 0; i < overlapping.size(); ++i) {
    if (overlapping[i].sender == receiver) return out;  // half duplex
    if (topo.can_sense(overlapping[i].sender, receiver)) energetic.push_back(i);
  }

  auto draw = [&](std::size_t i) {
    return stream.bernoulli(fer(i)) ? Reception::Errored : Reception::Received;
  };

  if (energetic.size() == 1) {
    const std::size_t i = energetic.front();
    if (topo.can_hear(overlapping[i].sender, receiver)) out[i] = draw(i);
    return out;
  }

  double total = 0.0;
  std::size_t best = energetic.empty() ? 0 : energetic.front();
  double best_power = -1.0;
  bool unique = true;
  for (std::size_t i : energetic) {
    const double p = topo.received_power(overlapping[i].sender, receiver);
    total += p;
    if (p > best_power) {
      best_power = p;
      best = i;
      unique = true;
    } else if (p == best_power) {
      unique = false;
    }
  }
  for (std::size_t i : energetic) {
    if (topo.can_hear(overlapping[i].sender, receiver)) out[i] = Reception::Collided;
  }
  if (energetic.empty() || !unique || !topo.can_hear(overlapping[best].sender, receiver)) return out;

  const double others = total - best_power;
  bool first = true;
  for (std::size_t i : energetic) {
    if (i != best && overlapping[i].start < overlapping[best].start) first = false;
  }
  if (first && best_power >= capture_ratio * others) out[best] = draw(best);
  return out;
}

}  // namespace wmac
