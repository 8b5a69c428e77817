#pragma once

// Small builders shared by the simulation-level tests.

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "wmac/wmac.hpp"

namespace wmac::testing {

struct TraceLine {
  Micros time = 0;
  int node = 0;
  std::string kind;
  std::string detail;
};

struct Capture : TraceSink {
  std::vector<TraceLine> lines;
  void line(Micros time, std::int64_t node, std::string_view kind, std::string_view detail) override {
    lines.push_back({time, static_cast<int>(node), std::string(kind), std::string(detail)});
  }
  // tx_start lines whose detail begins with `prefix` (e.g. "RTS", "DATA 2->3").
  std::vector<TraceLine> starts(const std::string& prefix = "") const {
    std::vector<TraceLine> out;
    for (const auto& l : lines) {
      if (l.kind == "tx_start" && l.detail.rfind(prefix, 0) == 0) out.push_back(l);
    }
    return out;
  }
};

// Value of `key=` in a frame description, or "" when absent.
inline std::string field(const std::string& detail, const std::string& key) {
  const auto at = detail.find(" " + key + "=");
  if (at == std::string::npos) return "";
  const auto from = at + key.size() + 2;
  return detail.substr(from, detail.find(' ', from) - from);
}

inline bool has_flag(const std::string& detail, const std::string& flag) {
  return (" " + detail + " ").find(" " + flag + " ") != std::string::npos;
}

inline NodeConfig node_at(int id, double x, double y, const std::string& variant = "dcf") {
  NodeConfig n;
  n.pos = {id, x, y};
  n.variant = parse_variant(variant);
  return n;
}

inline FlowConfig backlogged(int src, int dst, std::int64_t bytes = 1500) {
  FlowConfig f;
  f.src = src;
  f.dst = dst;
  f.bytes = bytes;
  return f;
}

inline FlowConfig batch(int src, int dst, std::vector<std::int64_t> sizes) {
  FlowConfig f;
  f.src = src;
  f.dst = dst;
  f.type = FlowType::Batch;
  f.batch = std::move(sizes);
  return f;
}

// Stations on a circle of `radius` around an access point (node 0).
inline Scenario cell(int stations, double radius = 20.0, const std::string& variant = "dcf") {
  Scenario sc;
  sc.base_fer = {0.0, 0.0, 0.0, 0.0};
  sc.nodes.push_back(node_at(0, 0, 0, variant));
  for (int i = 1; i <= stations; ++i) {
    const double a = 2.0 * 3.14159265358979 * (i - 1) / stations;
    sc.nodes.push_back(node_at(i, radius * std::cos(a), radius * std::sin(a), variant));
  }
  return sc;
}

// A small DFS instance that can be replayed through the centralized SCFQ
// reference: every packet queued at t=0, no collisions, no randomization or
// compression, dyadic shares and a scaling of 1/8 so each backoff is exactly
// bytes/share slots.
struct DfsInstance {
  Scenario sc;
  std::vector<ScfqFlow> flows;
};

inline DfsInstance dfs_instance(std::uint64_t seed) {
  RandomStream r(seed, 99);
  const int n = static_cast<int>(r.uniform_int(2, 5));
  std::vector<double> shares = {1.0};
  while (static_cast<int>(shares.size()) < n) {
    const auto i = static_cast<std::size_t>(r.uniform_int(0, static_cast<std::int64_t>(shares.size()) - 1));
    shares[i] /= 2.0;
    shares.push_back(shares[i]);
  }
  DfsInstance d;
  Scenario& sc = d.sc;
  sc.seed = seed;
  sc.duration = 60'000'000;
  sc.collisions = false;
  sc.base_fer = {0.0, 0.0, 0.0, 0.0};
  sc.dfs.randomize = false;
  sc.dfs.compress_threshold = 0;
  sc.dfs.scaling = 1.0 / 8.0;
  for (int i = 0; i < 2 * n; ++i) {
    const double a = 2.0 * 3.14159265358979 * i / (2 * n);
    auto node = node_at(i, 15.0 * std::cos(a), 15.0 * std::sin(a), "dcf+dfs");
    node.mac.rts_threshold = 3000;
    sc.nodes.push_back(node);
  }
  for (int f = 0; f < n; ++f) {
    std::vector<std::int64_t> sizes;
    const auto count = r.uniform_int(1, 4);
    ScfqFlow of;
    of.phi = shares[static_cast<std::size_t>(f)];
    for (std::int64_t k = 0; k < count; ++k) {
      sizes.push_back(r.uniform_int(20, 200));
      of.packets.push_back({static_cast<double>(sizes.back()) * 8.0, 0.0});
    }
    auto fl = batch(2 * f, 2 * f + 1, sizes);
    fl.share = of.phi;
    sc.flows.push_back(fl);
    d.flows.push_back(of);
  }
  return d;
}

// DATA starts of the instance, ordered by (time, sender), as (flow, packet).
inline std::vector<ScfqPick> dfs_service_order(const DfsInstance& d) {
  Capture cap;
  Simulation sim(d.sc, &cap);
  sim.run();
  auto data = cap.starts("DATA");
  std::stable_sort(data.begin(), data.end(), [](const TraceLine& a, const TraceLine& b) {
    return a.time != b.time ? a.time < b.time : a.node < b.node;
  });
  std::vector<ScfqPick> out;
  std::vector<int> next(d.flows.size(), 0);
  for (const auto& l : data) {
    const int flow = l.node / 2;
    out.push_back({flow, next[static_cast<std::size_t>(flow)]++});
  }
  return out;
}

inline std::string csv_of(const std::vector<RunMetrics>& runs) {
  std::ostringstream os;
  write_csv(os, runs);
  return os.str();
}

}  // namespace wmac::testing
