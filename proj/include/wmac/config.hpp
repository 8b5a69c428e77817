#pragma once

// Run configuration: protocol variant names and the in-memory scenario.

#include <array>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmac/dcf.hpp"
#include "wmac/fair_sched.hpp"
#include "wmac/mac_ext.hpp"
#include "wmac/medium.hpp"
#include "wmac/pcf.hpp"
#include "wmac/phy.hpp"
#include "wmac/rate_adapt.hpp"

namespace wmac {

enum class RateScheme { Fixed, Arf, Rbar, Oar };
enum class BackoffScheme { Beb, Mild, Estimation, Dfs };

// "dcf" plus any of "+arf", "+rbar", "+oar", "+mild", "+est", "+dfs",
// "+plus" (DCF+), "+edcf", "+ica".  At most one rate scheme and one
// backoff scheme.
struct Variant {
  RateScheme rate = RateScheme::Fixed;
  BackoffScheme backoff = BackoffScheme::Beb;
  bool dcf_plus = false;
  bool edcf = false;
  bool ica = false;

  friend bool operator==(const Variant&, const Variant&) = default;
};

inline Variant parse_variant(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, '+');) parts.push_back(p);
  if (parts.empty() || parts[0] != "dcf") throw std::invalid_argument("variant must start with 'dcf': '" + text + "'");
  if (text.back() == '+') throw std::invalid_argument("variant '" + text + "' ends with '+'");
  Variant v;
  bool rate_set = false;
  bool backoff_set = false;
  auto set_rate = [&](RateScheme r) {
    if (rate_set) throw std::invalid_argument("variant '" + text + "' names two rate schemes");
    v.rate = r;
    rate_set = true;
  };
  auto set_backoff = [&](BackoffScheme b) {
    if (backoff_set) throw std::invalid_argument("variant '" + text + "' names two backoff schemes");
    v.backoff = b;
    backoff_set = true;
  };
  for (std::size_t i = 1; i < parts.size(); ++i) {
    const auto& f = parts[i];
    if (f == "arf") set_rate(RateScheme::Arf);
    else if (f == "rbar") set_rate(RateScheme::Rbar);
    else if (f == "oar") set_rate(RateScheme::Oar);
    else if (f == "mild") set_backoff(BackoffScheme::Mild);
    else if (f == "est") set_backoff(BackoffScheme::Estimation);
    else if (f == "dfs") set_backoff(BackoffScheme::Dfs);
    else if (f == "plus") v.dcf_plus = true;
    else if (f == "edcf") v.edcf = true;
    else if (f == "ica") v.ica = true;
    else throw std::invalid_argument("unknown variant feature '" + f + "' in '" + text + "'");
  }
  return v;
}

inline std::string variant_name(const Variant& v) {
  std::string s = "dcf";
  switch (v.rate) {
    case RateScheme::Arf: s += "+arf"; break;
    case RateScheme::Rbar: s += "+rbar"; break;
    case RateScheme::Oar: s += "+oar"; break;
    case RateScheme::Fixed: break;
  }
  switch (v.backoff) {
    case BackoffScheme::Mild: s += "+mild"; break;
    case BackoffScheme::Estimation: s += "+est"; break;
    case BackoffScheme::Dfs: s += "+dfs"; break;
    case BackoffScheme::Beb: break;
  }
  if (v.dcf_plus) s += "+plus";
  if (v.edcf) s += "+edcf";
  if (v.ica) s += "+ica";
  return s;
}

struct NodeConfig {
  NodePosition pos;
  Variant variant;
  MacParams mac;
  std::optional<double> est_phi;          // defaults to own-stream share
  std::vector<EdcfCategory> categories;   // used when variant.edcf
};

enum class FlowType { Backlogged, Cbr, Reply, Batch };

struct FlowConfig {
  int src = 0;
  int dst = 0;
  FlowType type = FlowType::Backlogged;
  std::int64_t bytes = 1500;
  double rate_bps = 0.0;                 // cbr
  int reply_of = -1;                     // reply: index of the forward flow
  std::vector<std::int64_t> batch;       // batch: packet sizes queued at start
  Micros start = 0;
  Micros stop = kNever;
  double share = 0.0;                    // 0 = equal split over all flows
  int category = 0;
  bool reverse = false;                  // eligible to ride a DCF+ ACK
};

struct LinkOverride {
  int src = 0;
  int dst = 0;
  Quality quality = Quality::High;
};

struct Scenario {
  std::uint64_t seed = 1;
  Micros duration = 1'000'000;
  MacTiming timing;
  double hear_range = 250.0;
  double sense_range = 250.0;
  std::vector<NodeConfig> nodes;
  std::vector<FlowConfig> flows;

  // Links.
  Quality initial_quality = Quality::High;
  TransitionMatrix transitions = identity_matrix();
  Micros dwell = 0;  // 0 = static links
  std::vector<LinkOverride> link_overrides;
  std::array<double, 4> base_fer = {0.5, 0.1, 0.02, 0.005};  // per Quality, at fer_base_size bytes
  double fer_base_size = 300.0;
  double overrate_fer = 1.0;  // DATA sent faster than the link sustains
  bool control_fer = false;
  double capture_ratio = 10.0;
  bool collisions = true;  // false: overlapping frames never corrupt each other

  // Scheme knobs.
  double mild_factor = 1.5;
  Micros est_window = 100'000;
  DfsParams dfs;
  ArfConfig arf;
  std::optional<Micros> ica_cts_timeout;
  std::optional<SuperframeConfig> pcf;

  // Traffic.
  std::size_t queue_limit = 100;
  std::size_t backlog_depth = 8;
  std::int64_t max_packet_bytes = 1500;
  Micros metric_window = 100'000;

  Topology topology() const {
    std::vector<NodePosition> pos;
    pos.reserve(nodes.size());
    for (const auto& n : nodes) pos.push_back(n.pos);
    return Topology(std::move(pos), hear_range, sense_range);
  }

  // Normalized flow shares: explicit ones as given, the rest split evenly
  // over what is left, then scaled to sum to one.
  std::vector<double> flow_shares() const {
    std::vector<double> out(flows.size(), 0.0);
    double given = 0.0;
    std::size_t unset = 0;
    for (const auto& f : flows) {
      if (f.share > 0.0) given += f.share;
      else ++unset;
    }
    const double rest = unset == 0 ? 0.0 : (given < 1.0 ? (1.0 - given) / unset : 1.0 / flows.size());
    double total = 0.0;
    for (std::size_t i = 0; i < flows.size(); ++i) {
      out[i] = flows[i].share > 0.0 ? flows[i].share : rest;
      total += out[i];
    }
    if (total > 0.0) {
      for (auto& s : out) s /= total;
    }
    return out;
  }

  void validate() const {
    if (duration <= 0) throw std::invalid_argument("duration must be positive");
    timing.validate();
    (void)topology();
    for (const auto& n : nodes) {
      n.mac.validate();
      if (n.variant.edcf) {
        if (n.categories.empty()) throw std::invalid_argument("node " + std::to_string(n.pos.id) + " has edcf but no categories");
        if (n.categories.size() > static_cast<std::size_t>(kMaxCategories)) {
          throw std::invalid_argument("node " + std::to_string(n.pos.id) + " has more than 8 categories");
        }
        for (const auto& c : n.categories) c.validate(timing);
      }
      if (n.est_phi && !(*n.est_phi > 0.0 && *n.est_phi < 1.0)) {
        throw std::invalid_argument("est_phi must be in (0,1)");
      }
    }
    const int n = static_cast<int>(nodes.size());
    for (std::size_t i = 0; i < flows.size(); ++i) {
      const auto& f = flows[i];
      if (f.src < 0 || f.src >= n) throw std::invalid_argument("flow references unknown node " + std::to_string(f.src));
      if (f.dst < 0 || f.dst >= n) throw std::invalid_argument("flow references unknown node " + std::to_string(f.dst));
      if (f.src == f.dst) throw std::invalid_argument("flow source equals destination");
      if (f.type == FlowType::Reply) {
        if (f.reply_of < 0 || f.reply_of >= static_cast<int>(flows.size())) {
          throw std::invalid_argument("reply flow refers to an unknown flow");
        }
        const auto& fw = flows[static_cast<std::size_t>(f.reply_of)];
        if (fw.src != f.dst || fw.dst != f.src) throw std::invalid_argument("reply flow must run opposite its forward flow");
      }
      if (f.type == FlowType::Cbr && !(f.rate_bps > 0.0)) throw std::invalid_argument("cbr flow needs a positive rate");
      if (f.bytes < 1 && f.type != FlowType::Batch) throw std::invalid_argument("packet size must be positive");
      if (f.share < 0.0) throw std::invalid_argument("flow share must be positive");
      const auto& nc = nodes[static_cast<std::size_t>(f.src)];
      const int ncat = nc.variant.edcf ? static_cast<int>(nc.categories.size()) : 1;
      if (f.category < 0 || f.category >= ncat) throw std::invalid_argument("flow category out of range");
    }
    if (dwell < 0) throw std::invalid_argument("dwell must be >= 0");
    validate_matrix(transitions);
    for (const auto& o : link_overrides) {
      if (o.src < 0 || o.src >= n || o.dst < 0 || o.dst >= n) throw std::invalid_argument("link refers to unknown node");
    }
    for (double p : base_fer) {
      if (p < 0.0 || p > 1.0) throw std::invalid_argument("base FER must be in [0,1]");
    }
    if (!(capture_ratio >= 1.0)) throw std::invalid_argument("capture_ratio must be >= 1");
    if (metric_window <= 0) throw std::invalid_argument("metric window must be positive");
    if (pcf) {
      if (pcf->coordinator < 0 || pcf->coordinator >= n) throw std::invalid_argument("coordinator is not a node");
      for (int id : pcf->pollable) {
        if (id < 0 || id >= n) throw std::invalid_argument("pollable list names unknown node " + std::to_string(id));
      }
      const auto& pc = nodes[static_cast<std::size_t>(pcf->coordinator)];
      validate_superframe(*pcf, timing, pc.mac, max_packet_bytes, pc.mac.data_rate);
    }
  }
};

}  // namespace wmac
