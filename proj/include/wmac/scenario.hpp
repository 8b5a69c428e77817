#pragma once

// Scenario text format.
//
//   # comment
//   [sim]      seed, duration, slot, sifs, hear_range, sense_range,
//              capture_ratio, collisions, queue_limit, backlog_depth,
//              max_packet_bytes, metric_window
//   [nodes]    node = <id> <x> <y>
//   [mac]      defaults for every node, and node.<id>.<key> overrides:
//              variant, rts_threshold, frag_threshold, retry_limit, cw_min,
//              cw_max, data_rate, est_phi, category = <id> <aifs> <pf> [cw_min cw_max]
//              plus run-wide knobs: mild_factor, est_window, dfs_scaling,
//              dfs_compress, dfs_randomize, arf_success, arf_timer,
//              ica_cts_timeout, pcf.coordinator, pcf.period, pcf.cfp_max,
//              pcf.cp_min, pcf.pollable
//   [links]    initial, dwell, row.<Q> = p p p p, fer.<Q>, fer_base_size,
//              overrate_fer, control_fer, link = <src> <dst> <Q>
//   [flows]    flow = <src> <dst> backlogged|cbr|reply|batch [key=value ...]
//              keys: bytes, rate, of, sizes, start, stop, share, category, reverse
//
// Durations accept a us/ms/s suffix (bare numbers are microseconds).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmac/config.hpp"

namespace wmac {

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(int line, const std::string& msg)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + msg : msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline double to_double(const std::string& s, int line) {
  double v = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ScenarioError(line, "expected a number, got '" + s + "'");
  return v;
}

inline std::int64_t to_int(const std::string& s, int line) {
  std::int64_t v = 0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ScenarioError(line, "expected an integer, got '" + s + "'");
  return v;
}

inline Micros to_micros(const std::string& s, int line) {
  auto ends = [&](const char* suf) {
    const std::string x(suf);
    return s.size() > x.size() && s.compare(s.size() - x.size(), x.size(), x) == 0;
  };
  double scale = 1.0;
  std::string num = s;
  if (ends("us")) {
    num = s.substr(0, s.size() - 2);
  } else if (ends("ms")) {
    num = s.substr(0, s.size() - 2);
    scale = 1e3;
  } else if (ends("s")) {
    num = s.substr(0, s.size() - 1);
    scale = 1e6;
  }
  const double v = to_double(num, line) * scale;
  if (v < 0.0) throw ScenarioError(line, "negative duration '" + s + "'");
  return static_cast<Micros>(std::llround(v));
}

inline bool to_bool(const std::string& s, int line) {
  if (s == "on" || s == "true" || s == "yes" || s == "1") return true;
  if (s == "off" || s == "false" || s == "no" || s == "0") return false;
  throw ScenarioError(line, "expected on/off, got '" + s + "'");
}

inline Quality to_quality(const std::string& s, int line) {
  try {
    return quality_from_name(s);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(line, e.what());
  }
}

struct Setting {
  std::string value;
  int line = 0;
};

// Per-node MAC keys, applied after all sections are read.
inline void apply_node_key(NodeConfig& n, const std::string& key, const Setting& s) {
  const int line = s.line;
  try {
    if (key == "variant") n.variant = parse_variant(s.value);
    else if (key == "rts_threshold") n.mac.rts_threshold = to_int(s.value, line);
    else if (key == "frag_threshold") n.mac.frag_threshold = to_int(s.value, line);
    else if (key == "retry_limit") n.mac.retry_limit = static_cast<int>(to_int(s.value, line));
    else if (key == "cw_min") n.mac.cw_min = static_cast<int>(to_int(s.value, line));
    else if (key == "cw_max") n.mac.cw_max = static_cast<int>(to_int(s.value, line));
    else if (key == "data_rate") n.mac.data_rate = rate_from_mbps(to_double(s.value, line));
    else if (key == "est_phi") n.est_phi = to_double(s.value, line);
    else throw ScenarioError(line, "unknown mac key '" + key + "'");
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(line, e.what());
  }
}

inline EdcfCategory parse_category(const Setting& s) {
  const auto w = words(s.value);
  if (w.size() != 3 && w.size() != 5) throw ScenarioError(s.line, "category = <id> <aifs> <pf> [cw_min cw_max]");
  EdcfCategory c;
  c.id = static_cast<int>(to_int(w[0], s.line));
  c.aifs = to_micros(w[1], s.line);
  c.pf = to_double(w[2], s.line);
  if (w.size() == 5) {
    c.cw_min = static_cast<int>(to_int(w[3], s.line));
    c.cw_max = static_cast<int>(to_int(w[4], s.line));
  }
  return c;
}

inline bool is_node_key(const std::string& k) {
  static const std::set<std::string> keys = {"variant", "rts_threshold", "frag_threshold", "retry_limit",
                                             "cw_min",  "cw_max",        "data_rate",      "est_phi"};
  return keys.count(k) > 0;
}

inline FlowConfig parse_flow(const std::string& value, int line) {
  const auto w = words(value);
  if (w.size() < 3) throw ScenarioError(line, "flow = <src> <dst> <type> [key=value ...]");
  FlowConfig f;
  f.src = static_cast<int>(to_int(w[0], line));
  f.dst = static_cast<int>(to_int(w[1], line));
  const auto& type = w[2];
  if (type == "backlogged") f.type = FlowType::Backlogged;
  else if (type == "cbr") f.type = FlowType::Cbr;
  else if (type == "reply") f.type = FlowType::Reply;
  else if (type == "batch") f.type = FlowType::Batch;
  else throw ScenarioError(line, "unknown flow type '" + type + "'");
  if (f.type == FlowType::Reply) f.bytes = 40;
  for (std::size_t i = 3; i < w.size(); ++i) {
    const auto eq = w[i].find('=');
    if (eq == std::string::npos) throw ScenarioError(line, "expected key=value, got '" + w[i] + "'");
    const std::string k = w[i].substr(0, eq);
    const std::string v = w[i].substr(eq + 1);
    if (k == "bytes") f.bytes = to_int(v, line);
    else if (k == "rate") f.rate_bps = to_double(v, line);
    else if (k == "of") f.reply_of = static_cast<int>(to_int(v, line));
    else if (k == "start") f.start = to_micros(v, line);
    else if (k == "stop") f.stop = to_micros(v, line);
    else if (k == "share") f.share = to_double(v, line);
    else if (k == "category") f.category = static_cast<int>(to_int(v, line));
    else if (k == "reverse") f.reverse = to_bool(v, line);
    else if (k == "sizes") {
      std::stringstream ss(v);
      for (std::string x; std::getline(ss, x, ',');) f.batch.push_back(to_int(x, line));
    } else {
      throw ScenarioError(line, "unknown flow key '" + k + "'");
    }
  }
  if (f.type == FlowType::Cbr && f.rate_bps <= 0.0) throw ScenarioError(line, "cbr flow needs rate=<bps>");
  if (f.type == FlowType::Reply && f.reply_of < 0) throw ScenarioError(line, "reply flow needs of=<flow index>");
  if (f.type == FlowType::Batch && f.batch.empty()) throw ScenarioError(line, "batch flow needs sizes=a,b,...");
  for (auto b : f.batch) {
    if (b < 1) throw ScenarioError(line, "batch packet sizes must be positive");
  }
  return f;
}

}  // namespace detail

inline Scenario parse_scenario(const std::string& text) {
  using namespace detail;
  Scenario sc;
  std::map<int, std::pair<NodePosition, int>> nodes;  // id -> (position, line)
  std::map<std::string, Setting> mac_defaults;
  std::map<int, std::map<std::string, Setting>> mac_nodes;
  std::vector<Setting> categories;
  std::map<int, std::vector<Setting>> node_categories;
  std::vector<int> flow_lines;
  SuperframeConfig pcf;
  bool pcf_set = false;

  std::istringstream in(text);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    const std::string s = trim(raw);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ScenarioError(line, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      static const std::set<std::string> known = {"sim", "nodes", "mac", "links", "flows"};
      if (!known.count(section)) throw ScenarioError(line, "unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ScenarioError(line, "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (value.empty()) throw ScenarioError(line, "missing value for '" + key + "'");
    if (section.empty()) throw ScenarioError(line, "key outside any section");

    if (section == "sim") {
      if (key == "seed") sc.seed = static_cast<std::uint64_t>(to_int(value, line));
      else if (key == "duration") sc.duration = to_micros(value, line);
      else if (key == "slot") sc.timing = MacTiming::from_slot_sifs(to_micros(value, line), sc.timing.sifs);
      else if (key == "sifs") sc.timing = MacTiming::from_slot_sifs(sc.timing.slot, to_micros(value, line));
      else if (key == "hear_range") sc.hear_range = to_double(value, line);
      else if (key == "sense_range") sc.sense_range = to_double(value, line);
      else if (key == "capture_ratio") sc.capture_ratio = to_double(value, line);
      else if (key == "collisions") sc.collisions = to_bool(value, line);
      else if (key == "queue_limit") sc.queue_limit = static_cast<std::size_t>(to_int(value, line));
      else if (key == "backlog_depth") sc.backlog_depth = static_cast<std::size_t>(to_int(value, line));
      else if (key == "max_packet_bytes") sc.max_packet_bytes = to_int(value, line);
      else if (key == "metric_window") sc.metric_window = to_micros(value, line);
      else throw ScenarioError(line, "unknown [sim] key '" + key + "'");
    } else if (section == "nodes") {
      if (key != "node") throw ScenarioError(line, "unknown [nodes] key '" + key + "'");
      const auto w = words(value);
      if (w.size() != 3) throw ScenarioError(line, "node = <id> <x> <y>");
      const int id = static_cast<int>(to_int(w[0], line));
      if (nodes.count(id)) throw ScenarioError(line, "duplicate node id " + std::to_string(id));
      nodes[id] = {NodePosition{id, to_double(w[1], line), to_double(w[2], line)}, line};
    } else if (section == "mac") {
      if (key.rfind("node.", 0) == 0) {
        const auto dot = key.find('.', 5);
        if (dot == std::string::npos) throw ScenarioError(line, "expected node.<id>.<key>");
        const int id = static_cast<int>(to_int(key.substr(5, dot - 5), line));
        const std::string sub = key.substr(dot + 1);
        if (sub == "category") node_categories[id].push_back({value, line});
        else if (is_node_key(sub)) mac_nodes[id][sub] = {value, line};
        else throw ScenarioError(line, "unknown mac key '" + sub + "'");
      } else if (is_node_key(key)) {
        mac_defaults[key] = {value, line};
      } else if (key == "category") {
        categories.push_back({value, line});
      } else if (key == "mild_factor") {
        sc.mild_factor = to_double(value, line);
        if (sc.mild_factor < 1.0) throw ScenarioError(line, "mild_factor must be >= 1");
      } else if (key == "est_window") {
        sc.est_window = to_micros(value, line);
      } else if (key == "dfs_scaling") {
        sc.dfs.scaling = to_double(value, line);
        if (!(sc.dfs.scaling > 0.0)) throw ScenarioError(line, "dfs_scaling must be positive");
      } else if (key == "dfs_compress") {
        sc.dfs.compress_threshold = to_int(value, line);
      } else if (key == "dfs_randomize") {
        sc.dfs.randomize = to_bool(value, line);
      } else if (key == "arf_success") {
        sc.arf.success_threshold = static_cast<int>(to_int(value, line));
      } else if (key == "arf_timer") {
        sc.arf.recovery_timer = to_micros(value, line);
      } else if (key == "ica_cts_timeout") {
        sc.ica_cts_timeout = to_micros(value, line);
      } else if (key.rfind("pcf.", 0) == 0) {
        pcf_set = true;
        const std::string sub = key.substr(4);
        if (sub == "coordinator") pcf.coordinator = static_cast<int>(to_int(value, line));
        else if (sub == "period") pcf.period = to_micros(value, line);
        else if (sub == "cfp_max") pcf.cfp_max = to_micros(value, line);
        else if (sub == "cp_min") pcf.cp_min = to_micros(value, line);
        else if (sub == "pollable") {
          pcf.pollable.clear();
          std::stringstream ss(value);
          for (std::string x; std::getline(ss, x, ',');) pcf.pollable.push_back(static_cast<int>(to_int(trim(x), line)));
        } else {
          throw ScenarioError(line, "unknown pcf key '" + sub + "'");
        }
      } else {
        throw ScenarioError(line, "unknown [mac] key '" + key + "'");
      }
    } else if (section == "links") {
      if (key == "initial") sc.initial_quality = to_quality(value, line);
      else if (key == "dwell") sc.dwell = to_micros(value, line);
      else if (key.rfind("row.", 0) == 0) {
        const Quality q = to_quality(key.substr(4), line);
        const auto w = words(value);
        if (w.size() != 4) throw ScenarioError(line, "transition row needs 4 probabilities");
        for (std::size_t j = 0; j < 4; ++j) sc.transitions[static_cast<std::size_t>(q)][j] = to_double(w[j], line);
      } else if (key.rfind("fer.", 0) == 0) {
        sc.base_fer[static_cast<std::size_t>(to_quality(key.substr(4), line))] = to_double(value, line);
      } else if (key == "fer_base_size") {
        sc.fer_base_size = to_double(value, line);
      } else if (key == "overrate_fer") {
        sc.overrate_fer = to_double(value, line);
      } else if (key == "control_fer") {
        sc.control_fer = to_bool(value, line);
      } else if (key == "link") {
        const auto w = words(value);
        if (w.size() != 3) throw ScenarioError(line, "link = <src> <dst> <quality>");
        sc.link_overrides.push_back({static_cast<int>(to_int(w[0], line)), static_cast<int>(to_int(w[1], line)),
                                     to_quality(w[2], line)});
      } else {
        throw ScenarioError(line, "unknown [links] key '" + key + "'");
      }
    } else if (section == "flows") {
      if (key != "flow") throw ScenarioError(line, "unknown [flows] key '" + key + "'");
      sc.flows.push_back(parse_flow(value, line));
      flow_lines.push_back(line);
    }
  }

  // Nodes must be numbered 0..n-1.
  int expect = 0;
  for (const auto& [id, entry] : nodes) {
    if (id != expect) throw ScenarioError(entry.second, "node ids must be 0..n-1; missing " + std::to_string(expect));
    sc.nodes.push_back(NodeConfig{entry.first, {}, {}, std::nullopt, {}});
    ++expect;
  }
  if (sc.nodes.empty()) throw ScenarioError(0, "scenario has no nodes");

  for (auto& n : sc.nodes) {
    for (const auto& [k, s] : mac_defaults) apply_node_key(n, k, s);
  }
  for (const auto& [id, keys] : mac_nodes) {
    if (id < 0 || id >= static_cast<int>(sc.nodes.size())) {
      throw ScenarioError(keys.begin()->second.line, "mac override for unknown node " + std::to_string(id));
    }
    for (const auto& [k, s] : keys) apply_node_key(sc.nodes[static_cast<std::size_t>(id)], k, s);
  }
  for (auto& n : sc.nodes) {
    const auto it = node_categories.find(n.pos.id);
    const auto& src = it != node_categories.end() ? it->second : categories;
    for (const auto& c : src) n.categories.push_back(parse_category(c));
    std::sort(n.categories.begin(), n.categories.end(),
              [](const EdcfCategory& a, const EdcfCategory& b) { return a.id < b.id; });
    for (std::size_t i = 0; i < n.categories.size(); ++i) {
      if (n.categories[i].id != static_cast<int>(i)) {
        throw ScenarioError(0, "node " + std::to_string(n.pos.id) + ": category ids must be 0..k-1");
      }
    }
  }
  for (const auto& [id, list] : node_categories) {
    if (id < 0 || id >= static_cast<int>(sc.nodes.size())) {
      throw ScenarioError(list.front().line, "category for unknown node " + std::to_string(id));
    }
  }

  for (std::size_t i = 0; i < sc.flows.size(); ++i) {
    const auto& f = sc.flows[i];
    const int n = static_cast<int>(sc.nodes.size());
    for (int end : {f.src, f.dst}) {
      if (end < 0 || end >= n) throw ScenarioError(flow_lines[i], "flow references unknown node " + std::to_string(end));
    }
  }
  if (pcf_set) sc.pcf = pcf;

  try {
    sc.validate();
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(0, e.what());
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace wmac
