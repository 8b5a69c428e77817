#pragma once

// The event-driven network: stations running the configured MAC variant
// over a shared medium, traffic sources, and measurement.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "wmac/config.hpp"
#include "wmac/dcf.hpp"
#include "wmac/fair_sched.hpp"
#include "wmac/frame.hpp"
#include "wmac/mac_ext.hpp"
#include "wmac/medium.hpp"
#include "wmac/metrics.hpp"
#include "wmac/pcf.hpp"
#include "wmac/phy.hpp"
#include "wmac/rate_adapt.hpp"
#include "wmac/sim.hpp"

namespace wmac {

class Simulation {
 public:
  explicit Simulation(Scenario sc, TraceSink* trace = nullptr)
      : sc_(std::move(sc)), topo_(sc_.topology()), t_(sc_.timing) {
    sc_.validate();
    engine_.set_trace(trace);
    const int n = static_cast<int>(sc_.nodes.size());
    links_ = LinkQuality(n, sc_.initial_quality, sc_.transitions, sc_.dwell);
    for (const auto& o : sc_.link_overrides) links_.set(o.src, o.dst, o.quality);
    link_rng_ = RandomStream(sc_.seed, static_cast<std::int64_t>(n) + 1000);
    shares_ = sc_.flow_shares();
    flow_in_queue_.assign(sc_.flows.size(), 0);
    replies_.resize(sc_.flows.size());
    delays_.resize(sc_.flows.size());
    for (std::size_t f = 0; f < sc_.flows.size(); ++f) {
      if (sc_.flows[f].type == FlowType::Reply) replies_[static_cast<std::size_t>(sc_.flows[f].reply_of)].push_back(f);
    }
    stations_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) stations_.push_back(make_station(i));
    const auto windows = static_cast<std::size_t>((sc_.duration + sc_.metric_window - 1) / sc_.metric_window);
    window_bits_.assign(windows, std::vector<double>(sc_.flows.size(), 0.0));
    if (sc_.pcf) cursor_ = PollCursor(sc_.pcf->pollable.size());
  }

  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  struct DataStart {
    Micros time = 0;
    int node = 0;
    int flow = 0;
    std::int64_t packet = 0;
  };

  const Engine& engine() const { return engine_; }
  // Every DATA frame put on the air, in start order.
  const std::vector<DataStart>& data_starts() const { return data_starts_; }
  const LinkQuality& links() const { return links_; }

  RunMetrics run() {
    for (std::size_t f = 0; f < sc_.flows.size(); ++f) {
      const auto& fl = sc_.flows[f];
      if (fl.type == FlowType::Reply || fl.start >= sc_.duration) continue;
      engine_.schedule(fl.start, "flow_start", fl.src, [this, f] { start_flow(f); });
    }
    if (sc_.dwell > 0) engine_.schedule(sc_.dwell, "quality", kMediumTarget, [this] { step_quality(); });
    if (sc_.pcf) engine_.schedule(0, "superframe", sc_.pcf->coordinator, [this] { superframe(); });
    const auto events = engine_.run_until(sc_.duration);
    return finish(events);
  }

 private:
  // -------------------------------------------------------------------------
  // State
  // -------------------------------------------------------------------------
  struct Packet {
    int flow = 0;
    int src = 0;
    int dst = 0;
    std::int64_t bytes = 0;
    std::int64_t remaining = 0;
    Micros created = 0;
    int category = 0;
    bool reverse = false;
    int retries = 0;
    int next_fragment = 0;
    bool received = false;
    bool dropped = false;
    bool done = false;  // left the sender's queue
  };

  struct Category {
    Micros aifs = 50;
    double pf = 2.0;
    int cw_min = 16;
    int cw_max = 256;
    int cw = 16;
    int backoff = 0;
    bool dfs_pending = false;  // first-attempt interval not drawn yet
    std::deque<std::int64_t> queue;
  };

  enum class Stage { Reserve, AwaitCts, Data, AwaitAck };

  struct Exchange {
    Stage stage = Stage::Reserve;
    int cat = 0;
    int dst = 0;
    std::vector<std::int64_t> pkts;  // more than one only for an OAR burst
    std::size_t idx = 0;
    std::int64_t frag_bytes = 0;
    Rate rate = Rate::R11;
    std::optional<Rate> tentative;
    bool reverse = false;   // DCF+ reverse DATA
    bool parallel = false;  // exposed-node transmission
    bool polled = false;    // answer to a CF-Poll
    std::vector<std::int64_t> plan;
    std::size_t plan_idx = 0;
    Micros budget_end = 0;
  };

  struct Station {
    int id = 0;
    const NodeConfig* cfg = nullptr;
    RandomStream rng;
    std::vector<Category> cats;

    bool transmitting = false;
    int sensed = 0;
    int pending_tx = 0;
    Micros nav_until = 0;
    std::int64_t nav_owner = -1;
    EventHandle nav_timer;

    bool was_busy = false;
    Micros idle_since = 0;          // start of the current contention-idle period
    Micros channel_idle_since = 0;  // carrier and NAV only
    bool channel_was_busy = false;
    EventHandle access;
    Micros access_at = kNever;

    std::optional<Exchange> ex;
    EventHandle timeout;

    std::map<int, ArfState> arf;
    std::map<int, Rate> rbar_last;
    TrafficEstimate est;
    double est_phi = 0.5;
    std::deque<std::int64_t> snooped;

    IcaState ica;
    EventHandle ica_timer;

    // point coordination
    std::int64_t await_cf_ack = -1;  // packet sent to the coordinator in the CFP
  };

  static constexpr std::int64_t kCfpOwner = -2;

  Station make_station(int id) {
    Station s;
    s.id = id;
    s.cfg = &sc_.nodes[static_cast<std::size_t>(id)];
    s.rng = RandomStream(sc_.seed, id);
    s.est = TrafficEstimate(sc_.est_window);
    const auto& mac = s.cfg->mac;
    if (s.cfg->variant.edcf) {
      for (const auto& c : s.cfg->categories) {
        Category k;
        k.aifs = c.aifs;
        k.pf = c.pf;
        k.cw_min = c.cw_min;
        k.cw_max = c.cw_max;
        k.cw = c.cw_min;
        s.cats.push_back(k);
      }
    } else {
      Category k;
      k.aifs = t_.difs;
      k.pf = 2.0;
      k.cw_min = mac.cw_min;
      k.cw_max = mac.cw_max;
      k.cw = mac.cw_min;
      s.cats.push_back(k);
    }
    if (s.cfg->variant.backoff == BackoffScheme::Dfs) {
      for (auto& c : s.cats) c.dfs_pending = true;
    }
    int own = 0;
    for (const auto& f : sc_.flows) own += f.src == id ? 1 : 0;
    s.est_phi = s.cfg->est_phi.value_or(stream_share(std::max(own, 1)));
    return s;
  }

  Station& st(int id) { return stations_[static_cast<std::size_t>(id)]; }
  Packet& pkt(std::int64_t id) { return packets_[static_cast<std::size_t>(id)]; }
  const Variant& var(const Station& s) const { return s.cfg->variant; }
  Micros now() const { return engine_.now(); }

  // -------------------------------------------------------------------------
  // Traffic
  // -------------------------------------------------------------------------
  void start_flow(std::size_t f) {
    const auto& fl = sc_.flows[f];
    switch (fl.type) {
      case FlowType::Backlogged: top_up(f); break;
      case FlowType::Batch:
        for (auto b : fl.batch) generate(f, b);
        break;
      case FlowType::Cbr: cbr_tick(f, 0); break;
      case FlowType::Reply: break;
    }
    refresh_all();
  }

  void cbr_tick(std::size_t f, std::int64_t k) {
    const auto& fl = sc_.flows[f];
    if (now() >= fl.stop) return;
    generate(f, fl.bytes);
    const double interval = static_cast<double>(fl.bytes) * 8.0 / fl.rate_bps * 1e6;
    const Micros next = fl.start + static_cast<Micros>(std::llround(interval * static_cast<double>(k + 1)));
    if (next < sc_.duration && next < fl.stop) {
      engine_.schedule(next, "arrival", fl.src, [this, f, k] {
        cbr_tick(f, k + 1);
        refresh_all();
      });
    }
  }

  void top_up(std::size_t f) {
    const auto& fl = sc_.flows[f];
    if (fl.type != FlowType::Backlogged || now() < fl.start || now() >= fl.stop) return;
    while (flow_in_queue_[f] < sc_.backlog_depth) {
      if (!generate(f, fl.bytes)) break;
    }
  }

  bool generate(std::size_t f, std::int64_t bytes) {
    const auto& fl = sc_.flows[f];
    Packet p;
    p.flow = static_cast<int>(f);
    p.src = fl.src;
    p.dst = fl.dst;
    p.bytes = bytes;
    p.remaining = bytes;
    p.created = now();
    p.category = fl.category;
    p.reverse = fl.reverse || fl.type == FlowType::Reply;
    const auto id = static_cast<std::int64_t>(packets_.size());
    auto& cat = st(fl.src).cats[static_cast<std::size_t>(fl.category)];
    if (cat.queue.size() >= sc_.queue_limit) {
      p.dropped = true;
      p.done = true;
      packets_.push_back(p);
      return false;
    }
    packets_.push_back(p);
    cat.queue.push_back(id);
    ++flow_in_queue_[f];
    return true;
  }

  void leave_queue(Station& s, std::int64_t id) {
    auto& p = pkt(id);
    auto& q = s.cats[static_cast<std::size_t>(p.category)].queue;
    q.erase(std::find(q.begin(), q.end(), id));
    p.done = true;
    --flow_in_queue_[static_cast<std::size_t>(p.flow)];
    top_up(static_cast<std::size_t>(p.flow));
  }

  void deliver(const Frame& f) {
    auto& p = pkt(f.packet);
    if (p.received) return;
    p.received = true;
    const auto flow = static_cast<std::size_t>(p.flow);
    delays_[flow].push_back(static_cast<double>(now() - p.created));
    const auto w = static_cast<std::size_t>(now() / sc_.metric_window);
    if (w < window_bits_.size()) window_bits_[w][flow] += static_cast<double>(p.bytes) * 8.0;
    for (auto r : replies_[flow]) {
      const auto& rf = sc_.flows[r];
      if (now() >= rf.start && now() < rf.stop) generate(r, rf.bytes);
    }
  }

  void step_quality() {
    links_.step(link_rng_);
    const Micros next = now() + sc_.dwell;
    if (next <= sc_.duration) engine_.schedule(next, "quality", kMediumTarget, [this] { step_quality(); });
  }

  // -------------------------------------------------------------------------
  // Carrier sense, NAV and backoff
  // -------------------------------------------------------------------------
  bool channel_busy(const Station& s) const {
    return s.transmitting || s.sensed > 0 || s.pending_tx > 0 || s.nav_until > now();
  }

  bool busy(const Station& s) const {
    if (channel_busy(s) || s.ex) return true;
    return sc_.pcf && sc_.pcf->coordinator == s.id && (in_cfp_ || want_beacon_);
  }

  Micros fire_time(const Station& s, const Category& c) const {
    return std::max(now(), s.idle_since + c.aifs + static_cast<Micros>(c.backoff) * t_.slot);
  }

  void consume_slots(Station& s) {
    for (auto& c : s.cats) {
      const Micros elapsed = now() - s.idle_since - c.aifs;
      if (elapsed <= 0 || c.backoff == 0) continue;
      c.backoff -= static_cast<int>(std::min<Micros>(c.backoff, elapsed / t_.slot));
    }
  }

  void refresh(Station& s) {
    const bool ch = channel_busy(s);
    if (!ch && s.channel_was_busy) s.channel_idle_since = now();
    s.channel_was_busy = ch;

    const bool b = busy(s);
    if (b && !s.was_busy) {
      // A countdown reaching zero in this very instant still transmits.
      if (s.access_at != now()) {
        consume_slots(s);
        engine_.cancel(s.access);
        s.access_at = kNever;
      }
    } else if (!b && s.was_busy) {
      s.idle_since = now();
    }
    s.was_busy = b;
    if (!b) schedule_access(s);
    if (sc_.pcf && s.id == sc_.pcf->coordinator && want_beacon_) try_beacon();
  }

  void refresh_all() {
    for (auto& s : stations_) refresh(s);
  }

  void schedule_access(Station& s) {
    Micros when = kNever;
    for (auto& c : s.cats) {
      if (c.queue.empty()) continue;
      if (c.dfs_pending) draw_dfs(s, c);
      when = std::min(when, fire_time(s, c));
    }
    if (when == kNever) {
      engine_.cancel(s.access);
      s.access_at = kNever;
      return;
    }
    if (s.access.valid() && s.access_at == when) return;
    engine_.cancel(s.access);
    s.access_at = when;
    s.access = engine_.schedule(when, "access", s.id, [this, id = s.id] { on_access(st(id)); });
  }

  void draw_dfs(Station& s, Category& c) {
    const auto& p = pkt(c.queue.front());
    const double phi = shares_[static_cast<std::size_t>(p.flow)];
    c.backoff = static_cast<int>(dfs_backoff(static_cast<double>(p.remaining) * 8.0, phi, sc_.dfs, s.rng));
    c.dfs_pending = false;
  }

  void set_nav(Station& s, Micros until, std::int64_t owner, bool replace = false) {
    if (!replace && until <= s.nav_until) return;
    s.nav_until = until;
    s.nav_owner = owner;
    engine_.cancel(s.nav_timer);
    if (until > now()) {
      s.nav_timer = engine_.schedule(until, "nav_expiry", s.id, [this, id = s.id] {
        st(id).nav_timer = {};
        refresh(st(id));
      });
    }
  }

  void on_access(Station& s) {
    s.access = {};
    s.access_at = kNever;
    if (s.ex || s.transmitting || s.pending_tx > 0) {
      refresh_all();
      return;
    }
    std::vector<CategoryCountdown> ready;
    std::vector<int> index;
    for (std::size_t i = 0; i < s.cats.size(); ++i) {
      const auto& c = s.cats[i];
      if (!c.queue.empty() && fire_time(s, c) <= now()) {
        ready.push_back({c.aifs, 0, true});
        index.push_back(static_cast<int>(i));
      }
    }
    if (ready.empty()) {
      refresh_all();
      return;
    }
    consume_slots(s);
    // Several categories ready together: a virtual collision.  Every one but
    // the winner backs off as if it had collided on the air.
    const auto res = edcf_contend(ready, t_.slot);
    for (std::size_t l = 0; l < ready.size(); ++l) {
      if (static_cast<int>(l) == res.winner) continue;
      auto& c = s.cats[static_cast<std::size_t>(index[l])];
      c.cw = edcf_expand(c.cw, c.pf, c.cw_max);
      c.backoff = draw_backoff(c.cw, s.rng);
    }
    start_exchange(s, index[static_cast<std::size_t>(res.winner)]);
    s.was_busy = true;
    refresh_all();
  }

  // -------------------------------------------------------------------------
  // Sender side
  // -------------------------------------------------------------------------
  Rate data_rate_for(Station& s, int dst) {
    switch (var(s).rate) {
      case RateScheme::Arf: return arf_rate(s.arf[dst], now(), sc_.arf);
      case RateScheme::Rbar:
      case RateScheme::Oar: {
        auto it = s.rbar_last.find(dst);
        return it == s.rbar_last.end() ? s.cfg->mac.data_rate : it->second;
      }
      case RateScheme::Fixed: break;
    }
    return s.cfg->mac.data_rate;
  }

  bool receiver_picks_rate(const Station& s) const {
    return var(s).rate == RateScheme::Rbar || var(s).rate == RateScheme::Oar;
  }

  void start_exchange(Station& s, int cat) {
    const std::int64_t head = s.cats[static_cast<std::size_t>(cat)].queue.front();
    const auto& p = pkt(head);
    Exchange ex;
    ex.cat = cat;
    ex.dst = p.dst;
    ex.pkts = {head};
    ex.frag_bytes = std::min(p.remaining, s.cfg->mac.frag_threshold);
    ex.rate = data_rate_for(s, p.dst);
    const bool oar = var(s).rate == RateScheme::Oar;
    const bool rts = oar || should_use_rts(ex.frag_bytes, s.cfg->mac.rts_threshold);
    if (rts) {
      Frame f = make_control(FrameKind::Rts, s.id, p.dst, 0);
      if (receiver_picks_rate(s)) {
        ex.tentative = ex.rate;
        f.tentative_rate = ex.rate;
        f.size = ex.frag_bytes;
        f.duration = rbar_rts_duration(t_, ex.rate, ex.frag_bytes);
      } else {
        f.duration = rts_duration(t_, airtime(ex.frag_bytes, ex.rate));
      }
      f.packet = head;
      f.retry = p.retries > 0;
      ex.stage = Stage::Reserve;
      s.ex = ex;
      ++metrics_.rts_frames;
      transmit(s, f, now());
    } else {
      ex.stage = Stage::Data;
      s.ex = ex;
      send_data(s, now());
    }
  }

  Frame data_frame(Station& s, const Exchange& ex) {
    const std::int64_t id = ex.pkts[ex.idx];
    auto& p = pkt(id);
    Frame f;
    f.kind = FrameKind::Data;
    f.src = s.id;
    f.dst = ex.dst;
    f.rate = ex.rate;
    f.packet = id;
    f.retry = p.retries > 0;
    f.reverse = ex.reverse;
    f.parallel = ex.parallel;
    f.dcf_plus = var(s).dcf_plus;
    if (ex.pkts.size() > 1) {
      // OAR burst: one packet per frame, each covering the next.
      const bool more = ex.idx + 1 < ex.pkts.size();
      f.payload_bytes = p.remaining;
      f.more_fragments = more;
      f.fragment_number = 0;
      f.ends_packet = true;
      f.duration = more ? data_duration(t_, airtime(pkt(ex.pkts[ex.idx + 1]).remaining, ex.rate)) : data_duration(t_);
    } else {
      f.payload_bytes = ex.frag_bytes;
      f.fragment_number = p.next_fragment;
      f.ends_packet = ex.frag_bytes == p.remaining;
      if (ex.parallel) {
        f.more_fragments = !f.ends_packet;
        f.duration = data_duration(t_);
      } else {
        const std::int64_t after = p.remaining - ex.frag_bytes;
        f.more_fragments = after > 0;
        f.duration = after > 0
                         ? data_duration(t_, airtime(std::min(after, s.cfg->mac.frag_threshold), ex.rate))
                         : data_duration(t_);
      }
    }
    if (ex.tentative && ex.idx == 0 && p.next_fragment == 0 && *ex.tentative != ex.rate) f.rsh = true;
    return f;
  }

  void send_data(Station& s, Micros at) {
    auto& ex = *s.ex;
    ex.stage = Stage::Data;
    Frame f = data_frame(s, ex);
    ++metrics_.data_frames;
    if (f.reverse) ++metrics_.reverse_exchanges;
    if (f.parallel) ++metrics_.parallel_frames;
    transmit(s, f, at);
  }

  // The frame just finished leaving the antenna.
  void on_sent(Station& s, const Frame& f) {
    if (sc_.pcf && s.id == sc_.pcf->coordinator) {
      switch (f.kind) {
        case FrameKind::Beacon: after_beacon(); return;
        case FrameKind::CfPoll: after_poll(); return;
        case FrameKind::CfEnd: after_cf_end(); return;
        default: break;
      }
    }
    if (!s.ex) return;
    auto& ex = *s.ex;
    if (ex.stage == Stage::Reserve && (f.kind == FrameKind::Rts || (f.kind == FrameKind::Ack && ex.reverse))) {
      ex.stage = Stage::AwaitCts;
      s.timeout = engine_.schedule(now() + t_.cts_timeout(), "cts_timeout", s.id, [this, id = s.id] {
        on_cts_timeout(st(id));
      });
    } else if (ex.stage == Stage::Data && carries_data(f.kind)) {
      if (ex.parallel && now() > ex.budget_end) ++metrics_.parallel_overruns;
      ex.stage = Stage::AwaitAck;
      if (f.kind == FrameKind::DataCfAck && sc_.pcf && f.dst == sc_.pcf->coordinator) {
        // Acknowledged by the coordinator's next frame, if at all.
        s.await_cf_ack = f.packet;
        s.timeout = engine_.schedule(now() + t_.sifs + airtime(kCfPollBytes, Rate::R1) + t_.slot, "cf_ack_timeout",
                                     s.id, [this, id = s.id] { on_ack_timeout(st(id)); });
        return;
      }
      s.timeout = engine_.schedule(now() + t_.ack_timeout(), "ack_timeout", s.id, [this, id = s.id] {
        on_ack_timeout(st(id));
      });
    }
  }

  void on_cts_timeout(Station& s) {
    s.timeout = {};
    if (!s.ex) return;
    if (s.ex->reverse) {
      s.ex.reset();
    } else {
      fail(s, false);
    }
    refresh_all();
  }

  void on_ack_timeout(Station& s) {
    s.timeout = {};
    if (!s.ex) return;
    if (s.ex->parallel || s.ex->reverse || s.ex->polled) {
      // The packet simply stays queued; no backoff penalty.
      if (s.ex->polled) ++pkt(s.ex->pkts[0]).retries;
      s.await_cf_ack = -1;
      s.ex.reset();
      s.ica = IcaState{};
    } else {
      fail(s, true);
    }
    refresh_all();
  }

  void fail(Station& s, bool ack_timeout) {
    Exchange ex = *s.ex;
    s.ex.reset();
    auto& c = s.cats[static_cast<std::size_t>(ex.cat)];
    const std::int64_t id = ex.pkts[ex.idx];
    auto& p = pkt(id);
    if (var(s).rate == RateScheme::Arf && ack_timeout) {
      s.arf[ex.dst] = arf_on_result(s.arf[ex.dst], AckResult::NoAck, now(), sc_.arf).first;
    }
    ++p.retries;
    switch (var(s).backoff) {
      case BackoffScheme::Mild: c.cw = mild_update(c.cw, ContentionOutcome::Collision, sc_.mild_factor, c.cw_min, c.cw_max); break;
      case BackoffScheme::Dfs: c.cw = p.retries == 1 ? c.cw_min : std::min(2 * c.cw, c.cw_max); break;
      case BackoffScheme::Estimation: c.cw = cw_after(c.cw, TxOutcome::Failure, c.cw_min, c.cw_max); break;
      case BackoffScheme::Beb: c.cw = edcf_expand(c.cw, c.pf, c.cw_max); break;
    }
    if (p.retries > s.cfg->mac.retry_limit) {
      p.dropped = true;
      leave_queue(s, id);
      if (var(s).backoff != BackoffScheme::Mild) c.cw = c.cw_min;
      if (var(s).backoff == BackoffScheme::Dfs) {
        c.dfs_pending = true;
        return;
      }
    }
    c.backoff = draw_backoff(c.cw, s.rng);
  }

  void succeed_packet(Station& s, Category& c, std::int64_t id) {
    auto& p = pkt(id);
    p.remaining = 0;
    p.retries = 0;
    leave_queue(s, id);
    switch (var(s).backoff) {
      case BackoffScheme::Mild: c.cw = mild_update(c.cw, ContentionOutcome::Success, sc_.mild_factor, c.cw_min, c.cw_max); break;
      case BackoffScheme::Estimation:
        c.cw = estimation_backoff_update(c.cw, s.est.self_bits(now()), s.est.others_bits(now()), s.est_phi, c.cw_min,
                                         c.cw_max);
        break;
      case BackoffScheme::Dfs:
      case BackoffScheme::Beb: c.cw = c.cw_min; break;
    }
  }

  void new_backoff(Station& s, Category& c) {
    if (var(s).backoff == BackoffScheme::Dfs) {
      c.dfs_pending = true;
    } else {
      c.backoff = draw_backoff(c.cw, s.rng);
    }
  }

  void on_ack(Station& s, const Frame& ack) {
    engine_.cancel(s.timeout);
    auto& ex = *s.ex;
    auto& c = s.cats[static_cast<std::size_t>(ex.cat)];
    const std::int64_t id = ex.pkts[ex.idx];
    auto& p = pkt(id);
    const std::int64_t sent = ex.pkts.size() > 1 ? p.remaining : ex.frag_bytes;
    s.est.add_self(now(), static_cast<double>(sent) * 8.0);

    if (ex.reverse || ex.polled) {
      p.remaining = 0;
      p.retries = 0;
      leave_queue(s, id);
      s.ex.reset();
      return;
    }
    if (ex.parallel) {
      p.remaining -= sent;
      ++p.next_fragment;
      if (p.remaining == 0) {
        leave_queue(s, id);
        s.ex.reset();
        s.ica = IcaState{};
        return;
      }
      if (++ex.plan_idx < ex.plan.size()) {
        ex.frag_bytes = ex.plan[ex.plan_idx];
        send_data(s, now() + t_.sifs);
      } else {
        s.ex.reset();
        s.ica = IcaState{};
      }
      return;
    }

    if (var(s).rate == RateScheme::Arf) {
      s.arf[ex.dst] = arf_on_result(s.arf[ex.dst], AckResult::Ack, now(), sc_.arf).first;
    }
    const bool dcf_plus_cts = var(s).dcf_plus && ack.dcf_plus && ack.duration > 0;

    if (ex.pkts.size() > 1) {
      succeed_packet(s, c, id);
      if (++ex.idx < ex.pkts.size()) {
        send_data(s, now() + t_.sifs);
        return;
      }
    } else {
      p.remaining -= sent;
      if (p.remaining > 0) {
        ++p.next_fragment;
        p.retries = 0;
        ex.frag_bytes = std::min(p.remaining, s.cfg->mac.frag_threshold);
        send_data(s, now() + t_.sifs);
        return;
      }
      succeed_packet(s, c, id);
    }
    s.ex.reset();
    new_backoff(s, c);
    if (dcf_plus_cts) {
      Frame cts = make_control(FrameKind::Cts, s.id, ack.src, ack.duration - t_.sifs - t_.cts_air());
      cts.packet = ack.packet;
      transmit(s, cts, now() + t_.sifs);
    }
  }

  // -------------------------------------------------------------------------
  // Receiver side
  // -------------------------------------------------------------------------
  bool nav_clear_for(const Station& s, std::int64_t packet) const {
    return s.nav_until <= now() || s.nav_owner == packet;
  }

  std::optional<std::int64_t> reverse_candidate(Station& s, int peer) {
    for (auto& c : s.cats) {
      for (auto id : c.queue) {
        const auto& p = pkt(id);
        if (p.reverse && p.dst == peer && p.remaining == p.bytes && p.bytes <= s.cfg->mac.frag_threshold) return id;
      }
    }
    return std::nullopt;
  }

  void on_receive(Station& s, const Frame& f) {
    if (f.advertised_cw > 0 && var(s).backoff == BackoffScheme::Mild) {
      for (auto& c : s.cats) c.cw = std::clamp(share_cw_on_hear(c.cw, f.advertised_cw), c.cw_min, c.cw_max);
    }
    if (f.dst != s.id) {
      overhear(s, f);
      return;
    }
    switch (f.kind) {
      case FrameKind::Rts: {
        if (s.ex || s.pending_tx > 0 || !nav_clear_for(s, f.packet)) return;
        Frame cts = make_control(FrameKind::Cts, s.id, f.src, cts_duration_from_rts(t_, f.duration));
        cts.packet = f.packet;
        if (f.tentative_rate) {
          const Rate sel = rbar_select_rate(links_.get(f.src, s.id));
          cts.selected_rate = sel;
          cts.size = f.size;
          cts.tentative_rate = f.tentative_rate;
          cts.duration = rbar_cts_duration(t_, sel, f.size, rbar_needs_rsh(*f.tentative_rate, sel));
        }
        transmit(s, cts, now() + t_.sifs);
        return;
      }
      case FrameKind::Cts: {
        if (!s.ex || s.ex->stage != Stage::AwaitCts || f.src != s.ex->dst) return;
        engine_.cancel(s.timeout);
        auto& ex = *s.ex;
        if (f.selected_rate) {
          ex.rate = *f.selected_rate;
          s.rbar_last[ex.dst] = ex.rate;
          if (var(s).rate == RateScheme::Oar) build_burst(s, ex);
        }
        send_data(s, now() + t_.sifs);
        return;
      }
      case FrameKind::Data: {
        if (f.ends_packet) deliver(f);
        Frame ack = make_control(FrameKind::Ack, s.id, f.src, ack_duration_from_data(t_, f.duration));
        ack.packet = f.packet;
        ack.size = f.payload_bytes;
        ack.parallel = f.parallel;
        if (var(s).dcf_plus && f.dcf_plus && !f.more_fragments && f.fragment_number == 0 && !f.reverse &&
            !f.parallel && !s.ex && s.pending_tx == 0) {
          if (auto rev = reverse_candidate(s, f.src)) {
            Exchange ex;
            ex.stage = Stage::Reserve;
            ex.cat = pkt(*rev).category;
            ex.dst = f.src;
            ex.pkts = {*rev};
            ex.frag_bytes = pkt(*rev).bytes;
            ex.rate = s.cfg->mac.data_rate;
            ex.reverse = true;
            s.ex = ex;
            ack.duration = dcfplus_ack_duration(t_, ex.frag_bytes, ex.rate);
            ack.dcf_plus = true;
          }
        }
        transmit(s, ack, now() + t_.sifs);
        return;
      }
      case FrameKind::Ack: {
        if (s.ex && s.ex->stage == Stage::AwaitAck && f.src == s.ex->dst) on_ack(s, f);
        return;
      }
      case FrameKind::DataCfAck: {
        if (f.ends_packet) deliver(f);
        if (sc_.pcf && s.id == sc_.pcf->coordinator) {
          owe_cf_ack_ = true;
        } else {
          Frame ack = make_control(FrameKind::Ack, s.id, f.src, 0);
          ack.packet = f.packet;
          ack.size = f.payload_bytes;
          transmit(s, ack, now() + t_.sifs);
        }
        return;
      }
      case FrameKind::CfPoll: {
        check_cf_ack(s, f);
        answer_poll(s);
        return;
      }
      default: return;
    }
  }

  void overhear(Station& s, const Frame& f) {
    if (sc_.pcf && f.src == sc_.pcf->coordinator &&
        (f.kind == FrameKind::CfPoll || f.kind == FrameKind::CfEnd || f.kind == FrameKind::Beacon)) {
      check_cf_ack(s, f);
    }
    if (f.kind == FrameKind::Beacon) {
      set_nav(s, now() + f.duration, kCfpOwner);
      return;
    }
    if (f.kind == FrameKind::CfEnd) {
      if (s.nav_until > now()) set_nav(s, now(), -1, true);
      return;
    }
    if (f.src == s.id) return;

    if (var(s).backoff == BackoffScheme::Estimation) snoop(s, f);
    if (var(s).ica && (f.kind == FrameKind::Rts || f.kind == FrameKind::Cts)) {
      s.ica = ica_on_overhear(s.ica, f, now(), t_, sc_.ica_cts_timeout);
      engine_.cancel(s.ica_timer);
      if (f.kind == FrameKind::Rts && !s.ex) {
        s.ica_timer = engine_.schedule(s.ica.cts_timeout_at, "ica_timeout", s.id, [this, id = s.id] {
          on_ica_timeout(st(id));
        });
      }
    }

    Micros dur = f.duration;
    if (f.kind == FrameKind::Rts && f.tentative_rate) dur = rbar_rts_duration(t_, *f.tentative_rate, f.size);
    if (f.kind == FrameKind::Cts && f.selected_rate) {
      dur = rbar_cts_duration(t_, *f.selected_rate, f.size,
                              f.tentative_rate && rbar_needs_rsh(*f.tentative_rate, *f.selected_rate));
    }
    if (f.rsh && s.nav_owner == f.packet) {
      rsh_update(s, f);
    } else if (dur > 0 && (is_control(f.kind) || f.kind == FrameKind::Data)) {
      set_nav(s, now() + dur, f.packet);
    }
  }

  void rsh_update(Station& s, const Frame& f) {
    if (s.nav_owner == f.packet) set_nav(s, now() + f.duration, f.packet, true);
  }

  void snoop(Station& s, const Frame& f) {
    if (f.dst == s.id || f.dst == kBroadcast) return;
    double bits = 0.0;
    if (f.kind == FrameKind::Cts) {
      if (f.size > 0) {
        bits = static_cast<double>(f.size) * 8.0;
      } else {
        const Micros data_air = f.duration - 2 * t_.sifs - t_.ack_air();
        bits = static_cast<double>(std::max<Micros>(0, data_air - kPlcpMicros)) * mbps(s.cfg->mac.data_rate);
      }
    } else if (f.kind == FrameKind::Ack && !f.parallel) {
      if (std::find(s.snooped.begin(), s.snooped.end(), f.packet) != s.snooped.end()) return;
      bits = static_cast<double>(f.size) * 8.0;
    } else {
      return;
    }
    s.snooped.push_back(f.packet);
    if (s.snooped.size() > 32) s.snooped.pop_front();
    s.est.add_others(now(), bits);
  }

  void on_ica_timeout(Station& s) {
    s.ica_timer = {};
    s.ica = ica_on_cts_timeout(s.ica, now());
    if (!s.ica.exposed || s.ex || s.pending_tx > 0 || s.transmitting) return;
    const auto rts = *s.ica.overheard_rts;
    for (std::size_t ci = 0; ci < s.cats.size(); ++ci) {
      auto& c = s.cats[ci];
      if (c.queue.empty()) continue;
      const std::int64_t head = c.queue.front();
      const auto& p = pkt(head);
      if (p.dst == rts.sender || p.dst == rts.receiver) return;
      const Rate rate = data_rate_for(s, p.dst);
      auto plan = ica_plan_parallel(s.ica, p.remaining, s.cfg->mac.frag_threshold, rate, now(), t_);
      if (!plan || plan->empty()) return;
      Exchange ex;
      ex.cat = static_cast<int>(ci);
      ex.dst = p.dst;
      ex.pkts = {head};
      ex.rate = rate;
      ex.parallel = true;
      ex.plan = *plan;
      ex.frag_bytes = ex.plan[0];
      ex.budget_end = s.ica.parallel_budget_end;
      s.ex = ex;
      primaries_.insert(rts.packet);
      // Timed so the last fragment ends with the primary DATA.
      send_data(s, std::max(now(), ex.budget_end - ica_plan_span(ex.plan, rate, t_)));
      refresh_all();
      return;
    }
  }

  void build_burst(Station& s, Exchange& ex) {
    auto& q = s.cats[static_cast<std::size_t>(ex.cat)].queue;
    const auto& head = pkt(ex.pkts[0]);
    if (head.remaining != head.bytes || head.bytes > s.cfg->mac.frag_threshold) return;
    const auto len = static_cast<std::size_t>(oar_burst_len(ex.rate));
    for (std::size_t i = 1; i < q.size() && ex.pkts.size() < len; ++i) {
      const auto& p = pkt(q[i]);
      if (p.dst != ex.dst || p.remaining != p.bytes || p.bytes > s.cfg->mac.frag_threshold) break;
      ex.pkts.push_back(q[i]);
    }
    auto sizes = [&] {
      std::vector<std::int64_t> v;
      for (auto id : ex.pkts) v.push_back(pkt(id).bytes);
      return v;
    };
    while (ex.pkts.size() > 1 && !oar_burst_within_share(sizes(), ex.rate, sc_.max_packet_bytes)) ex.pkts.pop_back();
  }

  // -------------------------------------------------------------------------
  // Point coordination
  // -------------------------------------------------------------------------
  void superframe() {
    boundary_ = now();
    if (cf_end_at_ != kNever) {
      metrics_.pcf.min_cp = std::min(metrics_.pcf.min_cp, boundary_ - cf_end_at_);
    }
    want_beacon_ = true;
    const Micros next = now() + sc_.pcf->period;
    if (next < sc_.duration) engine_.schedule(next, "superframe", sc_.pcf->coordinator, [this] { superframe(); });
    refresh_all();
  }

  void try_beacon() {
    Station& pc = st(sc_.pcf->coordinator);
    if (pc.ex || pc.transmitting || pc.pending_tx > 0 || channel_busy(pc)) return;
    const Micros at = std::max(now(), std::max(boundary_, pc.channel_idle_since) + t_.pifs);
    if (beacon_check_.valid() && beacon_at_ == at) return;
    engine_.cancel(beacon_check_);
    beacon_at_ = at;
    beacon_check_ = engine_.schedule(at, "beacon_check", pc.id, [this] {
      beacon_check_ = {};
      Station& p = st(sc_.pcf->coordinator);
      if (!want_beacon_ || p.ex || p.transmitting || p.pending_tx > 0 || channel_busy(p)) return;
      if (p.channel_idle_since + t_.pifs > now()) {
        try_beacon();
        return;
      }
      want_beacon_ = false;
      in_cfp_ = true;
      cursor_.begin_cfp();
      ++metrics_.pcf.beacons;
      Frame b = make_control(FrameKind::Beacon, p.id, kBroadcast, 0);
      b.duration = std::max<Micros>(0, boundary_ + sc_.pcf->cfp_max - (now() + b.air()));
      transmit(p, b, now());
      refresh_all();
    });
  }

  void after_beacon() { poll_next(now() + t_.sifs); }

  void poll_next(Micros at) {
    Station& pc = st(sc_.pcf->coordinator);
    const auto& pol = sc_.pcf->pollable;
    const Micros worst = worst_poll_cycle(t_, sc_.max_packet_bytes, pc.cfg->mac.data_rate) - t_.pifs;
    if (pol.empty() || cursor_.cycle_complete() || at + worst > boundary_ + sc_.pcf->cfp_max) {
      Frame e = make_control(FrameKind::CfEnd, pc.id, kBroadcast, 0);
      e.cf_ack = owe_cf_ack_;
      owe_cf_ack_ = false;
      ++metrics_.pcf.cf_ends;
      transmit(pc, e, at);
      return;
    }
    polled_ = pol[cursor_.take()];
    Frame poll = make_control(FrameKind::CfPoll, pc.id, polled_, 0);
    poll.cf_ack = owe_cf_ack_;
    owe_cf_ack_ = false;
    ++metrics_.pcf.polls;
    transmit(pc, poll, at);
  }

  void after_poll() {
    awaiting_response_ = true;
    response_started_ = false;
    silence_check_ = engine_.schedule(now() + t_.pifs, "poll_silence", sc_.pcf->coordinator, [this] {
      silence_check_ = {};
      if (!awaiting_response_ || response_started_) return;
      awaiting_response_ = false;
      poll_next(now());
      refresh_all();
    });
  }

  void after_cf_end() {
    in_cfp_ = false;
    cf_end_at_ = now();
  }

  // Called at the end of the polled station's reply, with what the
  // coordinator made of it.
  void response_finished(const Frame& f, bool decoded) {
    awaiting_response_ = false;
    const int pc = sc_.pcf->coordinator;
    Micros gap = t_.sifs;
    if (!decoded || (f.kind == FrameKind::DataCfAck && f.dst != pc)) gap = t_.sifs + t_.ack_air() + t_.sifs;
    poll_next(now() + gap);
  }

  void check_cf_ack(Station& s, const Frame& f) {
    if (s.await_cf_ack < 0 || !s.ex || !s.ex->polled) return;
    const std::int64_t id = s.await_cf_ack;
    s.await_cf_ack = -1;
    engine_.cancel(s.timeout);
    if (f.cf_ack) {
      auto& p = pkt(id);
      p.remaining = 0;
      p.retries = 0;
      leave_queue(s, id);
    } else {
      ++pkt(id).retries;
    }
    s.ex.reset();
  }

  void answer_poll(Station& s) {
    if (s.pending_tx > 0 || s.transmitting) return;
    const int pc = sc_.pcf->coordinator;
    for (std::size_t ci = 0; ci < s.cats.size(); ++ci) {
      auto& c = s.cats[ci];
      if (c.queue.empty()) continue;
      if (s.ex) return;  // mid-exchange under DCF; stay silent
      const std::int64_t head = c.queue.front();
      auto& p = pkt(head);
      if (p.retries > s.cfg->mac.retry_limit) {
        p.dropped = true;
        leave_queue(s, head);
        continue;
      }
      Frame f = handle_poll(s.id, pc, p.remaining, p.dst, s.cfg->mac.data_rate);
      f.packet = head;
      f.ends_packet = true;
      f.retry = p.retries > 0;
      Exchange ex;
      ex.stage = Stage::Data;
      ex.cat = static_cast<int>(ci);
      ex.dst = p.dst;
      ex.pkts = {head};
      ex.frag_bytes = p.remaining;
      ex.rate = f.rate;
      ex.polled = true;
      s.ex = ex;
      ++metrics_.data_frames;
      transmit(s, f, now() + t_.sifs);
      return;
    }
    if (s.ex) return;
    transmit(s, handle_poll(s.id, pc, std::nullopt, pc, s.cfg->mac.data_rate), now() + t_.sifs);
  }

  // -------------------------------------------------------------------------
  // Medium
  // -------------------------------------------------------------------------
  struct OnAir {
    Transmission tx;
    std::vector<std::uint64_t> overlaps;
    bool collided = false;
  };

  void transmit(Station& s, Frame f, Micros at) {
    if (var(s).backoff == BackoffScheme::Mild) f.advertised_cw = s.cats[0].cw;
    ++s.pending_tx;
    std::string detail = engine_.tracing() ? f.describe() : std::string();
    engine_.schedule(at, "tx_start", s.id, [this, id = s.id, f] { begin_tx(st(id), f); }, std::move(detail));
  }

  void begin_tx(Station& s, const Frame& f) {
    --s.pending_tx;
    if (s.transmitting) throw ContractViolation("station " + std::to_string(s.id) + " already transmitting");
    OnAir rec;
    rec.tx = Transmission{++next_tx_, s.id, f, now(), now() + f.air(), f.rate};
    for (auto id : active_) {
      rec.overlaps.push_back(id);
      air_[id].overlaps.push_back(rec.tx.id);
    }
    const auto id = rec.tx.id;
    const Micros end = rec.tx.end;
    air_.emplace(id, std::move(rec));
    active_.push_back(id);
    s.transmitting = true;
    if (carries_data(f.kind)) data_starts_.push_back({now(), s.id, pkt(f.packet).flow, f.packet});
    ++metrics_.transmissions;
    for (auto& r : stations_) {
      if (topo_.can_sense(s.id, r.id)) ++r.sensed;
    }
    if (sc_.pcf && awaiting_response_ && s.id == polled_) {
      response_started_ = true;
      engine_.cancel(silence_check_);
    }
    std::string detail = engine_.tracing() ? f.describe() : std::string();
    engine_.schedule(end, "tx_end", s.id, [this, id] { end_tx(id); }, std::move(detail));
    refresh_all();
  }

  double fer_of(const Transmission& tx, int receiver) const {
    const auto& f = tx.frame;
    const Quality q = links_.get(tx.sender, receiver);
    if (carries_data(f.kind)) {
      if (tx.rate > max_rate(q)) return sc_.overrate_fer;
      return frame_error_prob(f.payload_bytes, sc_.base_fer[static_cast<std::size_t>(q)], sc_.fer_base_size);
    }
    if (!sc_.control_fer) return 0.0;
    return frame_error_prob(f.payload_bytes, sc_.base_fer[static_cast<std::size_t>(q)], sc_.fer_base_size);
  }

  void end_tx(std::uint64_t id) {
    const OnAir rec = air_.at(id);
    active_.erase(std::find(active_.begin(), active_.end(), id));
    Station& s = st(rec.tx.sender);
    s.transmitting = false;
    for (auto& r : stations_) {
      if (topo_.can_sense(s.id, r.id)) --r.sensed;
    }

    std::vector<Transmission> span;
    span.push_back(rec.tx);
    for (auto o : rec.overlaps) span.push_back(air_.at(o).tx);
    const Frame& f = rec.tx.frame;

    std::vector<std::pair<int, Reception>> outcome;
    for (auto& r : stations_) {
      if (r.id == s.id || !topo_.can_sense(s.id, r.id)) continue;
      bool own = r.transmitting;
      for (std::size_t i = 1; i < span.size(); ++i) own = own || span[i].sender == r.id;
      auto fer = [&](std::size_t i) { return fer_of(span[i], r.id); };
      std::vector<Reception> res;
      if (sc_.collisions) {
        res = resolve_reception(r.id, topo_, span, sc_.capture_ratio, own, fer, r.rng);
      } else {
        res = resolve_reception(r.id, topo_, std::span<const Transmission>(span.data(), 1), sc_.capture_ratio, own, fer,
                                r.rng);
      }
      outcome.emplace_back(r.id, res[0]);
      if (r.id == f.dst && topo_.can_hear(s.id, r.id) && (res[0] == Reception::Collided || own)) {
        // Frames lost to the same overlap count as one collision event.
        bool joined = false;
        for (auto o : rec.overlaps) joined = joined || air_.at(o).collided;
        if (!joined) ++metrics_.collisions;
        air_.at(id).collided = true;
        ++metrics_.collided_frames;
        if (f.kind == FrameKind::Ack && !f.parallel && primaries_.count(f.packet)) ++metrics_.primary_ack_collisions;
        if (f.reverse && carries_data(f.kind)) ++metrics_.reverse_collisions;
      }
    }

    on_sent(s, f);
    bool pc_decoded = false;
    for (const auto& [rid, res] : outcome) {
      if (sc_.pcf && rid == sc_.pcf->coordinator && res == Reception::Received) pc_decoded = true;
      if (res == Reception::Received) on_receive(st(rid), f);
      // The RSH prefix goes out at 1 Mbps; a payload lost to bit errors
      // still leaves it readable.
      if (res == Reception::Errored && f.rsh && rid != f.dst) rsh_update(st(rid), f);
    }
    if (sc_.pcf && awaiting_response_ && response_started_ && s.id == polled_) response_finished(f, pc_decoded);

    if (air_.size() > 512) collect_air();
    refresh_all();
  }

  void collect_air() {
    Micros oldest = now();
    for (auto id : active_) oldest = std::min(oldest, air_.at(id).tx.start);
    for (auto it = air_.begin(); it != air_.end();) {
      const bool live = std::find(active_.begin(), active_.end(), it->first) != active_.end();
      if (!live && it->second.tx.end < oldest) {
        it = air_.erase(it);
      } else {
        ++it;
      }
    }
  }

  // -------------------------------------------------------------------------
  // Results
  // -------------------------------------------------------------------------
  RunMetrics finish(std::uint64_t events) {
    RunMetrics m = metrics_;
    m.events = events;
    m.duration = sc_.duration;
    m.variant = sc_.nodes.empty() ? "dcf" : variant_name(sc_.nodes.front().variant);
    for (const auto& n : sc_.nodes) {
      if (!(n.variant == sc_.nodes.front().variant)) m.variant = "mixed";
    }
    m.collision_fraction =
        m.transmissions == 0 ? 0.0 : static_cast<double>(m.collisions) / static_cast<double>(m.transmissions);
    const double secs = static_cast<double>(sc_.duration) / 1e6;
    delays_.resize(sc_.flows.size());
    m.flows.resize(sc_.flows.size());
    for (std::size_t f = 0; f < sc_.flows.size(); ++f) {
      m.flows[f].src = sc_.flows[f].src;
      m.flows[f].dst = sc_.flows[f].dst;
      m.flows[f].share = shares_[f];
    }
    for (const auto& p : packets_) {
      auto& fm = m.flows[static_cast<std::size_t>(p.flow)];
      ++fm.generated;
      fm.generated_bits += static_cast<double>(p.bytes) * 8.0;
      if (p.received) {
        ++fm.delivered;
        fm.delivered_bits += static_cast<double>(p.bytes) * 8.0;
      } else if (p.dropped) {
        ++fm.dropped;
      } else {
        ++fm.queued_at_end;
      }
    }
    double total = 0.0;
    for (std::size_t f = 0; f < m.flows.size(); ++f) {
      auto& fm = m.flows[f];
      fm.throughput_bps = fm.delivered_bits / secs;
      total += fm.throughput_bps;
      const auto& d = delays_[f];
      if (!d.empty()) {
        double sum = 0.0;
        for (double x : d) sum += x;
        fm.mean_delay_us = sum / static_cast<double>(d.size());
        fm.p95_delay_us = percentile(d, 0.95);
      }
    }
    m.aggregate_throughput_bps = total;

    std::vector<std::vector<bool>> active(window_bits_.size(), std::vector<bool>(sc_.flows.size(), false));
    for (std::size_t w = 0; w < window_bits_.size(); ++w) {
      const Micros lo = static_cast<Micros>(w) * sc_.metric_window;
      const Micros hi = std::min(lo + sc_.metric_window, sc_.duration);
      for (std::size_t f = 0; f < sc_.flows.size(); ++f) {
        active[w][f] = sc_.flows[f].start < hi && sc_.flows[f].stop > lo;
      }
    }
    if (sc_.flows.size() >= 2) m.fairness_series = fairness_series(window_bits_, active, shares_);
    if (!m.fairness_series.empty()) {
      double sum = 0.0;
      for (double x : m.fairness_series) sum += x;
      m.fairness_mean = sum / static_cast<double>(m.fairness_series.size());
    }
    return m;
  }

  Scenario sc_;
  Topology topo_;
  MacTiming t_;
  Engine engine_;
  LinkQuality links_;
  RandomStream link_rng_;
  std::vector<double> shares_;
  std::vector<Station> stations_;
  std::vector<Packet> packets_;
  std::vector<std::size_t> flow_in_queue_;
  std::vector<std::vector<std::size_t>> replies_;
  std::vector<std::vector<double>> window_bits_;
  std::vector<std::vector<double>> delays_;
  RunMetrics metrics_;
  std::vector<DataStart> data_starts_;
  std::set<std::int64_t> primaries_;  // packets whose exchange had a parallel transmission beside it

  std::unordered_map<std::uint64_t, OnAir> air_;
  std::vector<std::uint64_t> active_;
  std::uint64_t next_tx_ = 0;

  // point coordinator
  PollCursor cursor_;
  Micros boundary_ = 0;
  bool want_beacon_ = false;
  bool in_cfp_ = false;
  bool owe_cf_ack_ = false;
  bool awaiting_response_ = false;
  bool response_started_ = false;
  int polled_ = -1;
  EventHandle beacon_check_;
  Micros beacon_at_ = kNever;
  EventHandle silence_check_;
  Micros cf_end_at_ = kNever;
};

}  // namespace wmac
