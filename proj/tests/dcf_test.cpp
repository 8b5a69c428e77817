#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "support.hpp"
#include "wmac/dcf.hpp"

using namespace wmac;
using namespace wmac::testing;

TEST(CwAfter, DoublesOnFailure) { EXPECT_EQ(cw_after(16, TxOutcome::Failure), 32); }
TEST(CwAfter, CappedAtMax) { EXPECT_EQ(cw_after(256, TxOutcome::Failure), 256); }
TEST(CwAfter, ResetOnSuccess) { EXPECT_EQ(cw_after(128, TxOutcome::Success), 16); }

TEST(CwAfter, StaysInLegalSet) {
  int cw = 16;
  RandomStream r(1, 0);
  for (int i = 0; i < 1000; ++i) {
    cw = cw_after(cw, r.bernoulli(0.6) ? TxOutcome::Failure : TxOutcome::Success);
    ASSERT_TRUE(cw == 16 || cw == 32 || cw == 64 || cw == 128 || cw == 256) << cw;
  }
}

TEST(DrawBackoff, WindowOfOne) {
  RandomStream r(1, 0);
  EXPECT_EQ(draw_backoff(1, r), 0);
}

TEST(DrawBackoff, UniformMean) {
  RandomStream r(123, 0);
  double sum = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const int b = draw_backoff(16, r);
    ASSERT_GE(b, 0);
    ASSERT_LE(b, 15);
    sum += b;
  }
  EXPECT_NEAR(sum / n, 7.5, 0.1);
}

TEST(DrawBackoff, GoldenSequence) {
  // Same draws as the stream golden test: uniform over [0, 15].
  RandomStream r(7, 1);
  for (int want : {7, 9, 1, 8, 13, 4, 12, 2, 9, 11}) EXPECT_EQ(draw_backoff(16, r), want);
}

TEST(NavMerge, Examples) {
  EXPECT_EQ(nav_merge(0, 500, 100), 600);
  EXPECT_EQ(nav_merge(1000, 200, 100), 1000);
  EXPECT_EQ(nav_merge(600, 0, 100), 600);
}

TEST(NavMerge, NeverShrinks) {
  RandomStream r(5, 0);
  Micros nav = 0;
  Micros now = 0;
  for (int i = 0; i < 1000; ++i) {
    now += r.uniform_int(0, 100);
    const Micros next = nav_merge(nav, r.uniform_int(0, 3000), now);
    ASSERT_GE(next, nav);
    nav = next;
  }
}

TEST(ShouldUseRts, ThresholdIsInclusive) {
  EXPECT_FALSE(should_use_rts(100, 500));
  EXPECT_TRUE(should_use_rts(500, 500));
  EXPECT_TRUE(should_use_rts(1500, 500));
}

TEST(FragmentPlan, Examples) {
  EXPECT_EQ(fragment_plan(3000, 1500), (std::vector<FragmentSpec>{{1500, true, 0}, {1500, false, 1}}));
  EXPECT_EQ(fragment_plan(1000, 1500), (std::vector<FragmentSpec>{{1000, false, 0}}));
  EXPECT_EQ(fragment_plan(3001, 1500),
            (std::vector<FragmentSpec>{{1500, true, 0}, {1500, true, 1}, {1, false, 2}}));
}

TEST(FragmentPlan, SizesSumAndShape) {
  for (std::int64_t p = 1; p < 5000; p += 37) {
    for (std::int64_t th : {1, 100, 256, 1500, 2346}) {
      const auto plan = fragment_plan(p, th);
      std::int64_t sum = 0;
      ASSERT_EQ(static_cast<std::int64_t>(plan.size()), (p + th - 1) / th);
      for (std::size_t i = 0; i < plan.size(); ++i) {
        sum += plan[i].size;
        ASSERT_EQ(plan[i].fragment_number, static_cast<int>(i));
        ASSERT_EQ(plan[i].more_fragments, i + 1 < plan.size());
        if (i + 1 < plan.size()) {
          ASSERT_EQ(plan[i].size, th);
        }
      }
      ASSERT_EQ(sum, p);
    }
  }
}

TEST(Timing, InterframeSpacesOrdered) {
  const MacTiming t;
  EXPECT_EQ(t.slot, 20);
  EXPECT_EQ(t.sifs, 10);
  EXPECT_EQ(t.pifs, 30);
  EXPECT_EQ(t.difs, 50);
  EXPECT_LT(t.sifs, t.pifs);
  EXPECT_LT(t.pifs, t.difs);
  EXPECT_EQ(t.cts_air(), 304);
  EXPECT_EQ(t.ack_air(), 304);
  EXPECT_EQ(t.rts_air(), 352);
  EXPECT_EQ(t.cts_timeout(), 10 + 304 + 20);
}

TEST(Timing, DurationFieldsChain) {
  const MacTiming t;
  const Micros data = airtime(1500, Rate::R11);
  const Micros rts = rts_duration(t, data);
  EXPECT_EQ(rts, 30 + 304 + 1283 + 304);
  EXPECT_EQ(cts_duration_from_rts(t, rts), rts - 10 - 304);
  EXPECT_EQ(data_duration(t), 10 + 304);
  EXPECT_EQ(ack_duration_from_data(t, data_duration(t)), 0);
  // A fragment's DATA covers the next fragment and its ACK.
  EXPECT_EQ(data_duration(t, 500), 10 + 304 + 20 + 500 + 304);
}

// ---------------------------------------------------------------------------
// Station behaviour, observed through the event trace.
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, Micros> field_ints(const std::string& detail) {
  std::map<std::string, Micros> out;
  std::size_t pos = 0;
  while ((pos = detail.find('=', pos)) != std::string::npos) {
    auto b = detail.rfind(' ', pos);
    b = b == std::string::npos ? 0 : b + 1;
    const auto e = detail.find(' ', pos);
    const std::string key = detail.substr(b, pos - b);
    const std::string val = detail.substr(pos + 1, e == std::string::npos ? std::string::npos : e - pos - 1);
    try {
      out[key] = std::stoll(val);
    } catch (...) {
    }
    ++pos;
  }
  return out;
}

std::string kind_of(const std::string& detail) { return detail.substr(0, detail.find(' ')); }

struct Span {
  Micros start;
  Micros end;
  int node;
  std::string kind;
  std::string detail;
};

std::vector<Span> spans(const Capture& c) {
  std::vector<Span> out;
  std::map<int, std::size_t> open;
  for (const auto& l : c.lines) {
    if (l.kind == "tx_start") {
      open[l.node] = out.size();
      out.push_back({l.time, -1, l.node, kind_of(l.detail), l.detail});
    } else if (l.kind == "tx_end") {
      out[open.at(l.node)].end = l.time;
    }
  }
  return out;
}

}  // namespace

TEST(DcfStation, SingleExchangeGaps) {
  Scenario sc = cell(1);
  sc.flows.push_back(batch(1, 0, {1500}));
  sc.duration = 100'000;
  Capture cap;
  Simulation sim(sc, &cap);
  const auto m = sim.run();
  const auto s = spans(cap);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_EQ(s[0].kind, "RTS");
  EXPECT_EQ(s[1].kind, "CTS");
  EXPECT_EQ(s[2].kind, "DATA");
  EXPECT_EQ(s[3].kind, "ACK");
  const MacTiming t;
  // DIFS, then a whole number of backoff slots below cw_min.
  const Micros wait = s[0].start - 0;
  EXPECT_GE(wait, t.difs);
  EXPECT_EQ((wait - t.difs) % t.slot, 0);
  EXPECT_LT((wait - t.difs) / t.slot, 16);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_EQ(s[i].start - s[i - 1].end, t.sifs);
  EXPECT_EQ(s[2].end - s[2].start, 1283);
  EXPECT_EQ(m.flows[0].delivered, 1u);
}

TEST(DcfStation, TwoWayBelowThreshold) {
  Scenario sc = cell(1);
  sc.flows.push_back(batch(1, 0, {200}));
  sc.duration = 100'000;
  Capture cap;
  Simulation sim(sc, &cap);
  sim.run();
  const auto s = spans(cap);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s[0].kind, "DATA");
  EXPECT_EQ(s[1].kind, "ACK");
  EXPECT_EQ(s[1].start - s[0].end, 10);
}

TEST(DcfStation, CtsTimeoutRetriesWithRetryBitAndDrops) {
  // The destination is out of range, so no RTS is ever answered.
  Scenario sc = cell(1);
  sc.nodes[1].pos = {1, 1000, 0};
  sc.flows.push_back(batch(1, 0, {1500}));
  sc.duration = 2'000'000;
  Capture cap;
  Simulation sim(sc, &cap);
  const auto m = sim.run();
  const auto rts = cap.starts("RTS");
  ASSERT_EQ(rts.size(), 8u);  // first attempt plus seven retries
  EXPECT_EQ(rts[0].detail.find("retry"), std::string::npos);
  for (std::size_t i = 1; i < rts.size(); ++i) EXPECT_NE(rts[i].detail.find("retry"), std::string::npos);
  EXPECT_EQ(m.flows[0].dropped, 1u);
  EXPECT_EQ(m.flows[0].delivered, 0u);
}

TEST(DcfStation, BackoffWindowGrowsAfterFailures) {
  // Gap before the k-th attempt is DIFS (+ CTS timeout) + slots < cw_k.
  Scenario sc = cell(1);
  sc.nodes[1].pos = {1, 1000, 0};
  sc.flows.push_back(batch(1, 0, {1500}));
  sc.duration = 2'000'000;
  const MacTiming t;
  std::vector<int> cw = {16, 32, 64, 128, 256, 256, 256, 256};
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    sc.seed = seed;
    Capture cap;
    Simulation sim(sc, &cap);
    sim.run();
    const auto s = spans(cap);
    ASSERT_EQ(s.size(), 8u);
    Micros prev_end = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
      const Micros idle_from = i == 0 ? 0 : prev_end + t.cts_timeout();
      const Micros slots = (s[i].start - idle_from - t.difs) / t.slot;
      ASSERT_GE(slots, 0);
      ASSERT_LT(slots, cw[i]) << "attempt " << i << " seed " << seed;
      prev_end = s[i].end;
    }
  }
}

TEST(DcfStation, EighthAckTimeoutDrops) {
  Scenario sc = cell(1);
  sc.base_fer = {1.0, 1.0, 1.0, 1.0};
  sc.nodes[1].mac.rts_threshold = 3000;
  sc.flows.push_back(batch(1, 0, {300, 300}));
  sc.duration = 3'000'000;
  Capture cap;
  Simulation sim(sc, &cap);
  const auto m = sim.run();
  const auto data = cap.starts("DATA");
  ASSERT_EQ(data.size(), 16u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_NE(data[i].detail.find("pkt=0"), std::string::npos);
  EXPECT_NE(data[8].detail.find("pkt=1"), std::string::npos);
  EXPECT_EQ(m.flows[0].dropped, 2u);
}

TEST(DcfStation, FragmentsGoOutAsOneBurst) {
  Scenario sc = cell(1);
  sc.nodes[1].mac.frag_threshold = 500;
  sc.flows.push_back(batch(1, 0, {1200}));
  sc.duration = 100'000;
  Capture cap;
  Simulation sim(sc, &cap);
  const auto m = sim.run();
  const auto s = spans(cap);
  // RTS CTS then three DATA/ACK pairs, all SIFS apart.
  ASSERT_EQ(s.size(), 8u);
  for (std::size_t i = 1; i < s.size(); ++i) EXPECT_EQ(s[i].start - s[i - 1].end, 10) << i;
  EXPECT_NE(s[2].detail.find(" mf"), std::string::npos);
  EXPECT_NE(s[4].detail.find("frag=1"), std::string::npos);
  EXPECT_EQ(s[6].detail.find(" mf"), std::string::npos);
  EXPECT_EQ(m.flows[0].delivered, 1u);
}

// Carrier sense and NAV: in a single cell every station hears every frame, so
// no contention-started frame may begin while another frame is on the air or
// while a CTS reservation is running.
TEST(DcfProperty, NoStartWhileBusyOrReserved) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    Scenario sc = cell(5);
    sc.seed = seed;
    sc.duration = 500'000;
    for (int i = 1; i <= 5; ++i) sc.flows.push_back(backlogged(i, 0));
    Capture cap;
    Simulation sim(sc, &cap);
    sim.run();
    const auto s = spans(cap);
    std::vector<std::pair<Micros, Micros>> reserved;
    for (const auto& x : s) {
      if (x.kind == "CTS") reserved.push_back({x.start, x.end + field_ints(x.detail)["dur"]});
    }
    for (const auto& x : s) {
      if (x.kind != "RTS") continue;
      for (const auto& y : s) {
        if (&x == &y) continue;
        ASSERT_FALSE(y.start < x.start && x.start < y.end) << "carrier sense violated at " << x.start;
      }
      for (const auto& [a, b] : reserved) ASSERT_FALSE(a < x.start && x.start < b) << "NAV violated at " << x.start;
    }
  }
}

TEST(DcfProperty, FragmentBurstIsNotInterrupted) {
  Scenario sc = cell(3);
  sc.duration = 500'000;
  for (int i = 1; i <= 3; ++i) {
    sc.nodes[static_cast<std::size_t>(i)].mac.frag_threshold = 400;
    sc.flows.push_back(backlogged(i, 0, 1000));
  }
  Capture cap;
  Simulation sim(sc, &cap);
  sim.run();
  const auto s = spans(cap);
  // Once a first fragment is acknowledged, only the two parties talk until
  // the final ACK.
  int bursts = 0;
  for (std::size_t i = 0; i + 1 < s.size(); ++i) {
    if (s[i].kind != "DATA" || s[i].detail.find(" mf") == std::string::npos ||
        s[i].detail.find("frag=") != std::string::npos) {
      continue;
    }
    if (s[i + 1].kind != "ACK" || s[i + 1].start != s[i].end + 10) continue;
    ++bursts;
    const int sender = s[i].node;
    std::size_t j = i;
    while (j < s.size() && !(s[j].kind == "DATA" && s[j].node == sender && s[j].detail.find(" mf") == std::string::npos)) ++j;
    ASSERT_LT(j + 1, s.size());
    const Micros burst_end = s[j + 1].end;
    for (const auto& y : s) {
      if (y.start > s[i].start && y.start < burst_end) {
        ASSERT_TRUE(y.node == sender || y.node == 0) << y.detail;
      }
    }
  }
  EXPECT_GT(bursts, 50);
}

TEST(DcfProperty, ConservationAcrossRandomCells) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    RandomStream r(seed, 99);
    const int n = static_cast<int>(r.uniform_int(1, 8));
    Scenario sc = cell(n);
    sc.seed = seed;
    sc.duration = 300'000;
    sc.base_fer = {0.5, 0.1, 0.02, 0.005 * static_cast<double>(r.uniform_int(0, 20))};
    for (int i = 1; i <= n; ++i) sc.flows.push_back(backlogged(i, 0, r.uniform_int(50, 1500)));
    const auto m = run_scenario(sc);
    for (const auto& f : m.flows) {
      ASSERT_EQ(f.generated, f.delivered + f.dropped + f.queued_at_end);
      ASSERT_LE(f.delivered_bits, f.generated_bits);
    }
    ASSERT_GE(m.collision_fraction, 0.0);
    ASSERT_LE(m.collision_fraction, 1.0);
  }
}
