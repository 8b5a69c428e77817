#include <gtest/gtest.h>

#include <map>
#include <sstream>

#include "support.hpp"

using namespace wmac;
using namespace wmac::testing;

namespace {

Scenario from_file(const std::string& name, const std::string& variant, Micros duration) {
  Scenario sc = load_scenario(std::string(WMAC_SCENARIOS) + "/" + name);
  sc = with_variant(sc, parse_variant(variant));
  sc.duration = duration;
  return sc;
}

struct Traced {
  Capture cap;
  RunMetrics m;
};

Traced traced(const Scenario& sc) {
  Traced t;
  Simulation sim(sc, &t.cap);
  t.m = sim.run();
  return t;
}

Frame rts_from(int src, int dst, Micros dur) {
  Frame f = make_control(FrameKind::Rts, src, dst, dur);
  f.packet = 3;
  return f;
}

IcaState exposed_with_budget(Micros end) {
  IcaState s;
  s.exposed = true;
  s.parallel_budget_end = end;
  return s;
}

std::size_t count_flag(const Capture& cap, const std::string& flag) {
  std::size_t n = 0;
  for (const auto& l : cap.starts("DATA")) n += has_flag(l.detail, flag);
  return n;
}

}  // namespace

TEST(DcfPlus, AckDurationExamples) {
  MacTiming t;
  EXPECT_EQ(dcfplus_ack_duration(t, std::nullopt, Rate::R11), 0);
  EXPECT_EQ(dcfplus_ack_duration(t, 40, Rate::R11), 3 * 10 + 304 + airtime(40, Rate::R11) + 304);
  EXPECT_EQ(dcfplus_ack_duration(t, 40, Rate::R11), 860);
  EXPECT_EQ(dcfplus_ack_duration(t, 40, Rate::R11, true), 0);
}

TEST(Edcf, ExpandByPersistenceFactor) {
  EXPECT_EQ(edcf_expand(16, 1.5, 256), 24);
  EXPECT_EQ(edcf_expand(16, 2.0, 256), 32);
  EXPECT_EQ(edcf_expand(200, 1.5, 256), 256);
}

TEST(Edcf, CategoryValidation) {
  MacTiming t;
  EdcfCategory c;
  EXPECT_NO_THROW(c.validate(t));
  c.aifs = 40;
  EXPECT_THROW(c.validate(t), std::invalid_argument);
  c.aifs = 50;
  c.pf = 0.9;
  EXPECT_THROW(c.validate(t), std::invalid_argument);
  c.pf = 2;
  c.id = 8;
  EXPECT_THROW(c.validate(t), std::invalid_argument);
}

TEST(Edcf, TieGoesToLowerAifsOthersCollideVirtually) {
  std::vector<CategoryCountdown> cats = {{70, 0, true}, {50, 1, true}, {50, 3, true}};
  const auto r = edcf_contend(cats, 20);
  EXPECT_EQ(r.winner, 1);
  EXPECT_EQ(r.losers, std::vector<int>{0});
  EXPECT_EQ(r.ready_after, 70);
}

TEST(Edcf, EarliestFinisherWinsAlone) {
  std::vector<CategoryCountdown> cats = {{50, 4, true}, {90, 0, true}, {50, 0, false}};
  const auto r = edcf_contend(cats, 20);
  EXPECT_EQ(r.winner, 1);
  EXPECT_TRUE(r.losers.empty());
}

TEST(Edcf, NothingQueuedNoWinner) {
  std::vector<CategoryCountdown> cats = {{50, 0, false}};
  EXPECT_EQ(edcf_contend(cats, 20).winner, -1);
}

TEST(Ica, RtsThenCtsIsOrdinaryNav) {
  MacTiming t;
  IcaState s = ica_on_overhear({}, rts_from(2, 1, 1921), 100, t);
  s = ica_on_overhear(s, make_control(FrameKind::Cts, 1, 2, 1607), 500, t);
  s = ica_on_cts_timeout(s, 1000);
  EXPECT_FALSE(s.exposed);
}

TEST(Ica, RtsThenSilenceMeansExposed) {
  MacTiming t;
  IcaState s = ica_on_overhear({}, rts_from(2, 1, 1921), 100, t);
  EXPECT_EQ(s.cts_timeout_at, 100 + t.cts_timeout());
  EXPECT_EQ(s.parallel_budget_end, 100 + 1921 - 10 - 304);
  EXPECT_FALSE(ica_on_cts_timeout(s, s.cts_timeout_at - 1).exposed);
  EXPECT_TRUE(ica_on_cts_timeout(s, s.cts_timeout_at).exposed);
}

TEST(Ica, NoRtsLeavesStateAlone) {
  IcaState s;
  s = ica_on_cts_timeout(s, 5000);
  EXPECT_FALSE(s.exposed);
  EXPECT_FALSE(s.overheard_rts.has_value());
}

TEST(Ica, OneFragmentFitsInTwoMilliseconds) {
  MacTiming t;
  const auto plan = ica_plan_parallel(exposed_with_budget(2000), 3000, 1500, Rate::R11, 0, t);
  ASSERT_TRUE(plan.has_value());
  EXPECT_EQ(*plan, std::vector<std::int64_t>{1500});
}

TEST(Ica, BudgetBelowPreambleSendsNothing) {
  MacTiming t;
  EXPECT_FALSE(ica_plan_parallel(exposed_with_budget(150), 1500, 1500, Rate::R11, 0, t).has_value());
}

TEST(Ica, TwoFragmentsEndExactlyAtBudget) {
  MacTiming t;
  const Micros e = 2 * 1283 + 2 * 10 + 304;
  const auto plan = ica_plan_parallel(exposed_with_budget(e), 3000, 1500, Rate::R11, 0, t);
  ASSERT_TRUE(plan.has_value());
  EXPECT_EQ(*plan, (std::vector<std::int64_t>{1500, 1500}));
  EXPECT_EQ(ica_plan_span(*plan, Rate::R11, t), e);
}

TEST(Ica, OversizedSingleFragmentIsShrunk) {
  MacTiming t;
  const auto plan = ica_plan_parallel(exposed_with_budget(1273), 1500, 1500, Rate::R11, 0, t);
  ASSERT_TRUE(plan.has_value());
  ASSERT_EQ(plan->size(), 1u);
  EXPECT_LE(airtime((*plan)[0], Rate::R11), 1273);
  EXPECT_GT(airtime((*plan)[0] + 1, Rate::R11), 1273);
}

TEST(Ica, NotExposedNoPlan) {
  MacTiming t;
  IcaState s = exposed_with_budget(5000);
  s.exposed = false;
  EXPECT_FALSE(ica_plan_parallel(s, 1500, 1500, Rate::R11, 0, t).has_value());
}

TEST(IcaProperty, PlansNeverOverrunTheBudget) {
  MacTiming t;
  RandomStream r(31, 0);
  for (int i = 0; i < 5000; ++i) {
    const Micros now = r.uniform_int(0, 1000);
    const Micros end = now + r.uniform_int(0, 8000);
    const Rate rate = kAllRates[static_cast<std::size_t>(r.uniform_int(0, 3))];
    const auto plan = ica_plan_parallel(exposed_with_budget(end), r.uniform_int(1, 3000), r.uniform_int(50, 1500),
                                        rate, now, t);
    if (!plan) continue;
    ASSERT_FALSE(plan->empty());
    ASSERT_LE(now + ica_plan_span(*plan, rate, t), end);
  }
}

TEST(EdcfRun, SingleDcfLikeCategoryMatchesDcfTrace) {
  for (const char* name : {"cell5.scn", "string4.scn"}) {
    Scenario dcf = from_file(name, "dcf", 1'000'000);
    Scenario edcf = from_file(name, "dcf+edcf", 1'000'000);
    for (auto& n : edcf.nodes) n.categories = {EdcfCategory{0, 50, 2.0, n.mac.cw_min, n.mac.cw_max}};
    std::ostringstream a, b;
    StreamTrace ta(a), tb(b);
    run_scenario(dcf, &ta);
    run_scenario(edcf, &tb);
    EXPECT_EQ(a.str(), b.str()) << name;
    EXPECT_GT(a.str().size(), 1000u);
  }
}

TEST(EdcfRun, ShortAifsCategoryGetsMoreThroughput) {
  Scenario sc = cell(2, 20.0, "dcf+edcf");
  sc.duration = 3'000'000;
  for (auto& n : sc.nodes) n.categories = {EdcfCategory{0, 50, 2.0, 16, 256}, EdcfCategory{1, 110, 2.0, 16, 256}};
  auto hi = backlogged(1, 0, 1000);
  auto lo = backlogged(2, 0, 1000);
  lo.category = 1;
  sc.flows = {hi, lo};
  const auto m = run_scenario(sc);
  EXPECT_GT(m.flows[0].throughput_bps, 1.5 * m.flows[1].throughput_bps);
}

TEST(DcfPlusRun, ReverseDataRidesOnTheAck) {
  const auto t = traced(from_file("pairs4.scn", "dcf+plus", 2'000'000));
  const auto tx = t.cap.starts();
  std::size_t reverse = 0;
  for (std::size_t i = 0; i < tx.size(); ++i) {
    if (!has_flag(tx[i].detail, "reverse") || tx[i].detail.rfind("DATA", 0) != 0) continue;
    ++reverse;
    // preceded by the forward sender's CTS, and before that the ACK that
    // reserved the channel
    ASSERT_GE(i, 2u);
    const std::string me = std::to_string(tx[i].node);
    EXPECT_EQ(tx[i - 1].detail.rfind("CTS", 0), 0u) << tx[i].time;
    EXPECT_NE(tx[i - 1].detail.find("->" + me + " "), std::string::npos) << tx[i].time;
    EXPECT_EQ(tx[i - 2].detail.rfind("ACK " + me + "->", 0), 0u) << tx[i].time;
  }
  EXPECT_GT(reverse, 100u);
  EXPECT_EQ(t.m.reverse_collisions, 0u);
  // no contention on the way: no access event for the reverse sender between
  // its ACK and the reverse DATA
  for (std::size_t i = 0; i < t.cap.lines.size(); ++i) {
    const auto& l = t.cap.lines[i];
    if (l.kind != "tx_start" || !has_flag(l.detail, "reverse") || l.detail.rfind("DATA", 0) != 0) continue;
    for (std::size_t j = i; j-- > 0;) {
      const auto& p = t.cap.lines[j];
      if (p.node == l.node && p.kind == "tx_start") break;
      ASSERT_FALSE(p.node == l.node && p.kind == "access") << l.time;
    }
  }
}

TEST(DcfPlusRun, PeerWithoutDcfPlusFallsBack) {
  Scenario sc = from_file("pairs4.scn", "dcf+plus", 1'000'000);
  sc.nodes[1].variant = parse_variant("dcf");
  sc.nodes[3].variant = parse_variant("dcf");
  const auto t = traced(sc);
  EXPECT_EQ(count_flag(t.cap, "reverse"), 0u);
  EXPECT_GT(t.m.flows[1].delivered, 0u);
}

TEST(DcfPlusRun, ReplyLargerThanOneFrameIsDeclined) {
  Scenario sc = from_file("pairs4.scn", "dcf+plus", 1'000'000);
  sc.nodes[1].mac.frag_threshold = 500;
  sc.flows[1].bytes = 600;
  const auto t = traced(sc);
  for (const auto& l : t.cap.starts("DATA 1->0")) EXPECT_FALSE(has_flag(l.detail, "reverse")) << l.time;
  EXPECT_GT(count_flag(t.cap, "reverse"), 0u);  // the other pair still uses it
}

TEST(IcaRun, ParallelFramesEndWithinThePrimary) {
  for (std::uint64_t seed : {1, 2, 3}) {
    Scenario sc = from_file("string4.scn", "dcf+ica", 2'000'000);
    sc.seed = seed;
    const auto t = traced(sc);
    EXPECT_EQ(t.m.primary_ack_collisions, 0u);
    EXPECT_EQ(t.m.parallel_overruns, 0u);
    EXPECT_GT(t.m.parallel_frames, 50u);

    std::vector<TraceLine> starts, stops;
    for (const auto& l : t.cap.lines) {
      if (l.detail.rfind("DATA", 0) != 0) continue;
      if (l.kind == "tx_start") starts.push_back(l);
      if (l.kind == "tx_end") stops.push_back(l);
    }
    auto end_of = [&](const TraceLine& s) {
      for (const auto& e : stops) {
        if (e.time > s.time && e.node == s.node && e.detail == s.detail) return e.time;
      }
      return kNever;
    };
    std::size_t checked = 0;
    for (const auto& s : starts) {
      if (!has_flag(s.detail, "parallel")) continue;
      const TraceLine* primary = nullptr;
      for (const auto& p : starts) {
        if (p.time > s.time) break;
        if (p.node != s.node && !has_flag(p.detail, "parallel")) primary = &p;
      }
      ASSERT_NE(primary, nullptr);
      EXPECT_LE(end_of(s), end_of(*primary)) << "seed " << seed << " t=" << s.time;
      ++checked;
    }
    EXPECT_GT(checked, 50u);
  }
}
