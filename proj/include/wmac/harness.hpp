#pragma once

// Running scenarios, side-by-side variant comparison and CSV output.

#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wmac/config.hpp"
#include "wmac/metrics.hpp"
#include "wmac/simulation.hpp"

namespace wmac {

inline RunMetrics run_scenario(const Scenario& sc, TraceSink* trace = nullptr) {
  Simulation sim(sc, trace);
  return sim.run();
}

// Same scenario with every node switched to `variant`.
inline Scenario with_variant(Scenario sc, const Variant& v) {
  for (auto& n : sc.nodes) n.variant = v;
  return sc;
}

// Runs are independent, so they go out in parallel; results keep the order
// of `variants`.
inline std::vector<RunMetrics> compare(const Scenario& sc, const std::vector<Variant>& variants) {
  if (variants.empty()) throw std::invalid_argument("compare: no variants given");
  std::vector<std::future<RunMetrics>> jobs;
  jobs.reserve(variants.size());
  for (const auto& v : variants) {
    jobs.push_back(std::async(std::launch::async, [s = with_variant(sc, v)] { return run_scenario(s); }));
  }
  std::vector<RunMetrics> out;
  out.reserve(jobs.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<RunMetrics>& runs) {
  os << "variant,flow,src,dst,share,generated,delivered,dropped,queued,throughput_bps,mean_delay_us,p95_delay_us,"
        "collision_fraction,fairness_mean\n";
  auto fixed = [](double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
  };
  for (const auto& r : runs) {
    for (std::size_t i = 0; i < r.flows.size(); ++i) {
      const auto& f = r.flows[i];
      os << r.variant << ',' << i << ',' << f.src << ',' << f.dst << ',' << fixed(f.share, 4) << ',' << f.generated
         << ',' << f.delivered << ',' << f.dropped << ',' << f.queued_at_end << ',' << fixed(f.throughput_bps, 1)
         << ',' << fixed(f.mean_delay_us, 1) << ',' << fixed(f.p95_delay_us, 1) << ",,\n";
    }
    std::uint64_t gen = 0, del = 0, drop = 0, q = 0;
    for (const auto& f : r.flows) {
      gen += f.generated;
      del += f.delivered;
      drop += f.dropped;
      q += f.queued_at_end;
    }
    os << r.variant << ",all,,,1.0000," << gen << ',' << del << ',' << drop << ',' << q << ','
       << fixed(r.aggregate_throughput_bps, 1) << ",,," << fixed(r.collision_fraction, 6) << ','
       << fixed(r.fairness_mean, 6) << '\n';
  }
}

}  // namespace wmac
