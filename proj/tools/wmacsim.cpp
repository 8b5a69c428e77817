// wmacsim: run, compare or validate a scenario file.
//
//   wmacsim run <scenario> [--seed N] [--out FILE] [--trace FILE]
//   wmacsim compare <scenario> --variants a,b,c [--out FILE]
//   wmacsim validate <scenario>
//
// Exit codes: 0 ok, 1 usage or I/O, 2 scenario error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wmac/wmac.hpp"

namespace {

int emit(const std::vector<wmac::RunMetrics>& runs, const std::string& out) {
  if (out.empty() || out == "-") {
    wmac::write_csv(std::cout, runs);
    return 0;
  }
  std::ofstream f(out);
  if (!f) {
    std::cerr << "cannot write '" << out << "'\n";
    return 1;
  }
  wmac::write_csv(f, runs);
  if (!f) {
    std::cerr << "write to '" << out << "' failed\n";
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete-event 802.11b MAC simulator"};
  app.require_subcommand(1);

  std::string path;
  std::string out;
  std::string trace_path;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> variants;

  auto* run = app.add_subcommand("run", "run one scenario and print per-flow CSV");
  run->add_option("scenario", path, "scenario file")->required();
  run->add_option("--seed", seed, "override the scenario seed");
  run->add_option("--out", out, "CSV output file (default stdout)");
  run->add_option("--trace", trace_path, "write an event trace");

  auto* cmp = app.add_subcommand("compare", "run one scenario under several variants");
  cmp->add_option("scenario", path, "scenario file")->required();
  cmp->add_option("--variants", variants, "comma-separated variant names")->required()->delimiter(',');
  cmp->add_option("--out", out, "CSV output file (default stdout)");

  auto* val = app.add_subcommand("validate", "parse and check a scenario");
  val->add_option("scenario", path, "scenario file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  wmac::Scenario sc;
  try {
    sc = wmac::load_scenario(path);
  } catch (const wmac::ScenarioError& e) {
    std::cerr << path << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }

  if (*val) {
    std::cout << path << ": ok (" << sc.nodes.size() << " nodes, " << sc.flows.size() << " flows)\n";
    return 0;
  }

  if (*run) {
    if (seed) sc.seed = *seed;
    std::ofstream tf;
    std::optional<wmac::StreamTrace> trace;
    if (!trace_path.empty()) {
      tf.open(trace_path);
      if (!tf) {
        std::cerr << "cannot write '" << trace_path << "'\n";
        return 1;
      }
      trace.emplace(tf);
    }
    const auto m = wmac::run_scenario(sc, trace ? &*trace : nullptr);
    return emit({m}, out);
  }

  std::vector<wmac::Variant> vs;
  try {
    for (const auto& v : variants) vs.push_back(wmac::parse_variant(v));
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
  return emit(wmac::compare(sc, vs), out);
}
