// Runs the shipped scenario configs and prints one PASS/FAIL line per acceptance criterion.
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "crib/error.hpp"
#include "crib/scenario.hpp"

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Run {
  crib::ScenarioResult result;
  double seconds = 0.0;
  std::string error;
};

Run run_config(const std::string& name, unsigned threads) {
  Run run;
  const fs::path path = fs::path(CRIB_CONFIG_DIR) / (name + ".json");
  const auto start = std::chrono::steady_clock::now();
  try {
    const nlohmann::json config = crib::load_config(path);
    run.result = crib::run_scenario(config, threads, path.parent_path());
  } catch (const std::exception& e) {
    run.error = e.what();
  }
  run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return run;
}

bool ok(const Run& r) { return r.error.empty() && r.result.passed(); }

std::string failed_assertions(const Run& r) {
  if (!r.error.empty()) return " error: " + r.error;
  std::string s;
  for (const auto& a : r.result.assertions)
    if (!a.pass) s += " [" + a.name + "]";
  return s;
}

double num(const Run& r, const char* key) {
  const auto& m = r.result.metrics;
  return m.contains(key) && m[key].is_number() ? m[key].get<double>() : -1.0;
}

struct Line {
  int id;
  bool pass;
  std::string detail;
};

}  // namespace

int main() {
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  std::map<std::string, Run> runs;
  for (const char* name : {"c1_ideal_map", "c2_packet_order", "c3_depth_convergence", "c4_oracle", "c5a_no_inversion",
                           "c5b_delay_fringe", "c6_unitarity", "c7_timebin", "c8_interferometer",
                           "c9_efficiency_law"}) {
    runs[name] = run_config(name, threads);
    std::printf("  ran %-22s %7.2f s%s\n", name, runs[name].seconds, ok(runs[name]) ? "" : "  (assertions failed)");
  }

  std::vector<Line> lines;
  char buf[512];
  auto timed = [&](int id, std::initializer_list<const char*> names, double limit, const std::string& detail) {
    bool pass = true;
    double seconds = 0.0;
    std::string why;
    for (const char* n : names) {
      pass = pass && ok(runs[n]);
      seconds += runs[n].seconds;
      why += failed_assertions(runs[n]);
    }
    const bool fast = limit <= 0.0 || seconds < limit;
    std::snprintf(buf, sizeof buf, "%s; runtime %.2f s", detail.c_str(), seconds);
    std::string d = buf;
    if (limit > 0.0) {
      std::snprintf(buf, sizeof buf, " (limit %.0f s)", limit);
      d += buf;
    }
    lines.push_back({id, pass && fast, d + why});
  };

  const Run& c1 = runs["c1_ideal_map"];
  std::snprintf(buf, sizeof buf, "ideal channel: %g trials, min fidelity %.17g, max energy error %.3g",
                num(c1, "trials"), num(c1, "min_fidelity"), num(c1, "max_energy_error"));
  timed(1, {"c1_ideal_map"}, 1.0, buf);

  const Run& c2 = runs["c2_packet_order"];
  std::snprintf(buf, sizeof buf, "packet order/phase at d=30: efficiency %.6f, fidelity vs ideal %.9f",
                num(c2, "efficiency"), num(c2, "fidelity_vs_ideal"));
  timed(2, {"c2_packet_order"}, 60.0, buf);

  const Run& c3 = runs["c3_depth_convergence"];
  std::snprintf(buf, sizeof buf, "convergence: efficiency %.12f, fidelity %.12f at d=30, monotone %s/%s",
                num(c3, "final_efficiency"), num(c3, "final_fidelity"),
                c3.result.metrics.value("monotone_efficiency", false) ? "yes" : "no",
                c3.result.metrics.value("monotone_fidelity", false) ? "yes" : "no");
  timed(3, {"c3_depth_convergence"}, 300.0, buf);

  const Run& c4 = runs["c4_oracle"];
  std::string orders;
  if (c4.result.metrics.contains("reversal"))
    for (const auto& o : c4.result.metrics["reversal"]["measured_orders"]) {
      std::snprintf(buf, sizeof buf, "%s%.3f", orders.empty() ? "" : ", ", o.get<double>());
      orders += buf;
    }
  std::snprintf(buf, sizeof buf,
                "oracle vs solver at d=5: fidelity %.6f, efficiency difference %.2e; reversal order [%s]",
                num(c4, "echo_fidelity"), num(c4, "efficiency_difference"), orders.c_str());
  timed(4, {"c4_oracle"}, 600.0, buf);

  const Run& c5a = runs["c5a_no_inversion"];
  const Run& c5b = runs["c5b_delay_fringe"];
  std::snprintf(buf, sizeof buf, "no inversion efficiency %.3g; delay-line central spread %.3g",
                num(c5a, "efficiency"), num(c5b, "central_spread"));
  timed(5, {"c5a_no_inversion", "c5b_delay_fringe"}, 120.0, buf);

  // Ledger: worst energy residual over every solver run, worst norm drift over every oracle run.
  double ledger = 0.0, norm = 0.0;
  bool have_ledger = false;
  for (const auto& [name, run] : runs) {
    const auto& m = run.result.metrics;
    for (const char* k : {"max_ledger_residual", "solver_max_ledger_residual"})
      if (m.contains(k)) {
        ledger = std::max(ledger, m[k].get<double>());
        have_ledger = true;
      }
    if (m.contains("oracle_max_norm_error")) norm = std::max(norm, m["oracle_max_norm_error"].get<double>());
    if (m.contains("oracle_rows"))
      for (const auto& row : m["oracle_rows"]) norm = std::max(norm, row["oracle_norm_error"].get<double>());
  }
  {
    std::snprintf(buf, sizeof buf, "worst solver ledger residual %.3g (<= 1e-6), worst oracle norm error %.3g (<= 1e-10)",
                  ledger, norm);
    const bool pass = ok(runs["c6_unitarity"]) && have_ledger && ledger <= 1e-6 && norm <= 1e-10;
    lines.push_back({6, pass, std::string(buf) + failed_assertions(runs["c6_unitarity"])});
  }

  const Run& c7 = runs["c7_timebin"];
  std::snprintf(buf, sizeof buf, "time-bin swap: ideal error %.3g, solver r/phi error %.3g/%.3g, global phase error %.3g",
                num(c7, "ideal_max_error"), num(c7, "solver_r_error"), num(c7, "solver_phi_error"),
                num(c7, "solver_global_phase_error"));
  timed(7, {"c7_timebin"}, 120.0, buf);

  const Run& c8 = runs["c8_interferometer"];
  std::snprintf(buf, sizeof buf, "fringe: visibility %.9f, period %.9f, null ratio %.3g, blocking error %.3g",
                num(c8, "visibility"), num(c8, "period"), num(c8, "null_ratio"), num(c8, "blocking_error"));
  timed(8, {"c8_interferometer"}, 120.0, buf);

  const Run& c9 = runs["c9_efficiency_law"];
  std::snprintf(buf, sizeof buf,
                "efficiency law: solver vs closed form %.3g, oracle vs closed form %.3g (relative, <= 0.02)",
                num(c9, "max_closed_form_rel_error"), num(c9, "max_oracle_closed_form_rel_error"));
  timed(9, {"c9_efficiency_law"}, 0.0, buf);

  int failures = 0;
  for (const auto& l : lines) {
    std::printf("%s criterion %d: %s\n", l.pass ? "PASS" : "FAIL", l.id, l.detail.c_str());
    failures += l.pass ? 0 : 1;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(lines.size()) - failures, lines.size());
  return failures == 0 ? 0 : 1;
}
