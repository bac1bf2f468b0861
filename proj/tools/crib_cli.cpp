#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <thread>

#include "crib/error.hpp"
#include "crib/scenario.hpp"

namespace {

enum Exit { kOk = 0, kAssertion = 1, kSchema = 2, kRuntime = 3 };

int run_command(const std::string& config_path, const std::optional<std::string>& out, unsigned threads) {
  const std::filesystem::path path(config_path);
  const nlohmann::json config = crib::load_config(path);
  crib::validate_config(config);
  const crib::ScenarioResult result = crib::run_scenario(config, threads, path.parent_path());
  const std::filesystem::path dir = crib::resolve_output_dir(config, out);
  crib::write_artifacts(result, dir);

  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& a : result.assertions)
    std::cout << (a.pass ? "PASS " : "FAIL ") << a.name << ": " << a.value << ' ' << a.op << ' ' << a.threshold
              << '\n';
  std::cout << result.scenario << ": " << (result.passed() ? "PASS" : "FAIL") << " (" << dir.string() << ")\n";
  return result.passed() ? kOk : kAssertion;
}

int compare_command(const std::string& a, const std::string& b, double tol) {
  const crib::CompareReport r = crib::compare_traces(crib::read_csv(a), crib::read_csv(b), tol);
  std::printf("fidelity %.12g\nmax_abs_deviation %.6g\noverlap_phase %.6g\n%s (1 - fidelity %.3g, tol %.3g)\n",
              r.fidelity, r.max_abs_deviation, r.overlap_phase, r.pass ? "PASS" : "FAIL", 1.0 - r.fidelity, tol);
  return r.pass ? kOk : kAssertion;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon-echo quantum memory simulator"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  auto* run = app.add_subcommand("run", "Run a scenario config and write its artifacts");
  run->add_option("config", config, "Scenario JSON")->required();
  run->add_option("--out", out, "Output directory");
  run->add_option("--threads", threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);

  std::string trace_a, trace_b;
  double tol = 1e-6;
  auto* cmp = app.add_subcommand("compare", "Compare two envelope CSV traces");
  cmp->add_option("a", trace_a, "First trace")->required();
  cmp->add_option("b", trace_b, "Second trace")->required();
  cmp->add_option("--tol", tol, "Allowed 1 - fidelity")->check(CLI::NonNegativeNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kSchema;
  }

  try {
    if (*run) return run_command(config, out.empty() ? std::nullopt : std::optional<std::string>(out), threads);
    return compare_command(trace_a, trace_b, tol);
  } catch (const crib::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == crib::ErrorKind::Schema ? kSchema : kRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
