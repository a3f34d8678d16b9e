// Command line entry point: simulate, verify, sweep.

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "smcf/errors.hpp"
#include "smcf/io.hpp"
#include "smcf/scenario.hpp"
#include "smcf/verify.hpp"

namespace {

using namespace smcf;

struct GlobalFlags {
  std::string output_dir;
  int workers = 1;
  std::uint64_t seed = 20240601;
  bool strict = false;

  RunOptions options() const {
    RunOptions o;
    if (!output_dir.empty()) o.output_dir = output_dir;
    o.workers = workers;
    o.seed = seed;
    o.strict = strict;
    return o;
  }
};

template <class T>
std::optional<std::vector<T>> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) {
      T v{};
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
      if (ec != std::errc() || ptr != item.data() + item.size()) {
        throw ConfigError(flag, fmt::format("cannot parse '{}'", item));
      }
      out.push_back(v);
    }
    start = comma + 1;
  }
  return out;
}

void report(const ScenarioOutcome& o) {
  for (const auto& f : o.failures) std::cerr << "check failed: " << f << '\n';
  for (const auto& w : o.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << fmt::format("exit {}\n", o.exit_code);
}

template <class Body>
int guarded(Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kExitConfig;
  } catch (const SpacelikeViolation& e) {
    std::cerr << "spacelike violation: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

int run_verify(const GlobalFlags& g, const std::optional<std::string>& dims,
               const std::optional<std::string>& cs, const std::optional<std::string>& mus,
               const std::optional<std::string>& t0s, std::optional<int> samples,
               const std::string& fault) {
  VerifySweep sweep;
  if (dims) sweep.dims = *parse_list<int>(*dims, "--dims");
  if (cs) sweep.c_values = *parse_list<double>(*cs, "--c-values");
  if (mus) sweep.mu_values = *parse_list<double>(*mus, "--mu-values");
  if (t0s) sweep.t0_values = *parse_list<double>(*t0s, "--t0-values");
  if (samples) sweep.random_points = *samples;
  try {
    validate_sweep(sweep);
  } catch (const DomainError& e) {
    std::cerr << "nothing to verify: " << e.what() << '\n';
    return kExitConfig;
  }
  const auto results = run_identity_suite(sweep, g.seed, fault);
  bool ok = true;
  std::cout << fmt::format("{:<28} {:>12} {:>10}  {}\n", "identity", "worst", "tolerance", "status");
  for (const auto& r : results) {
    std::cout << fmt::format("{:<28} {:>12.4e} {:>10.1e}  {}\n", r.name, r.worst, r.tolerance,
                             r.pass ? "PASS" : "FAIL");
    if (!r.pass) {
      ok = false;
      std::cerr << fmt::format("failed identity {}: worst {} ({})\n", r.name, r.worst, r.detail);
    }
  }
  if (!g.output_dir.empty()) {
    std::filesystem::create_directories(g.output_dir);
    write_json(std::filesystem::path(g.output_dir) / "verify.json", nlohmann::json(results));
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spacelike mean curvature flow laboratory"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--output-dir", g.output_dir, "Directory for artifacts")->capture_default_str();
  app.add_option("--workers", g.workers, "Parallel runs for sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "Seed for randomized sample points");
  app.add_flag("--strict", g.strict, "Treat warnings as failures");

  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario from a JSON config");
  simulate->add_option("config", config_path, "Scenario config")->required();
  simulate->fallthrough();

  auto* verify = app.add_subcommand("verify", "Run the closed-form identity suite");
  std::optional<std::string> dims, cs, mus, t0s;
  std::optional<int> samples;
  std::string fault;
  verify->add_option("--dims", dims, "Dimensions, comma separated");
  verify->add_option("--c-values", cs, "Maximal-surface constants, comma separated");
  verify->add_option("--mu-values", mus, "Translating-barrier margins, comma separated");
  verify->add_option("--t0-values", t0s, "Translating-barrier offsets, comma separated");
  verify->add_option("--samples", samples, "Random points per identity");
  verify->add_option("--inject-fault", fault, "Sign-flip one identity (test mode)");
  verify->fallthrough();

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a JSON config");
  sweep->add_option("config", config_path, "Scenario config with a sweep section")->required();
  sweep->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitConfig;
  }

  if (simulate->parsed()) {
    return guarded([&] {
      const ScenarioConfig cfg = load_scenario(config_path);
      const ScenarioOutcome o = run_scenario(cfg, g.options());
      report(o);
      return o.exit_code;
    });
  }
  if (verify->parsed()) {
    return guarded([&] { return run_verify(g, dims, cs, mus, t0s, samples, fault); });
  }
  return guarded([&] {
    const ScenarioConfig cfg = load_scenario(config_path);
    const ScenarioOutcome o = run_sweep(cfg, g.options());
    report(o);
    return o.exit_code;
  });
}
