#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include <nlohmann/json.hpp>

#include "smcf/errors.hpp"
#include "smcf/io.hpp"
#include "smcf/scenario.hpp"

using namespace smcf;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("smcf_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

json base_flow() {
  return json{{"scenario", "flow_1d"},
              {"initial_data", {{"family", "bump"}, {"height", 0.5}, {"width", 2.0}}},
              {"domain", {{"lo", -10.0}, {"hi", 10.0}}},
              {"solver", {{"h", 0.1}, {"t_end", 0.5}}}};
}

std::string field_of(const json& j) {
  try {
    (void)parse_scenario(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("number formatting round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 6.02214076e23}) {
    CHECK(std::stod(format_double(x)) == x);
  }
  CHECK(snapshot_filename(1.5) == "t1.500000.csv");
  CHECK(snapshot_filename(0.0) == "t0.000000.csv");
}

TEST_CASE("snapshot and diagnostics CSV round trips") {
  const fs::path dir = scratch("csv");
  Field f = make_field(FieldKind::radial, 0.0, 2.0, 0.1, BoundaryCondition::axis_symmetry,
                       BoundaryCondition::dirichlet_zero);
  for (std::size_t i = 0; i < f.size(); ++i) f.values[i] = std::sin(f.nodes[i]) / 3.0;
  write_snapshot_csv(dir / "s.csv", f);
  const SnapshotTable t = read_snapshot_csv(dir / "s.csv");
  CHECK(t.coordinate == "r");
  CHECK(t.nodes == f.nodes);
  CHECK(t.values == f.values);

  std::vector<DiagnosticsRecord> recs(3);
  for (int k = 0; k < 3; ++k) {
    recs[k].t = 0.1 * k;
    recs[k].sup_u = 1.0 / (k + 3.0);
    recs[k].grad_max = 0.3;
    recs[k].l2 = std::sqrt(2.0);
    recs[k].h1_grad = M_PI;
  }
  recs[1].sup_phi = 2.0 / 3.0;
  recs[2].barrier_margin = -1e-20;
  write_diagnostics_csv(dir / "d.csv", recs);
  const auto back = read_diagnostics_csv(dir / "d.csv");
  REQUIRE(back.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(back[k].t == recs[k].t);
    CHECK(back[k].sup_u == recs[k].sup_u);
    CHECK(back[k].h1_grad == recs[k].h1_grad);
    CHECK(back[k].sup_phi == recs[k].sup_phi);
    CHECK(back[k].barrier_margin == recs[k].barrier_margin);
  }
  std::ifstream in(dir / "d.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "t,sup_u,grad_max,l2,h1_grad,sup_phi,barrier_margin");
  CHECK_THROWS(read_snapshot_csv(dir / "missing.csv"));
}

TEST_CASE("trajectory layout") {
  const fs::path dir = scratch("traj");
  FlowTrajectory tr;
  Field f = make_field(FieldKind::line, -1.0, 1.0, 0.5, BoundaryCondition::dirichlet_zero,
                       BoundaryCondition::dirichlet_zero);
  tr.snapshots = {{0.0, f}, {0.25, f}};
  tr.records.resize(2);
  tr.records[1].t = 0.25;
  write_trajectory(dir, tr);
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "snapshots" / "t0.000000.csv"));
  CHECK(fs::exists(dir / "snapshots" / "t0.250000.csv"));
  CHECK(read_snapshot_csv(dir / "snapshots" / "t0.250000.csv").coordinate == "x");
}

TEST_CASE("scenario parsing: valid configurations") {
  const ScenarioConfig c = parse_scenario(base_flow());
  CHECK(c.scenario == ScenarioKind::flow_1d);
  CHECK(c.solver.h == 0.1);
  CHECK(c.solver.cfl_safety == 0.9);
  CHECK(c.domain->lo == -10.0);
  CHECK(c.initial_data.family == ProfileFamily::bump);

  json d{{"scenario", "dirichlet"},
         {"metric", {{"family", "conformal_power"}, {"n", 3}, {"a", 0.5}, {"tau", 1.0}}},
         {"initial_data", {{"family", "bump"}}},
         {"solver", {{"h", 0.1}, {"t_end", 1.0}}},
         {"dirichlet", {{"R", 4.0}}}};
  const ScenarioConfig cd = parse_scenario(d);
  CHECK(cd.R == 4.0);
  CHECK(cd.r_in == 1.0);
  CHECK(cd.metric.build().family() == MetricFamily::conformal_power);

  json b{{"scenario", "barrier_verify"}, {"metric", {{"n", 3}}}, {"barrier", {{"r1_min", 10}, {"h", 2}}}};
  CHECK(parse_scenario(b).barrier.h == 2.0);
}

TEST_CASE("scenario parsing: errors name the field") {
  json j = base_flow();
  j["solver"].erase("h");
  CHECK(field_of(j) == "solver.h");
  j = base_flow();
  j["solver"]["h"] = -1.0;
  CHECK(field_of(j) == "solver.h");
  j = base_flow();
  j["solver"]["t_end"] = "soon";
  CHECK(field_of(j) == "solver.t_end");
  j = base_flow();
  j["initial_data"].erase("family");
  CHECK(field_of(j) == "initial_data.family");
  j = base_flow();
  j["initial_data"]["family"] = "sinc";
  CHECK(field_of(j) == "initial_data.family");
  j = base_flow();
  j["solver"]["cfl"] = 0.5;
  CHECK(field_of(j) == "solver.cfl");
  j = base_flow();
  j["colour"] = "red";
  CHECK(field_of(j) == "colour");
  j = base_flow();
  j["scenario"] = "warp";
  CHECK(field_of(j) == "scenario");
  j = base_flow();
  j["domain"]["left"] = "periodic";
  CHECK(field_of(j) == "domain.left");
  j = base_flow();
  j["metric"] = {{"family", "conformal_power"}, {"n", 1}, {"a", 1.0}};
  CHECK(field_of(j) == "metric");
  j = base_flow();
  j["metric"] = {{"family", "conformal_power"}, {"n", 3}, {"a", -1.0}};
  CHECK(field_of(j) == "metric");
}

TEST_CASE("scenario runs write outputs") {
  const fs::path dir = scratch("run");
  json j = base_flow();
  j["solver"]["snapshot_every"] = 0.25;
  ScenarioConfig c = parse_scenario(j);
  RunOptions opts;
  opts.output_dir = dir.string();
  const ScenarioOutcome out = run_scenario(c, opts);
  CHECK(out.exit_code == kExitOk);
  CHECK(fs::exists(dir / "summary.json"));
  CHECK(fs::exists(dir / "diagnostics.csv"));
  CHECK(fs::exists(dir / "snapshots" / "t0.500000.csv"));
  const json s = read_json(dir / "summary.json");
  CHECK(s["checks"]["max_principle"]["pass"] == true);
}

TEST_CASE("sample configurations parse") {
  int seen = 0;
  for (const auto& entry : fs::directory_iterator(SMCF_CONFIG_DIR)) {
    if (entry.path().extension() != ".json" || entry.path().filename() == "schema.json") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(load_scenario(entry.path()));
    ++seen;
  }
  CHECK(seen >= 8);
}

TEST_CASE("no_lift_off defaults to a reflecting inner radius") {
  const ScenarioConfig c = load_scenario(fs::path(SMCF_CONFIG_DIR) / "no_lift_off.json");
  REQUIRE(c.domain.has_value());
  CHECK(c.domain->lo == 1.0);
  CHECK(c.domain->left == BoundaryCondition::reflecting);
  CHECK(c.diagnostics.barrier_margin);
}
