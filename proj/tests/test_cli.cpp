#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hitlab/cli/config.hpp"
#include "hitlab/cli/runner.hpp"
#include "hitlab/cli/svg.hpp"

using namespace hitlab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hitlab_test_" + name);
  fs::remove_all(p);
  return p;
}

bool mentions(const ParseOutcome& r, const std::string& needle) {
  for (const auto& e : r.errors) {
    if (e.find(needle) != std::string::npos) return true;
  }
  return false;
}

ExperimentConfig parsed(const std::string& text) {
  const auto r = parse_config(text);
  REQUIRE_MESSAGE(r.ok(), (r.errors.empty() ? "" : r.errors.front()));
  return *r.config;
}

std::string findings_of(const RunReport& r) { return r.findings.dump(); }

}  // namespace

TEST_CASE("minimal configs validate with defaults") {
  const auto cfg = parsed(R"({"kind": "gasket"})");
  CHECK(cfg.kind == Kind::gasket);
  CHECK(cfg.gasket == GasketParams{});
  CHECK(cfg.seed == 1);
  for (auto name : kKindNames) {
    CHECK(parse_config(R"({"kind": ")" + std::string(name) + R"("})").ok());
  }
}

TEST_CASE("configs round-trip through serialization") {
  ExperimentConfig cfg;
  cfg.seed = 18446744073709551615ull;
  cfg.parallelism = 3;
  cfg.output = "runs/x";
  cfg.plots = false;
  cfg.kind = Kind::barrier;
  cfg.barrier.sigma = 0.3;
  cfg.barrier.step = 1.0 / 3.0;
  cfg.barrier.lil_paths = 7;
  CHECK(parsed(to_json(cfg).dump()) == cfg);
  cfg.kind = Kind::gasket;
  cfg.barrier = {};
  cfg.gasket.solver = "lu";
  cfg.gasket.mc_walks = 5;
  CHECK(parsed(to_json(cfg).dump()) == cfg);
  cfg.kind = Kind::fbm_tip;
  cfg.gasket = {};
  cfg.fbm_tip.hurst = {0.25, 0.75};
  cfg.fbm_tip.steps = 1024;
  CHECK(parsed(to_json(cfg).dump()) == cfg);
  cfg.kind = Kind::curve;
  cfg.fbm_tip = {};
  cfg.curve.root = {-0.1, 0.2};
  cfg.curve.d_max = 9;
  CHECK(parsed(to_json(cfg).dump()) == cfg);
}

TEST_CASE("schema errors are listed exhaustively and name their fields") {
  auto r = parse_config(R"({"kind": "barrier", "barrier": {"sigma": -1}})");
  CHECK_FALSE(r.ok());
  CHECK(mentions(r, "barrier.sigma: must be > 0"));

  r = parse_config(R"({"kind": "barrier", "barrier": {"step": 20, "horizon": 10}})");
  CHECK(mentions(r, "barrier.step"));

  r = parse_config(R"({"kind": "sierpinski"})");
  CHECK(mentions(r, "valid kinds: barrier, gasket, fbm-tip, curve"));

  r = parse_config(R"({"kind": "gasket", "colour": "red", "gasket": {"n_max": 12, "solver": "qr", "nmax": 3}})");
  CHECK(r.errors.size() == 4);
  CHECK(mentions(r, "colour: unknown field"));
  CHECK(mentions(r, "gasket.nmax: unknown field"));
  CHECK(mentions(r, "gasket.n_max"));
  CHECK(mentions(r, "gasket.solver"));

  r = parse_config(R"({"kind": "gasket", "barrier": {}})");
  CHECK(mentions(r, "barrier: block does not match kind"));

  r = parse_config(R"({"kind": "fbm-tip", "fbm-tip": {"steps": 1000, "replicates": 10, "epsilons": [0.1, 0.2, 0.05]}})");
  CHECK(mentions(r, "fbm-tip.steps"));
  CHECK(mentions(r, "fbm-tip.replicates"));
  CHECK(mentions(r, "fbm-tip.epsilons"));

  r = parse_config(R"({"kind": "curve", "curve": {"root": [2, 0], "d_max": "deep"}})");
  CHECK(mentions(r, "curve.root"));
  CHECK(mentions(r, "curve.d_max: must be a non-negative integer"));
}

TEST_CASE("parse errors carry line and column") {
  const auto r = parse_config("{\"kind\": \"gasket\",\n  \"seed\": 3,\n  oops }");
  REQUIRE(r.errors.size() == 1);
  CHECK(r.errors[0].rfind("line 3, column 3", 0) == 0);
  const auto missing = load_config("/nonexistent/config.json");
  CHECK(mentions(missing, "cannot read"));
}

TEST_CASE("gasket run writes its report and files") {
  const auto dir = scratch("gasket");
  auto cfg = parsed(R"({"kind": "gasket", "gasket": {"n_max": 3, "heat_map_generation": 3, "mc_walks": 20000}})");
  cfg.output = dir.string();
  const auto report = run(cfg);
  CHECK(report.status == RunStatus::ok);
  CHECK(report.exit_code() == 0);
  const auto& table = report.findings["entropy_table"];
  REQUIRE(table.size() == 3);
  CHECK(table[0]["n"] == 1);
  CHECK(table[0]["entropy"].get<double>() == 1.0);
  CHECK(report.findings["heat_map"]["monte_carlo"]["within_bound"].get<bool>());
  for (const auto& f : report.files) CHECK(fs::exists(dir / f));
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "gasket_heat_map.svg"));

  std::ifstream in(dir / "report.json");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto doc = nlohmann::json::parse(ss.str());
  CHECK(doc["schema_version"] == kSchemaVersion);
  CHECK(doc["status"] == "ok");
  CHECK(doc["config"]["gasket"]["n_max"] == 3);

  const auto again = run(cfg);
  CHECK(findings_of(again) == findings_of(report));

  fs::remove(dir / "gasket_heat_map.svg");
  const auto redrawn = render_plots(dir);
  CHECK(fs::exists(dir / "gasket_heat_map.svg"));
  CHECK(redrawn.size() == 2);
}

TEST_CASE("metrics do not depend on parallelism") {
  const char* configs[] = {
      R"({"kind": "barrier", "barrier": {"horizon": 2, "step": 0.01, "hit_replicates": 500,
          "profile_replicates": 500, "lil_paths": 50}})",
      R"({"kind": "fbm-tip", "fbm-tip": {"hurst": [0.4, 0.5], "steps": 512, "horizon": 10, "replicates": 1000}})",
      R"({"kind": "curve", "curve": {"brownian_steps": 2000, "angle_samples": 1500, "d_max": 8}})",
      R"({"kind": "gasket", "gasket": {"n_max": 4, "random_subsets": 3}})",
  };
  int k = 0;
  for (const char* text : configs) {
    auto cfg = parsed(text);
    cfg.output = scratch("par" + std::to_string(k++)).string();
    cfg.parallelism = 1;
    const auto one = run(cfg);
    cfg.parallelism = 4;
    const auto four = run(cfg);
    CAPTURE(text);
    CHECK(one.status != RunStatus::runtime_error);
    CHECK(findings_of(one) == findings_of(four));
  }
}

TEST_CASE("failures still produce a report") {
  SUBCASE("unwritable output") {
    const auto base = scratch("blocked");
    fs::create_directories(base);
    std::ofstream(base / "file") << "x";
    auto cfg = parsed(R"({"kind": "gasket", "gasket": {"n_max": 2}})");
    cfg.output = (base / "file" / "sub").string();
    const auto r = run(cfg);
    CHECK(r.status == RunStatus::runtime_error);
    CHECK(r.exit_code() == 2);
    CHECK_FALSE(r.error.empty());
    CHECK(r.files.empty());
  }
  SUBCASE("runtime error inside a module") {
    const auto dir = scratch("badcurve");
    auto cfg = parsed(R"({"kind": "curve", "curve": {"curve": "file", "curve_file": "/nonexistent.csv"}})");
    cfg.output = dir.string();
    const auto r = run(cfg);
    CHECK(r.exit_code() == 2);
    CHECK(fs::exists(dir / "report.json"));
  }
  SUBCASE("insufficient data") {
    const auto dir = scratch("sparse");
    auto cfg = parsed(R"({"kind": "barrier", "barrier": {"c": 20, "horizon": 1, "step": 0.01,
        "hit_replicates": 100, "profile_replicates": 200, "lil_paths": 0}})");
    cfg.output = dir.string();
    const auto r = run(cfg);
    CHECK(r.status == RunStatus::insufficient_data);
    CHECK(r.exit_code() == 3);
    CHECK(r.findings["tau_profile"]["slope"].is_null());
  }
}

TEST_CASE("svg writers produce standalone documents") {
  const svg::Series s[] = {{"a", {1, 2, 3}, {1, 4, 9}, true, true}, {"b", {1, 2}, {0, -1}, false, true}};
  const auto chart = svg::line_chart({"t", "x", "y", true, true}, s);
  CHECK(chart.rfind("<svg", 0) == 0);
  CHECK(chart.find("</svg>") != std::string::npos);
  const double edges[] = {0, 1, 2};
  const double heights[] = {3, 5};
  CHECK(svg::histogram({"h", "x", "n", false, false}, edges, heights).find("<rect") != std::string::npos);
  const svg::Segment lines[] = {{0, 0, 1, 0}};
  const svg::Marker marks[] = {{0, 0, 0.5}, {1, 0, 1.0}};
  CHECK(svg::heat_map("m <&>", lines, marks).find("m &lt;&amp;&gt;") != std::string::npos);
}
