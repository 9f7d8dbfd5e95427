#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>

#include "quickseek/run_config.hpp"

using namespace quickseek;
namespace fs = std::filesystem;

namespace {

std::string write_temp_config(const std::string& name, const std::string& text) {
  const fs::path dir = fs::temp_directory_path() / "quickseek_test";
  fs::create_directories(dir);
  const fs::path file = dir / name;
  std::ofstream out(file);
  out << text;
  return file.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("presets parse and validate") {
  for (const std::string& name : preset_names()) {
    const RunConfig cfg = load_config("", name, {});
    CHECK(!cfg.config_hash.empty());
  }
  CHECK_THROWS_AS(load_config("", "nope", {}), ConfigError);
}

TEST_CASE("validation errors carry precise locations") {
  const std::string bad_strategy = write_temp_config("bad_strategy.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 3.0},
    "strategy": "magic"
  })");
  try {
    load_config(bad_strategy, "", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("valid: single, low_complexity") != std::string::npos);
  }

  const std::string bad_family = write_temp_config("bad_family.json", R"({
    "model": {"family": "cauchy", "var0": 1.0, "var1": 3.0}
  })");
  try {
    load_config(bad_family, "", {});
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("model.family") != std::string::npos);
  }

  const std::string empty_sweep = write_temp_config("empty_sweep.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 3.0},
    "sweep": {"axis": "snr", "values": []}
  })");
  CHECK_THROWS_AS(load_config(empty_sweep, "", {}), ConfigError);

  const std::string unknown_key = write_temp_config("unknown_key.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 3.0},
    "trails": 100
  })");
  CHECK_THROWS_AS(load_config(unknown_key, "", {}), ConfigError);
}

TEST_CASE("simulate writes a schema-versioned summary and trials csv") {
  const std::string cfg_path = write_temp_config("sim.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 16.849},
    "pi0": 0.05,
    "zeta": 0.1,
    "strategy": "single",
    "trials": 300,
    "seed": 11,
    "write_trials": true
  })");
  const RunConfig cfg = load_config(cfg_path, "", {});
  const fs::path out = fs::temp_directory_path() / "quickseek_test" / "sim_out";
  fs::remove_all(out);
  CHECK(run_simulate(cfg, out.string()) == 0);

  const nlohmann::json summary = nlohmann::json::parse(slurp((out / "summary.json").string()));
  CHECK(summary["schema"] == "quickseek-summary/1");
  CHECK(summary["version"] == kToolVersion);
  CHECK(summary["config_hash"] == cfg.config_hash);
  CHECK(summary["summary"]["n_trials"] == 300);
  CHECK(summary["summary"]["asd"].get<double>() > 0.0);

  const std::string trials = slurp((out / "trials.csv").string());
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 301);  // header + rows
  CHECK(trials.rfind("trial,seed,tau0,tau1,n_switches,claim_correct,truncated", 0) == 0);
}

TEST_CASE("simulate outputs are byte-identical across thread counts") {
  const std::string cfg_path = write_temp_config("det.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 16.849},
    "pi0": 0.05,
    "zeta": 0.1,
    "strategy": "low_complexity",
    "trials": 500,
    "seed": 21,
    "write_trials": true
  })");
  const fs::path base = fs::temp_directory_path() / "quickseek_test";

  CliOverrides one;
  one.threads = 1;
  const RunConfig cfg1 = load_config(cfg_path, "", one);
  const fs::path out1 = base / "det1";
  fs::remove_all(out1);
  REQUIRE(run_simulate(cfg1, out1.string()) == 0);

  CliOverrides four;
  four.threads = 4;
  const RunConfig cfg4 = load_config(cfg_path, "", four);
  const fs::path out4 = base / "det4";
  fs::remove_all(out4);
  REQUIRE(run_simulate(cfg4, out4.string()) == 0);

  CHECK(slurp((out1 / "summary.json").string()) == slurp((out4 / "summary.json").string()));
  CHECK(slurp((out1 / "trials.csv").string()) == slurp((out4 / "trials.csv").string()));
}

TEST_CASE("dp-solve dumps surfaces, header, and reloadable masks") {
  const std::string cfg_path = write_temp_config("dp.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 3.0},
    "pi0": 0.05,
    "dp": {"cost": 0.01, "scan_resolution": 41, "refine_resolution": 17,
           "quad_points": 65, "tol": 1e-6, "max_iter": 4000, "region_tol": 1e-6}
  })");
  const RunConfig cfg = load_config(cfg_path, "", {});
  const fs::path out = fs::temp_directory_path() / "quickseek_test" / "dp_out";
  fs::remove_all(out);
  CHECK(run_dp_solve(cfg, out.string()) == 0);

  const nlohmann::json header = nlohmann::json::parse(slurp((out / "dp_header.json").string()));
  CHECK(header["schema"] == "quickseek-dp/1");
  const double phi_s = header["phi_s"].get<double>();
  CHECK(phi_s > 0.0);
  CHECK(phi_s < 1.0);
  CHECK(header["scan_residual"].get<double>() < 1e-6);

  // reload the dump and recompute region membership from the surfaces
  const std::string u_csv = slurp((out / "u_scan.csv").string());
  const std::string v_csv = slurp((out / "v_slice.csv").string());
  const std::string phi_csv = slurp((out / "phi_c.csv").string());
  auto parse_csv = [](const std::string& text) {
    std::vector<std::array<double, 5>> rows;
    std::size_t pos = text.find('\n') + 1;  // skip header
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string::npos) break;
      const std::string line = text.substr(pos, end - pos);
      std::array<double, 5> row{};
      std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &row[0], &row[1], &row[2],
                  &row[3], &row[4]);
      rows.push_back(row);
      pos = end + 1;
    }
    return rows;
  };
  const auto u_rows = parse_csv(u_csv);
  const auto v_rows = parse_csv(v_csv);
  const auto phi_rows = parse_csv(phi_csv);
  REQUIRE(u_rows.size() == v_rows.size());
  REQUIRE(u_rows.size() == phi_rows.size());
  const double region_tol = header["region_tol"].get<double>();
  for (std::size_t i = 0; i < u_rows.size(); ++i) {
    const bool in_tau = v_rows[i][2] - u_rows[i][2] <= region_tol;
    const bool in_phi = phi_rows[i][2] > phi_s;
    CHECK(static_cast<bool>(u_rows[i][3]) == in_tau);
    CHECK(static_cast<bool>(u_rows[i][4]) == in_phi);
  }
  // v(0,0) = 1 at the origin node
  bool found_origin = false;
  for (const auto& row : v_rows)
    if (row[0] == 0.0 && row[1] == 0.0) {
      CHECK(row[2] == 1.0);
      found_origin = true;
    }
  CHECK(found_origin);
}

TEST_CASE("sweep emits one row per cell and strategy") {
  const std::string cfg_path = write_temp_config("sweep.json", R"({
    "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 3.0},
    "pi0": 0.05,
    "zeta": 0.1,
    "strategies": ["single", "low_complexity"],
    "trials": 300,
    "seed": 3,
    "sweep": {"axis": "snr", "values": [8, 12]}
  })");
  const RunConfig cfg = load_config(cfg_path, "", {});
  const fs::path out = fs::temp_directory_path() / "quickseek_test" / "sweep_out";
  fs::remove_all(out);
  CHECK(run_sweep(cfg, out.string()) == 0);
  const std::string csv = slurp((out / "sweep.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 2);
}

TEST_CASE("ratio map runs the kappa axis") {
  const std::string cfg_path = write_temp_config("ratio.json", R"({
    "model": {"family": "gamma", "shape0": 1.0, "shape1": 4.0, "scale": 2.0},
    "pi0": 0.05,
    "zeta": 0.05,
    "trials": 400,
    "seed": 5,
    "sweep": {"axis": "kappa", "values": [8, 16]}
  })");
  const RunConfig cfg = load_config(cfg_path, "", {});
  const fs::path out = fs::temp_directory_path() / "quickseek_test" / "ratio_out";
  fs::remove_all(out);
  CHECK(run_ratio_map(cfg, out.string()) == 0);
  const std::string csv = slurp((out / "ratio_map.csv").string());
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2);
  // stronger separation gives the smaller ratio on this axis
  const nlohmann::json meta =
      nlohmann::json::parse(slurp((out / "ratio_map_summary.json").string()));
  CHECK(meta["schema"] == "quickseek-ratio-map/1");
}
