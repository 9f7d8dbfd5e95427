#include "quickseek/run_config.hpp"

namespace quickseek {

namespace {

// ASD vs SNR at pi0 = 0.05, FIP calibrated to 0.1.
const char* kTable1 = R"json({
  "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 2.0},
  "pi0": 0.05,
  "zeta": 0.1,
  "strategies": ["optimal", "low_complexity", "single"],
  "trials": 10000,
  "seed": 1,
  "calibrate": {"target_fip": 0.1, "tolerance": 0.01, "trials_per_probe": 4000, "max_probes": 24},
  "dp": {"cost": 0.01, "scan_resolution": 201, "refine_resolution": 61, "quad_points": 129, "tol": 1e-6, "max_iter": 4000, "region_tol": 1e-6},
  "sweep": {"axis": "snr", "values": [4, 6, 8, 10, 12, 14, 16]}
})json";

// ASD vs prior at SNR = 12 dB (var1 = 1 + 10^1.2), FIP calibrated to 0.1.
const char* kTable2 = R"json({
  "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 16.849},
  "pi0": 0.05,
  "zeta": 0.1,
  "strategies": ["optimal", "low_complexity", "single"],
  "trials": 10000,
  "seed": 1,
  "calibrate": {"target_fip": 0.1, "tolerance": 0.01, "trials_per_probe": 4000, "max_probes": 24},
  "dp": {"cost": 0.01, "scan_resolution": 201, "refine_resolution": 61, "quad_points": 129, "tol": 1e-6, "max_iter": 8000, "region_tol": 1e-6},
  "sweep": {"axis": "pi0", "values": [0.5, 0.3, 0.2, 0.1, 0.05, 0.01]}
})json";

// Value surfaces and decision regions for the variance pair (1, 3).
const char* kFig24 = R"json({
  "model": {"family": "gaussian_variance", "var0": 1.0, "var1": 3.0},
  "pi0": 0.05,
  "dp": {"cost": 0.01, "scan_resolution": 201, "refine_resolution": 61, "quad_points": 129, "tol": 1e-6, "max_iter": 4000, "region_tol": 1e-6}
})json";

// Delay-ratio map over the Gaussian mean/sd plane.
const char* kFig7 = R"json({
  "model": {"family": "gaussian_mean_shift", "mu0": 0.0, "mu1": 4.0, "sigma": 1.0},
  "pi0": 0.05,
  "zeta": 0.01,
  "trials": 10000,
  "seed": 1,
  "sweep": {"axis": "mu_sigma_grid", "mu": [1, 3, 5, 8, 11, 15], "sigma": [1, 2, 3, 4]}
})json";

// Delay ratio for the gamma family as the f1 shape grows.
const char* kFig8 = R"json({
  "model": {"family": "gamma", "shape0": 1.0, "shape1": 4.0, "scale": 2.0},
  "pi0": 0.05,
  "zeta": 0.01,
  "trials": 10000,
  "seed": 1,
  "sweep": {"axis": "kappa", "values": [2, 4, 6, 8, 10, 12, 14, 16]}
})json";

}  // namespace

const char* preset_text(const std::string& name) {
  if (name == "table1") return kTable1;
  if (name == "table2") return kTable2;
  if (name == "fig2-4") return kFig24;
  if (name == "fig7") return kFig7;
  if (name == "fig8") return kFig8;
  return nullptr;
}

std::vector<std::string> preset_names() {
  return {"table1", "table2", "fig2-4", "fig7", "fig8"};
}

}  // namespace quickseek
