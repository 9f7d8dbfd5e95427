#pragma once

#include <Eigen/Core>

#include <memory>
#include <random>
#include <stdexcept>
#include <vector>

#include "quickseek/belief.hpp"
#include "quickseek/models.hpp"
#include "quickseek/simplex_grid.hpp"
#include "quickseek/trial_record.hpp"

namespace quickseek {

// Observation atoms for the refinement DP: quadrature nodes (or discrete
// support points) with f0/f1 evaluated there. Expectations against the
// predictive density become weighted sums.
struct ObsModel {
  Eigen::ArrayXd x, f0, f1, w;
};

// Same for the scanning DP over mixed observations.
struct MixObsModel {
  Eigen::ArrayXd x, g0, g1, g2, w;
};

struct TwoPointModel {
  double f0_head = 0.25;  // P0(head)
  double f1_head = 0.75;  // P1(head)
};

ObsModel build_obs_model(const ModelPair& m, int quad_points);
ObsModel build_obs_model(const TwoPointModel& m);
MixObsModel build_mix_obs_model(const ModelPair& m, int quad_points);

enum class SurfaceKind { VRefine, VSlice, UScan, PhiC };

struct ValueSurface {
  std::shared_ptr<const SimplexGrid> grid;
  Eigen::ArrayXd values;
  SurfaceKind kind = SurfaceKind::VRefine;
  double phi_s = 0.0;    // scan surfaces only
  double residual = 0.0;
  int sweeps = 0;

  double at(const double* bary_point) const {
    return grid->interpolate(values, bary_point);
  }
};

struct PolicyRegions {
  std::vector<std::uint8_t> r_tau;  // stop scanning
  std::vector<std::uint8_t> r_phi;  // switch sequences
};

struct DpParams {
  int scan_resolution = 201;
  int refine_resolution = 61;
  int quad_points = 129;
  double tol = 1e-6;
  int max_iter = 2000;
  double region_tol = 1e-6;
};

class DpNotConverged : public std::runtime_error {
 public:
  DpNotConverged(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Sparse row-compressed expectation operator: (R v)_i ~ E[v(next belief) | node i].
struct Csr {
  std::vector<std::uint32_t> offsets;
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
  void multiply(const Eigen::ArrayXd& x, Eigen::ArrayXd& out) const;
  double row_dot(std::uint32_t row, const Eigen::ArrayXd& x) const;
};

// Transition structure is independent of the sampling cost c, so one build
// serves every cost probe during calibration.
struct RefineOperator {
  std::shared_ptr<const SimplexGrid> grid;
  Csr rows;
  Eigen::ArrayXd stop_cost;  // 1 - max(q1, q2) per node
};

struct ScanOperator {
  std::shared_ptr<const SimplexGrid> grid;
  Csr rows;
  std::vector<std::uint32_t> prior_cols;  // expectation row at the prior point
  std::vector<double> prior_vals;
  ScanBelief prior;
};

RefineOperator build_refine_operator(const ObsModel& obs, int resolution);
ScanOperator build_scan_operator(const MixObsModel& obs, int resolution,
                                 const ScanBelief& prior);

// Fixed point of V = min{1 - max(q1, q2), c + E[V | r]}, iterated from the
// stop cost; iterates are pointwise nonincreasing and bounded in [0, 1],
// both asserted every sweep.
ValueSurface refine_value_iteration(const RefineOperator& op, double c, double tol,
                                    int max_iter);
// Exactly `sweeps` applications of the same operator (finite horizon).
ValueSurface refine_value_steps(const RefineOperator& op, double c, int sweeps);

ValueSurface refine_value_iteration(const ModelPair& model, double c,
                                    const DpParams& params);

// v(p11, pmix) = V(p11, pmix/2, pmix/2) sampled on the scanning grid.
ValueSurface extract_v_slice(const ValueSurface& v_refine, int scan_resolution);

struct ScanSolution {
  ValueSurface u;      // U surface, carries phi_s
  ValueSurface phi_c;  // continuation expectation of the converged U
  double phi_s = 0.0;
};

ScanSolution scan_value_iteration(const ScanOperator& op, const ValueSurface& v_slice,
                                  double c, double tol, int max_iter);

PolicyRegions extract_regions(const ValueSurface& u, const ValueSurface& v,
                              const ValueSurface& phi_c, double phi_s, double region_tol);

// Connected components of a node mask under the triangular-lattice adjacency.
int count_components(const SimplexGrid& grid, const std::vector<std::uint8_t>& mask);

enum class Claim { S1, S2 };
// Pick the candidate with the larger posterior; ties go to s2.
Claim optimal_terminal_decision(const QStats& q);

struct OptimalPolicy {
  ModelPair model;
  double pi0 = 0.05;
  double c = 0.01;
  double region_tol = 1e-6;
  ScanBelief prior;
  ValueSurface v_refine, v_slice, u_scan, phi_c;
  double phi_s = 0.0;
  ObsModel refine_obs;
  std::uint64_t sample_cap = kDefaultSampleCap;
};

OptimalPolicy solve_optimal_policy(const ModelPair& model, double pi0, double c,
                                   const DpParams& params,
                                   std::uint64_t sample_cap = kDefaultSampleCap);

TrialRecord run_optimal_trial(const OptimalPolicy& policy, std::mt19937_64& rng);

// Expected next-step value c + E[V(r') | r] under the policy's quadrature.
double refine_continuation(const OptimalPolicy& policy, const RefineBelief& r);

// Exact backward induction on the two-point observation tree; horizon <= 6.
double finite_horizon_oracle(const TwoPointModel& toy, double c, int horizon,
                             const RefineBelief& start);

}  // namespace quickseek
