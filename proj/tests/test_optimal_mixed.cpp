#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "quickseek/harness.hpp"
#include "quickseek/optimal_mixed.hpp"
#include "quickseek/rng.hpp"

using namespace quickseek;

namespace {

DpParams small_params() {
  DpParams p;
  p.scan_resolution = 61;
  p.refine_resolution = 25;
  p.quad_points = 65;
  p.tol = 1e-6;
  p.max_iter = 4000;
  return p;
}

}  // namespace

TEST_CASE("terminal decision picks the larger posterior, ties to s2") {
  CHECK(optimal_terminal_decision({0.7, 0.3}) == Claim::S1);
  CHECK(optimal_terminal_decision({0.5, 0.5}) == Claim::S2);
  CHECK(optimal_terminal_decision({0.3, 0.7}) == Claim::S2);
}

TEST_CASE("finite-horizon oracle basics") {
  const TwoPointModel toy{0.25, 0.75};
  const RefineBelief start{0.25, 0.25, 0.25, 0.25};
  // forced stop at T = 0
  CHECK(finite_horizon_oracle(toy, 0.05, 0, start) == doctest::Approx(0.5).epsilon(1e-14));
  // continuing can never pay when c >= 1
  for (int horizon : {1, 2, 3, 6})
    CHECK(finite_horizon_oracle(toy, 1.5, horizon, start) ==
          doctest::Approx(0.5).epsilon(1e-14));
  CHECK_THROWS_AS(finite_horizon_oracle(toy, 0.05, 7, start), std::invalid_argument);
}

TEST_CASE("grid solver matches the enumeration oracle on two-point toys") {
  const TwoPointModel toy{0.25, 0.75};
  const double c = 0.05;
  const RefineBelief start{0.25, 0.25, 0.25, 0.25};
  const ObsModel obs = build_obs_model(toy);
  const RefineOperator op = build_refine_operator(obs, 201);
  for (int horizon = 0; horizon <= 3; ++horizon) {
    const double exact = finite_horizon_oracle(toy, c, horizon, start);
    const ValueSurface v = refine_value_steps(op, c, horizon);
    const double point[4] = {start.r11, start.r10, start.r01, start.r00};
    CHECK(v.at(point) == doctest::Approx(exact).epsilon(1e-3));
  }
}

TEST_CASE("refinement surface endpoints and bounds") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  const DpParams p = small_params();
  const ValueSurface v = refine_value_iteration(m, 0.01, p);
  const SimplexGrid& g = *v.grid;

  const int at_vertex[4] = {g.subdivisions(), 0, 0, 0};
  CHECK(v.values[g.index_of(at_vertex)] == 0.0);  // certain correct claim
  const int at_origin[4] = {0, 0, 0, 0};          // r00 = 1
  CHECK(v.values[g.index_of(at_origin)] == 1.0);

  CHECK(v.values.minCoeff() >= 0.0);
  CHECK(v.values.maxCoeff() <= 1.0);
  CHECK(v.residual < p.tol);
}

TEST_CASE("value iteration reports non-convergence with the residual") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  DpParams p = small_params();
  p.max_iter = 1;
  try {
    refine_value_iteration(m, 0.001, p);
    FAIL("expected DpNotConverged");
  } catch (const DpNotConverged& e) {
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("scan solution invariants") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  const DpParams p = small_params();
  const double c = 0.01;
  const OptimalPolicy pol = solve_optimal_policy(m, 0.05, c, p);

  const SimplexGrid& g = *pol.u_scan.grid;
  // v(1,0) = 0 and v(0,0) = 1 exactly at the grid nodes
  const int top[3] = {g.subdivisions(), 0, 0};
  const int origin[3] = {0, 0, 0};
  CHECK(pol.v_slice.values[g.index_of(top)] == 0.0);
  CHECK(pol.v_slice.values[g.index_of(origin)] == 1.0);
  CHECK(pol.u_scan.values[g.index_of(top)] == 0.0);

  // U <= v and U <= c + Phi_s pointwise (exact for the re-derived surface)
  CHECK((pol.u_scan.values <= pol.v_slice.values + 1e-15).all());
  CHECK((pol.u_scan.values <= c + pol.phi_s + 1e-15).all());
  CHECK(pol.u_scan.values.minCoeff() >= 0.0);

  // Phi_s equals the interpolated Phi_c at the prior within grid tolerance
  const double prior_pt[3] = {pol.prior.p11, pol.prior.pmix, pol.prior.p00};
  CHECK(pol.phi_c.at(prior_pt) == doctest::Approx(pol.phi_s).epsilon(2e-3));
}

TEST_CASE("empirical midpoint concavity at grid level") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  const DpParams p = small_params();
  const OptimalPolicy pol = solve_optimal_policy(m, 0.05, 0.01, p);
  std::mt19937_64 rng = make_stream(17, 0);
  std::uniform_int_distribution<std::uint32_t> pick(0, pol.u_scan.grid->node_count() - 1);

  auto check_surface = [&](const ValueSurface& s) {
    const auto& nodes = s.grid->nodes();
    const double slack = 2.0 * 4.0 / (s.grid->resolution() * s.grid->resolution());
    for (int t = 0; t < 1000; ++t) {
      const std::uint32_t a = pick(rng), b = pick(rng);
      double mid[4];
      for (int k = 0; k < s.grid->n_coords(); ++k)
        mid[k] = 0.5 * (nodes(a, k) + nodes(b, k));
      const double chord = 0.5 * (s.values[a] + s.values[b]);
      CHECK(s.at(mid) >= chord - slack);
    }
  };
  check_surface(pol.u_scan);
  check_surface(pol.v_slice);
  check_surface(pol.phi_c);
}

TEST_CASE("regions: stop set, switch set, tie at the prior") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  const DpParams p = small_params();
  const double c = 0.01;
  const OptimalPolicy pol = solve_optimal_policy(m, 0.05, c, p);
  const PolicyRegions regions =
      extract_regions(pol.u_scan, pol.v_slice, pol.phi_c, pol.phi_s, 0.0);

  const SimplexGrid& g = *pol.u_scan.grid;
  const int top[3] = {g.subdivisions(), 0, 0};
  CHECK(regions.r_tau[g.index_of(top)] == 1);  // exact equality, zero tolerance

  // switch region matches its defining inequality node-by-node
  for (std::uint32_t i = 0; i < g.node_count(); i += 37)
    CHECK(regions.r_phi[i] == (pol.phi_c.values[i] > pol.phi_s ? 1 : 0));

  // near-origin stays in the switch region: continuing the same exhausted
  // pair is never better than restarting fresh
  const int origin[3] = {0, 0, 0};
  CHECK(regions.r_phi[g.index_of(origin)] == 1);

  const PolicyRegions with_tol =
      extract_regions(pol.u_scan, pol.v_slice, pol.phi_c, pol.phi_s, p.region_tol);
  const int components = count_components(g, with_tol.r_tau);
  CHECK(components == 2);
}

TEST_CASE("trial execution: immediate stop under a dominant cost") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  DpParams p = small_params();
  const OptimalPolicy pol = solve_optimal_policy(m, 0.05, 0.9, p);
  std::mt19937_64 rng = make_stream(23, 0);
  for (int i = 0; i < 100; ++i) {
    const TrialRecord r = run_optimal_trial(pol, rng);
    CHECK(r.tau0 == 0);
    CHECK(r.tau1 == 0);
    // tie at q1 = q2 claims s2
  }
}

TEST_CASE("trial determinism and sane behavior at working cost") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  const DpParams p = small_params();
  const OptimalPolicy pol = solve_optimal_policy(m, 0.05, 0.01, p);
  std::mt19937_64 a = make_stream(29, 5);
  std::mt19937_64 b = make_stream(29, 5);
  const TrialRecord ra = run_optimal_trial(pol, a);
  const TrialRecord rb = run_optimal_trial(pol, b);
  CHECK(ra.tau0 == rb.tau0);
  CHECK(ra.tau1 == rb.tau1);
  CHECK(ra.claim_correct == rb.claim_correct);

  const SimSummary sim = evaluate_optimal(pol, 2000, 31, 1);
  CHECK(sim.asd > 1.0);
  CHECK(sim.fip < 0.5);
}

TEST_CASE("refinement vertex stops immediately and claims correctly") {
  const ModelPair m = gaussian_variance(1.0, 3.0);
  const DpParams p = small_params();
  const OptimalPolicy pol = solve_optimal_policy(m, 0.05, 0.01, p);
  // at r = (1,0,0,0) the stop cost is 0: no continuation can beat it
  const RefineBelief vertex{1.0, 0.0, 0.0, 0.0};
  CHECK(0.0 <= refine_continuation(pol, vertex));
  const QStats q = q_stats(vertex);
  CHECK((1.0 - std::max(q.q1, q.q2)) == 0.0);
  CHECK(optimal_terminal_decision(q) == Claim::S1);
}
