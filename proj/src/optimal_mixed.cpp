#include "quickseek/optimal_mixed.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>

#include "quickseek/quadrature.hpp"

namespace quickseek {

namespace {

constexpr double kMonotoneSlack = 1e-12;

struct Entry {
  std::uint32_t col;
  double val;
};

// Sort-and-merge one expectation row, then append to the CSR arrays.
void append_row(Csr& csr, std::vector<Entry>& row) {
  std::sort(row.begin(), row.end(),
            [](const Entry& a, const Entry& b) { return a.col < b.col; });
  for (std::size_t i = 0; i < row.size();) {
    double v = row[i].val;
    std::size_t j = i + 1;
    while (j < row.size() && row[j].col == row[i].col) v += row[j++].val;
    if (v != 0.0) {
      csr.cols.push_back(row[i].col);
      csr.vals.push_back(v);
    }
    i = j;
  }
  csr.offsets.push_back(static_cast<std::uint32_t>(csr.cols.size()));
  row.clear();
}

}  // namespace

void Csr::multiply(const Eigen::ArrayXd& x, Eigen::ArrayXd& out) const {
  const std::uint32_t n = static_cast<std::uint32_t>(offsets.size() - 1);
  for (std::uint32_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::uint32_t k = offsets[i]; k < offsets[i + 1]; ++k)
      acc += vals[k] * x[cols[k]];
    out[i] = acc;
  }
}

double Csr::row_dot(std::uint32_t row, const Eigen::ArrayXd& x) const {
  double acc = 0.0;
  for (std::uint32_t k = offsets[row]; k < offsets[row + 1]; ++k)
    acc += vals[k] * x[cols[k]];
  return acc;
}

ObsModel build_obs_model(const ModelPair& m, int quad_points) {
  const Quadrature q = model_quadrature(m, 1, quad_points);
  ObsModel obs;
  obs.x = q.x;
  obs.w = q.w;
  obs.f0.resize(q.x.size());
  obs.f1.resize(q.x.size());
  for (Eigen::Index i = 0; i < q.x.size(); ++i) {
    obs.f0[i] = pdf(m.f0, q.x[i]);
    obs.f1[i] = pdf(m.f1, q.x[i]);
  }
  return obs;
}

ObsModel build_obs_model(const TwoPointModel& m) {
  if (m.f0_head <= 0.0 || m.f0_head >= 1.0 || m.f1_head <= 0.0 || m.f1_head >= 1.0)
    throw std::invalid_argument("two-point probabilities must be interior");
  ObsModel obs;
  obs.x = Eigen::ArrayXd(2);
  obs.x << 1.0, 0.0;
  obs.f0 = Eigen::ArrayXd(2);
  obs.f0 << m.f0_head, 1.0 - m.f0_head;
  obs.f1 = Eigen::ArrayXd(2);
  obs.f1 << m.f1_head, 1.0 - m.f1_head;
  obs.w = Eigen::ArrayXd::Ones(2);
  return obs;
}

MixObsModel build_mix_obs_model(const ModelPair& m, int quad_points) {
  const Quadrature q = model_quadrature(m, 2, quad_points);
  const Density g0 = mixture_component(m, 2, 0);
  const Density g1 = mixture_component(m, 2, 1);
  const Density g2 = mixture_component(m, 2, 2);
  MixObsModel obs;
  obs.x = q.x;
  obs.w = q.w;
  obs.g0.resize(q.x.size());
  obs.g1.resize(q.x.size());
  obs.g2.resize(q.x.size());
  for (Eigen::Index i = 0; i < q.x.size(); ++i) {
    obs.g0[i] = pdf(g0, q.x[i]);
    obs.g1[i] = pdf(g1, q.x[i]);
    obs.g2[i] = pdf(g2, q.x[i]);
  }
  return obs;
}

RefineOperator build_refine_operator(const ObsModel& obs, int resolution) {
  RefineOperator op;
  op.grid = std::make_shared<SimplexGrid>(4, resolution);
  const auto& nodes = op.grid->nodes();
  const std::uint32_t n = op.grid->node_count();
  const Eigen::Index n_atoms = obs.x.size();

  op.stop_cost.resize(n);
  op.rows.offsets.reserve(n + 1);
  op.rows.offsets.push_back(0);
  op.rows.cols.reserve(static_cast<std::size_t>(n) * n_atoms);
  op.rows.vals.reserve(static_cast<std::size_t>(n) * n_atoms);

  std::vector<Entry> row;
  row.reserve(4 * n_atoms);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double r11 = nodes(i, 0), r10 = nodes(i, 1), r01 = nodes(i, 2),
                 r00 = nodes(i, 3);
    const double q1 = r11 + r10, q2 = r11 + r01;
    op.stop_cost[i] = 1.0 - std::max(q1, q2);
    for (Eigen::Index t = 0; t < n_atoms; ++t) {
      const double f1 = obs.f1[t], f0 = obs.f0[t];
      const double norm = q1 * f1 + (1.0 - q1) * f0;
      const double mass = obs.w[t] * norm;
      if (mass <= 0.0) continue;
      const double inv = 1.0 / norm;
      const double post[4] = {r11 * f1 * inv, r10 * f1 * inv, r01 * f0 * inv,
                              r00 * f0 * inv};
      const SimplexStencil st = op.grid->stencil(post);
      for (int k = 0; k < st.count; ++k)
        if (st.weight[k] != 0.0) row.push_back({st.index[k], mass * st.weight[k]});
    }
    append_row(op.rows, row);
  }
  return op;
}

ScanOperator build_scan_operator(const MixObsModel& obs, int resolution,
                                 const ScanBelief& prior) {
  ScanOperator op;
  op.grid = std::make_shared<SimplexGrid>(3, resolution);
  op.prior = prior;
  const auto& nodes = op.grid->nodes();
  const std::uint32_t n = op.grid->node_count();
  const Eigen::Index n_atoms = obs.x.size();

  op.rows.offsets.reserve(n + 1);
  op.rows.offsets.push_back(0);

  std::vector<Entry> row;
  row.reserve(3 * n_atoms);
  auto expectation_row = [&](double p11, double pmix, double p00, std::vector<Entry>& out) {
    for (Eigen::Index t = 0; t < n_atoms; ++t) {
      const double g2 = obs.g2[t], g1 = obs.g1[t], g0 = obs.g0[t];
      const double norm = p11 * g2 + pmix * g1 + p00 * g0;
      const double mass = obs.w[t] * norm;
      if (mass <= 0.0) continue;
      const double inv = 1.0 / norm;
      const double post[3] = {p11 * g2 * inv, pmix * g1 * inv, p00 * g0 * inv};
      const SimplexStencil st = op.grid->stencil(post);
      for (int k = 0; k < st.count; ++k)
        if (st.weight[k] != 0.0) out.push_back({st.index[k], mass * st.weight[k]});
    }
  };

  for (std::uint32_t i = 0; i < n; ++i) {
    expectation_row(nodes(i, 0), nodes(i, 1), nodes(i, 2), row);
    append_row(op.rows, row);
  }

  // The switch expectation is the same operator evaluated at the prior point.
  std::vector<Entry> prow;
  expectation_row(prior.p11, prior.pmix, prior.p00, prow);
  std::sort(prow.begin(), prow.end(),
            [](const Entry& a, const Entry& b) { return a.col < b.col; });
  for (std::size_t i = 0; i < prow.size();) {
    double v = prow[i].val;
    std::size_t j = i + 1;
    while (j < prow.size() && prow[j].col == prow[i].col) v += prow[j++].val;
    op.prior_cols.push_back(prow[i].col);
    op.prior_vals.push_back(v);
    i = j;
  }
  return op;
}

namespace {

void check_bounds(const Eigen::ArrayXd& v, const char* what) {
  if (v.minCoeff() < -1e-9 || v.maxCoeff() > 1.0 + 1e-9)
    throw std::logic_error(std::string(what) + ": surface left [0, 1]");
}

void check_monotone(const Eigen::ArrayXd& next, const Eigen::ArrayXd& prev,
                    const char* what) {
  if ((next - prev).maxCoeff() > kMonotoneSlack)
    throw std::logic_error(std::string(what) + ": sweep was not pointwise nonincreasing");
}

}  // namespace

ValueSurface refine_value_iteration(const RefineOperator& op, double c, double tol,
                                    int max_iter) {
  if (c <= 0.0) throw std::invalid_argument("cost per sample must be positive");
  const std::uint32_t n = op.grid->node_count();
  Eigen::ArrayXd v = op.stop_cost;
  Eigen::ArrayXd expect(n);
  ValueSurface out;
  out.grid = op.grid;
  out.kind = SurfaceKind::VRefine;
  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    op.rows.multiply(v, expect);
    Eigen::ArrayXd next = op.stop_cost.min(c + expect);
    check_monotone(next, v, "refine value iteration");
    check_bounds(next, "refine value iteration");
    const double residual = (v - next).maxCoeff();
    v.swap(next);
    if (residual < tol) {
      out.values = std::move(v);
      out.residual = residual;
      out.sweeps = sweep;
      return out;
    }
    out.residual = residual;
  }
  throw DpNotConverged("refinement value iteration did not converge", out.residual);
}

ValueSurface refine_value_steps(const RefineOperator& op, double c, int sweeps) {
  if (c <= 0.0) throw std::invalid_argument("cost per sample must be positive");
  const std::uint32_t n = op.grid->node_count();
  Eigen::ArrayXd v = op.stop_cost;
  Eigen::ArrayXd expect(n);
  for (int s = 0; s < sweeps; ++s) {
    op.rows.multiply(v, expect);
    v = op.stop_cost.min(c + expect);
  }
  ValueSurface out;
  out.grid = op.grid;
  out.kind = SurfaceKind::VRefine;
  out.values = std::move(v);
  out.sweeps = sweeps;
  return out;
}

ValueSurface refine_value_iteration(const ModelPair& model, double c,
                                    const DpParams& params) {
  const ObsModel obs = build_obs_model(model, params.quad_points);
  const RefineOperator op = build_refine_operator(obs, params.refine_resolution);
  return refine_value_iteration(op, c, params.tol, params.max_iter);
}

ValueSurface extract_v_slice(const ValueSurface& v_refine, int scan_resolution) {
  ValueSurface out;
  out.grid = std::make_shared<SimplexGrid>(3, scan_resolution);
  out.kind = SurfaceKind::VSlice;
  const std::uint32_t n = out.grid->node_count();
  out.values.resize(n);
  const auto& nodes = out.grid->nodes();
  for (std::uint32_t i = 0; i < n; ++i) {
    const double point[4] = {nodes(i, 0), nodes(i, 1) / 2.0, nodes(i, 1) / 2.0,
                             nodes(i, 2)};
    out.values[i] = v_refine.at(point);
  }
  out.residual = v_refine.residual;
  out.sweeps = v_refine.sweeps;
  return out;
}

ScanSolution scan_value_iteration(const ScanOperator& op, const ValueSurface& v_slice,
                                  double c, double tol, int max_iter) {
  if (c <= 0.0) throw std::invalid_argument("cost per sample must be positive");
  if (v_slice.grid->node_count() != op.grid->node_count())
    throw std::invalid_argument("v_slice resolution does not match the scan operator");
  const std::uint32_t n = op.grid->node_count();
  const Eigen::ArrayXd& v = v_slice.values;
  Eigen::ArrayXd u = v;
  Eigen::ArrayXd expect(n);
  double residual = 0.0;

  auto prior_dot = [&](const Eigen::ArrayXd& x) {
    double acc = 0.0;
    for (std::size_t k = 0; k < op.prior_cols.size(); ++k)
      acc += op.prior_vals[k] * x[op.prior_cols[k]];
    return acc;
  };

  for (int sweep = 1; sweep <= max_iter; ++sweep) {
    op.rows.multiply(u, expect);
    const double phi_s = prior_dot(u);
    Eigen::ArrayXd next = v.min(c + expect.min(phi_s));
    check_monotone(next, u, "scan value iteration");
    check_bounds(next, "scan value iteration");
    residual = (u - next).maxCoeff();
    u.swap(next);
    if (residual < tol) {
      ScanSolution sol;
      sol.phi_c.grid = op.grid;
      sol.phi_c.kind = SurfaceKind::PhiC;
      sol.phi_c.values.resize(n);
      op.rows.multiply(u, sol.phi_c.values);
      sol.phi_s = prior_dot(u);
      // Re-derive U from the final expectations so the returned triple
      // satisfies U = min{v, c + min{Phi_c, Phi_s}} exactly.
      sol.u.grid = op.grid;
      sol.u.kind = SurfaceKind::UScan;
      sol.u.values = v.min(c + sol.phi_c.values.min(sol.phi_s));
      sol.u.residual = residual;
      sol.u.sweeps = sweep;
      sol.u.phi_s = sol.phi_s;
      sol.phi_c.phi_s = sol.phi_s;
      sol.phi_c.residual = residual;
      sol.phi_c.sweeps = sweep;
      return sol;
    }
  }
  throw DpNotConverged("scanning value iteration did not converge", residual);
}

PolicyRegions extract_regions(const ValueSurface& u, const ValueSurface& v,
                              const ValueSurface& phi_c, double phi_s,
                              double region_tol) {
  const std::uint32_t n = u.grid->node_count();
  PolicyRegions out;
  out.r_tau.resize(n);
  out.r_phi.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    out.r_tau[i] = v.values[i] - u.values[i] <= region_tol ? 1 : 0;
    out.r_phi[i] = phi_c.values[i] > phi_s ? 1 : 0;  // ties continue
  }
  return out;
}

int count_components(const SimplexGrid& grid, const std::vector<std::uint8_t>& mask) {
  if (grid.n_coords() != 3)
    throw std::invalid_argument("component count expects the scanning grid");
  const int M = grid.subdivisions();
  const auto& nodes = grid.nodes();
  const std::uint32_t n = grid.node_count();
  std::vector<std::uint8_t> seen(n, 0);
  int components = 0;
  std::deque<std::uint32_t> queue;
  const int steps[6][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {1, -1}, {-1, 1}};
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!mask[s] || seen[s]) continue;
    ++components;
    seen[s] = 1;
    queue.push_back(s);
    while (!queue.empty()) {
      const std::uint32_t i = queue.front();
      queue.pop_front();
      const int m1 = static_cast<int>(std::lround(nodes(i, 0) * M));
      const int m2 = static_cast<int>(std::lround(nodes(i, 1) * M));
      for (const auto& st : steps) {
        const int a = m1 + st[0], b = m2 + st[1];
        if (a < 0 || b < 0 || a + b > M) continue;
        const int mm[3] = {a, b, M - a - b};
        const std::uint32_t j = grid.index_of(mm);
        if (mask[j] && !seen[j]) {
          seen[j] = 1;
          queue.push_back(j);
        }
      }
    }
  }
  return components;
}

Claim optimal_terminal_decision(const QStats& q) {
  return q.q1 > q.q2 ? Claim::S1 : Claim::S2;
}

OptimalPolicy solve_optimal_policy(const ModelPair& model, double pi0, double c,
                                   const DpParams& params, std::uint64_t sample_cap) {
  OptimalPolicy pol;
  pol.model = model;
  pol.pi0 = pi0;
  pol.c = c;
  pol.region_tol = params.region_tol;
  pol.prior = scan_prior(pi0);
  pol.sample_cap = sample_cap;
  pol.refine_obs = build_obs_model(model, params.quad_points);

  const RefineOperator rop = build_refine_operator(pol.refine_obs, params.refine_resolution);
  pol.v_refine = refine_value_iteration(rop, c, params.tol, params.max_iter);
  pol.v_slice = extract_v_slice(pol.v_refine, params.scan_resolution);

  const MixObsModel mobs = build_mix_obs_model(model, params.quad_points);
  const ScanOperator sop = build_scan_operator(mobs, params.scan_resolution, pol.prior);
  ScanSolution sol = scan_value_iteration(sop, pol.v_slice, c, params.tol, params.max_iter);
  pol.u_scan = std::move(sol.u);
  pol.phi_c = std::move(sol.phi_c);
  pol.phi_s = sol.phi_s;
  return pol;
}

double refine_continuation(const OptimalPolicy& policy, const RefineBelief& r) {
  const ObsModel& obs = policy.refine_obs;
  const double q1 = r.r11 + r.r10;
  double acc = 0.0;
  for (Eigen::Index t = 0; t < obs.x.size(); ++t) {
    const double f1 = obs.f1[t], f0 = obs.f0[t];
    const double norm = q1 * f1 + (1.0 - q1) * f0;
    if (norm <= 0.0) continue;
    const double inv = 1.0 / norm;
    const double post[4] = {r.r11 * f1 * inv, r.r10 * f1 * inv, r.r01 * f0 * inv,
                            r.r00 * f0 * inv};
    acc += obs.w[t] * norm * policy.v_refine.at(post);
  }
  return policy.c + acc;
}

TrialRecord run_optimal_trial(const OptimalPolicy& policy, std::mt19937_64& rng) {
  std::bernoulli_distribution is_active(policy.pi0);
  const ModelPair& model = policy.model;

  TrialRecord rec;
  rec.strategy = Strategy::Optimal;
  rec.n_switches = 1;

  bool truth1 = is_active(rng);
  bool truth2 = is_active(rng);
  ScanBelief p = policy.prior;

  // Scanning: stop/switch by re-applying the defining inequalities to the
  // interpolated surfaces rather than nearest-node region lookup.
  while (true) {
    const double point[3] = {p.p11, p.pmix, p.p00};
    const double v_here = policy.v_slice.at(point);
    const double u_here = policy.u_scan.at(point);
    if (v_here - u_here <= policy.region_tol) break;  // R_tau: enter refinement
    if (rec.tau0 >= policy.sample_cap) {
      rec.truncated = true;
      return rec;
    }
    const bool switch_now = policy.phi_c.at(point) > policy.phi_s;
    if (switch_now) {
      truth1 = is_active(rng);
      truth2 = is_active(rng);
      ++rec.n_switches;
    }
    const double y1 = sample(model, truth1 ? Hypothesis::H1 : Hypothesis::H0, rng);
    const double y2 = sample(model, truth2 ? Hypothesis::H1 : Hypothesis::H0, rng);
    ++rec.tau0;
    p = update_scan(p, policy.prior, y1 + y2, switch_now, model);
  }

  RefineBelief r = refine_init(p);
  while (true) {
    const QStats q = q_stats(r);
    const double stop_cost = 1.0 - std::max(q.q1, q.q2);
    if (stop_cost <= refine_continuation(policy, r)) {
      const Claim claim = optimal_terminal_decision(q);
      rec.claim_correct = claim == Claim::S1 ? truth1 : truth2;
      return rec;
    }
    if (rec.total() >= policy.sample_cap) {
      rec.truncated = true;
      return rec;
    }
    const double x = sample(model, truth1 ? Hypothesis::H1 : Hypothesis::H0, rng);
    ++rec.tau1;
    r = update_refine(r, x, model);
  }
}

double finite_horizon_oracle(const TwoPointModel& toy, double c, int horizon,
                             const RefineBelief& start) {
  if (horizon < 0 || horizon > 6)
    throw std::invalid_argument("oracle horizon must lie in [0, 6]");
  if (toy.f0_head <= 0.0 || toy.f0_head >= 1.0 || toy.f1_head <= 0.0 || toy.f1_head >= 1.0)
    throw std::invalid_argument("two-point probabilities must be interior");

  struct Rec {
    double c;
    double f0h, f1h;
    double value(const RefineBelief& r, int t) const {
      const double q1 = r.r11 + r.r10, q2 = r.r11 + r.r01;
      const double stop = 1.0 - std::max(q1, q2);
      if (t == 0) return stop;
      double cont = 0.0;
      for (int head = 0; head < 2; ++head) {
        const double l1 = head ? f1h : 1.0 - f1h;
        const double l0 = head ? f0h : 1.0 - f0h;
        const double norm = q1 * l1 + (1.0 - q1) * l0;
        const RefineBelief next{r.r11 * l1 / norm, r.r10 * l1 / norm,
                                r.r01 * l0 / norm, r.r00 * l0 / norm};
        cont += norm * value(next, t - 1);
      }
      return std::min(stop, c + cont);
    }
  };
  return Rec{c, toy.f0_head, toy.f1_head}.value(start, horizon);
}

}  // namespace quickseek
