#include "fpls/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>

#include "fpls/errors.hpp"
#include "fpls/forms.hpp"
#include "fpls/solvers.hpp"

namespace fpls {
namespace {

GridFunction constant(const Grid& grid, double value) { return GridFunction(grid.n, value); }

GridFunction scaled(const GridFunction& u, double factor) {
  GridFunction out = u;
  for (double& v : out) v *= factor;
  return out;
}

double min_of(const GridFunction& u) { return *std::min_element(u.begin(), u.end()); }
double max_of(const GridFunction& u) { return *std::max_element(u.begin(), u.end()); }

double min_gap(const GridFunction& hi, const GridFunction& lo) {
  double m = hi[0] - lo[0];
  for (std::size_t i = 0; i < hi.size(); ++i) m = std::min(m, hi[i] - lo[i]);
  return m;
}

double gap_inf(const GridFunction& a, const GridFunction& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  const double ratio = std::log(hi / lo);
  for (std::size_t k = 0; k < n; ++k)
    out[k] = lo * std::exp(ratio * static_cast<double>(k) / static_cast<double>(n - 1));
  return out;
}

// Lowest-energy start among scaled first-eigenfunction bumps.
GridFunction best_bump_start(const Grid& grid, const Reaction& functional,
                             const GridFunction& e1, double scale_lo, double scale_hi) {
  const double e1max = norm_inf(e1);
  GridFunction best = scaled(e1, scale_lo / e1max);
  double best_energy = energy(grid, functional, best).total;
  for (double amp : log_spaced(scale_lo, scale_hi, 24)) {
    GridFunction candidate = scaled(e1, amp / e1max);
    const double value = energy(grid, functional, candidate).total;
    if (value < best_energy) {
      best_energy = value;
      best = std::move(candidate);
    }
  }
  return best;
}

SolutionSummary summarize(const Grid& grid, const Reaction& reaction, const std::string& name,
                          const GridFunction& u, std::size_t iterations) {
  SolutionSummary s;
  s.name = name;
  s.energy = energy(grid, reaction, u).total;
  s.residual = gradient_proxy_norm(grid, energy_gradient(grid, reaction, u));
  s.min = min_of(u);
  s.max = max_of(u);
  s.iterations = iterations;
  s.csv = name + ".csv";
  return s;
}

struct BranchResult {
  SolveOutcome first;   // minimizer of the zero/a+ truncation
  SolveOutcome second;  // second solution (direct or mountain pass)
  bool case_b = false;
};

// Positive-branch worker; the negative branch runs it on the mirror reaction.
BranchResult solve_branch(const Grid& grid, const EigenPair& eig, const Reaction& r,
                          const RunConfig& cfg) {
  const double ap = r.params().a_plus;
  if (!(ap > 0.0))
    fail(Errc::parameter_constraint, "pipeline: reaction has no positive zero a_plus");

  BranchResult out;
  const Reaction f0 = truncate_zero_aplus(r);
  const GridFunction start = best_bump_start(grid, f0, eig.e1, 1e-3 * ap, 1.2 * ap);
  out.first = minimize_energy(grid, f0, start, cfg.tol_solve);
  const GridFunction& u0 = out.first.u;
  if (norm_inf(u0) < cfg.tol_solve)
    fail(Errc::triviality, "pipeline: first branch solution is numerically trivial");
  if (min_of(u0) < -1e-8 || max_of(u0) > ap + 1e-8)
    fail(Errc::non_convergence, "pipeline: branch minimizer escaped the order interval");

  // Second solution: minimize the interval truncation frozen below u0; if the
  // minimum is u0 itself, the second solution sits past the barrier and is
  // reached by a mountain pass toward a far low-energy bump.
  const Reaction fhat = truncate_interval(r, u0, ap);
  const double e1max = norm_inf(eig.e1);
  std::vector<GridFunction> starts;
  {
    GridFunction mid(grid.n), shaped(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
      mid[i] = 0.5 * (u0[i] + ap);
      shaped[i] = u0[i] + 0.5 * (ap - u0[i]) * eig.e1[i] / e1max;
    }
    starts.push_back(std::move(mid));
    starts.push_back(constant(grid, 0.9 * ap));
    starts.push_back(std::move(shaped));
  }
  SolveOutcome best_hat;
  bool have = false;
  for (const GridFunction& s0 : starts) {
    SolveOutcome candidate = minimize_energy(grid, fhat, s0, cfg.tol_solve);
    if (!have || candidate.energy < best_hat.energy) {
      best_hat = std::move(candidate);
      have = true;
    }
  }

  if (gap_inf(best_hat.u, u0) > 1e-6) {
    out.second = std::move(best_hat);
    out.case_b = false;
  } else {
    const Reaction f1 = truncate_below(r, u0);
    const double level_u0 = energy(grid, f1, u0).total;
    double tau = 2.0 * ap / e1max;
    GridFunction far;
    bool found = false;
    for (int k = 0; k < 60; ++k) {
      far = scaled(eig.e1, tau);
      if (energy(grid, f1, far).total < level_u0) {
        found = true;
        break;
      }
      tau *= 2.0;
    }
    if (!found)
      fail(Errc::non_convergence,
           "pipeline: no low-energy far endpoint for the second-solution pass");
    out.second = mountain_pass(grid, f1, u0, far, cfg.path_points, cfg.tol_solve);
    out.case_b = true;
  }
  if (norm_inf(out.second.u) < cfg.tol_solve)
    fail(Errc::triviality, "pipeline: second branch solution is numerically trivial");
  if (min_gap(out.second.u, u0) < -cfg.tol_order)
    fail(Errc::non_convergence, "pipeline: second solution is not above the first");
  return out;
}

Reaction auxiliary_reaction(double c1, double q, double p) {
  auto f = [c1, q](std::size_t, double t) {
    return t > 0.0 ? c1 * std::pow(t, q - 1.0) : 0.0;
  };
  auto F = [c1, q](std::size_t, double t) {
    return t > 0.0 ? c1 * std::pow(t, q) / q : 0.0;
  };
  ReactionParams prm;
  prm.p = p;
  prm.q = q;
  prm.c1 = c1;
  return Reaction(f, F, prm, true);
}

// Largest eigenfunction multiple that is a strict discrete subsolution within
// the sublinear regime.
GridFunction subsolution_start(const Grid& grid, const EigenPair& eig, const Reaction& r,
                               double shrink) {
  const ReactionParams& prm = r.params();
  const double e1max = norm_inf(eig.e1);
  const double lam = eig.lambda1;
  double tau = 0.9 * std::min(prm.delta0,
                              std::pow(prm.c1 / lam, 1.0 / (grid.p - prm.q))) /
               e1max;
  tau *= shrink;
  for (int attempt = 0; attempt < 40; ++attempt) {
    GridFunction sub = scaled(eig.e1, tau);
    const GridFunction lhs = weak_residual(grid, sub);
    bool strict = true;
    for (std::size_t i = 0; i < grid.n; ++i) {
      if (!(lhs[i] < grid.h * r.f(i, sub[i]))) {
        strict = false;
        break;
      }
    }
    if (strict) return sub;
    tau *= 0.7;
  }
  fail(Errc::non_convergence, "pipeline: no strict discrete subsolution found");
}

void fill_header(const PipelineContext& ctx, PipelineResult& result) {
  const ReactionParams& prm = ctx.reaction.params();
  SolutionReport& rep = result.report;
  rep.lambda1 = ctx.eigen.lambda1;
  rep.e1_min = min_of(ctx.eigen.e1);
  rep.e1_max = max_of(ctx.eigen.e1);
  rep.e1_norm_p = norm_p_discrete(ctx.grid, ctx.eigen.e1);
  if (ctx.cfg.reaction_type == "example") {
    rep.eta = ctx.cfg.eta;
    rep.gamma = ctx.cfg.gamma;
  }
  rep.a_plus = prm.a_plus;
  rep.a_minus = prm.a_minus;
  rep.delta0 = prm.delta0;
  rep.c0 = prm.c0;
  rep.c1 = prm.c1;
  rep.c2 = prm.c2;
  rep.q = prm.q;
  rep.mu = prm.mu;
  result.fields["e1"] = ctx.eigen.e1;
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

void validate(const RunConfig& cfg) {
  if (!(cfg.a < cfg.b)) fail(Errc::invalid_config, "config: need a < b");
  if (cfg.n < 2) fail(Errc::invalid_config, "config: need n >= 2");
  if (!(cfg.p >= 2.0)) fail(Errc::invalid_config, "config: need p >= 2");
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) fail(Errc::invalid_config, "config: need s in (0,1)");
  if (!(cfg.p * cfg.s < 1.0)) fail(Errc::invalid_config, "config: need p*s < 1");
  if (!(cfg.tol_eigen > 0.0 && cfg.tol_solve > 0.0 && cfg.tol_order > 0.0))
    fail(Errc::invalid_config, "config: tolerances must be positive");
  if (cfg.path_points < 3) fail(Errc::invalid_config, "config: need path_points >= 3");
  if (!(cfg.identify_tol > 0.0)) fail(Errc::invalid_config, "config: identify_tol must be positive");
  if (cfg.reaction_type == "example") {
    if (!std::isnan(cfg.eta) && !std::isnan(cfg.gamma) && !(cfg.gamma > cfg.eta + 1.0))
      fail(Errc::parameter_constraint, "config: need gamma > eta + 1");
  } else if (cfg.reaction_type == "tabulated") {
    if (cfg.table.size() < 2) fail(Errc::invalid_config, "config: tabulated reaction needs points");
  } else {
    fail(Errc::invalid_config, "config: unknown reaction type '" + cfg.reaction_type + "'");
  }
}

PipelineContext prepare(const RunConfig& cfg_in) {
  validate(cfg_in);
  PipelineContext ctx;
  ctx.cfg = cfg_in;
  ctx.grid = build_grid(cfg_in.a, cfg_in.b, cfg_in.n, cfg_in.p, cfg_in.s);
  ctx.eigen = first_eigenpair(ctx.grid, constant(ctx.grid, 1.0), cfg_in.tol_eigen);

  if (ctx.cfg.reaction_type == "example") {
    // lambda1-dependent parameters resolve against the computed discrete
    // eigenvalue, not a guessed continuum one.
    if (std::isnan(ctx.cfg.eta)) ctx.cfg.eta = ctx.eigen.lambda1 + 1.0;
    if (!(ctx.cfg.eta > ctx.eigen.lambda1))
      fail(Errc::parameter_constraint, "config: eta must exceed lambda1 = " +
                                           std::to_string(ctx.eigen.lambda1));
    if (std::isnan(ctx.cfg.gamma)) ctx.cfg.gamma = ctx.cfg.eta + 1.5;
    ctx.reaction = example_reaction(ctx.cfg.eta, ctx.cfg.gamma, ctx.cfg.p);
  } else {
    ReactionParams prm = ctx.cfg.table_params;
    prm.p = ctx.cfg.p;
    ctx.reaction = tabulated_reaction(ctx.cfg.table, prm);
  }

  ctx.audit = audit_hypotheses(ctx.reaction, ctx.eigen.lambda1, SamplingPlan{});
  if (!ctx.audit.all_passed() && !ctx.cfg.force) {
    std::string failing;
    for (const AuditCheck* c : ctx.audit.checks())
      if (!c->passed) failing += (failing.empty() ? "" : ", ") + c->name;
    fail(Errc::audit_failed, "hypothesis audit failed: " + failing + " (use --force to override)");
  }
  return ctx;
}

void run_constant_sign(const PipelineContext& ctx, PipelineResult& result) {
  const Grid& grid = ctx.grid;
  const Reaction& r = ctx.reaction;
  result.cfg = ctx.cfg;
  result.audit = ctx.audit;
  fill_header(ctx, result);

  const BranchResult pos = solve_branch(grid, ctx.eigen, r, ctx.cfg);
  const Reaction mirrored = reflect(r);
  const BranchResult neg = solve_branch(grid, ctx.eigen, mirrored, ctx.cfg);

  GridFunction u0 = pos.first.u;
  GridFunction u1 = pos.second.u;
  GridFunction v0 = scaled(neg.first.u, -1.0);
  GridFunction v1 = scaled(neg.second.u, -1.0);

  SolutionReport& rep = result.report;
  rep.u0 = summarize(grid, r, "u0", u0, pos.first.iterations);
  rep.u1 = summarize(grid, r, "u1", u1, pos.second.iterations);
  rep.v0 = summarize(grid, r, "v0", v0, neg.first.iterations);
  rep.v1 = summarize(grid, r, "v1", v1, neg.second.iterations);
  rep.case_b_u1 = pos.case_b;
  rep.case_b_v1 = neg.case_b;

  const double ap = r.params().a_plus;
  const double am = r.params().a_minus;
  rep.ord_u0_pos = min_of(u0);
  rep.ord_u0_below_aplus = ap - max_of(u0);
  rep.ord_u1_above_u0 = min_gap(u1, u0);
  rep.ord_v0_neg = -max_of(v0);
  rep.ord_v0_above_aminus = min_of(v0) - am;
  rep.ord_v1_below_v0 = min_gap(v0, v1);
  {
    double wmin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.n; ++i)
      wmin = std::min(wmin, (ap - u0[i]) / boundary_weight(grid, i));
    rep.weighted_gap_u0_aplus = wmin;
  }

  result.fields["u0"] = std::move(u0);
  result.fields["u1"] = std::move(u1);
  result.fields["v0"] = std::move(v0);
  result.fields["v1"] = std::move(v1);
}

void run_extremal(const PipelineContext& ctx, PipelineResult& result) {
  const Grid& grid = ctx.grid;
  const Reaction& r = ctx.reaction;
  const ReactionParams& prm = r.params();
  if (!result.fields.count("u0") || !result.fields.count("v0"))
    fail(Errc::invalid_config, "run_extremal: constant-sign stage must run first");

  // Auxiliary sublinear problem; its minimizer scaled into (0, delta0] is the
  // lower barrier certifying the extremal limit stays away from zero.
  const Reaction aux = auxiliary_reaction(prm.c1, prm.q, grid.p);
  const double aux_scale =
      std::pow(prm.c1 / ctx.eigen.lambda1, 1.0 / (grid.p - prm.q));
  const GridFunction aux_start =
      best_bump_start(grid, aux, ctx.eigen.e1, 0.05 * aux_scale, 3.0 * aux_scale);
  const SolveOutcome aux_out = minimize_energy(grid, aux, aux_start, ctx.cfg.tol_solve);
  result.report.aux_energy = aux_out.energy;
  const double theta =
      std::min(0.995, 0.995 * prm.delta0 / std::max(max_of(aux_out.u), 1e-300));
  const GridFunction barrier = scaled(aux_out.u, theta);

  const GridFunction sub = subsolution_start(grid, ctx.eigen, r, 1.0);
  const SolveOutcome up = monotone_iteration(grid, r, sub, constant(grid, prm.a_plus),
                                             prm.c2, IterationDirection::up,
                                             ctx.cfg.tol_solve);

  const Reaction mirrored = reflect(r);
  const GridFunction sub_neg = subsolution_start(grid, ctx.eigen, mirrored, 1.0);
  const SolveOutcome down = monotone_iteration(
      grid, mirrored, sub_neg, constant(grid, mirrored.params().a_plus), prm.c2,
      IterationDirection::up, ctx.cfg.tol_solve);

  GridFunction u_plus = up.u;
  GridFunction v_minus = scaled(down.u, -1.0);

  result.report.barrier_min_gap = min_gap(u_plus, barrier);
  result.report.gap_uplus_u0 = gap_inf(u_plus, result.fields.at("u0"));
  result.report.gap_vminus_v0 = gap_inf(v_minus, result.fields.at("v0"));
  result.report.identified_uplus = result.report.gap_uplus_u0 < ctx.cfg.identify_tol;
  result.report.identified_vminus = result.report.gap_vminus_v0 < ctx.cfg.identify_tol;

  result.fields["w"] = aux_out.u;
  result.fields["u_plus"] = std::move(u_plus);
  result.fields["v_minus"] = std::move(v_minus);
}

void run_nodal(const PipelineContext& ctx, PipelineResult& result) {
  const Grid& grid = ctx.grid;
  const Reaction& r = ctx.reaction;
  for (const char* key : {"u0", "v0", "u_plus", "v_minus"})
    if (!result.fields.count(key))
      fail(Errc::invalid_config, "run_nodal: prior stages must run first");
  if (!ctx.audit.reverse_ar.passed && !ctx.cfg.force)
    fail(Errc::audit_failed, "run_nodal: reverse Ambrosetti-Rabinowitz audit failed");

  const GridFunction& u0 = result.fields.at("u0");
  const GridFunction& v0 = result.fields.at("v0");
  const Reaction trimmed =
      truncate_interval(r, result.fields.at("v_minus"), result.fields.at("u_plus"));

  SolutionReport& rep = result.report;
  rep.phi_tilde_u0 = energy(grid, trimmed, u0).total;
  rep.phi_tilde_v0 = energy(grid, trimmed, v0).total;

  // The split functionals must recover the extremal constant-sign minimizers.
  const auto [plus_part, minus_part] = split_signs(trimmed);
  const double ap = r.params().a_plus;
  {
    const GridFunction s0 = best_bump_start(grid, plus_part, ctx.eigen.e1, 1e-3 * ap, 1.2 * ap);
    const SolveOutcome rec = minimize_energy(grid, plus_part, s0, ctx.cfg.tol_solve);
    rep.gap_split_plus = gap_inf(rec.u, u0);
  }
  {
    const double an = -r.params().a_minus;
    GridFunction s0 = best_bump_start(grid, reflect(minus_part), ctx.eigen.e1, 1e-3 * an, 1.2 * an);
    const SolveOutcome rec = minimize_energy(grid, minus_part, scaled(s0, -1.0), ctx.cfg.tol_solve);
    rep.gap_split_minus = gap_inf(rec.u, v0);
  }

  // The origin is a critical point of the truncated functional and sits
  // exactly on the straight segment between the mirrored minimizers, so the
  // initial path detours through a low-energy sign-changing twist of the
  // minimizer pair. Several twist amplitudes are tried; the postconditions
  // decide acceptance.
  GridFunction twist(grid.n);
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double omega = 2.0 * (grid.nodes[i] - grid.a) / (grid.b - grid.a) - 1.0;
    twist[i] = 0.5 * (u0[i] - v0[i]) * omega;
  }
  std::vector<std::pair<double, GridFunction>> detours;
  for (double kappa : {1.0, 0.5, 2.0, 0.25, 4.0}) {
    GridFunction cand = scaled(twist, kappa);
    const double value = energy(grid, trimmed, cand).total;
    if (value < 0.0) detours.emplace_back(value, std::move(cand));
  }
  std::sort(detours.begin(), detours.end(),
            [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });

  bool found = false;
  bool have_any = false;
  SolveOutcome pass;
  std::string last_error;
  for (std::size_t attempt = 0; attempt <= detours.size() && !found; ++attempt) {
    const GridFunction* via = attempt < detours.size() ? &detours[attempt].second : nullptr;
    try {
      SolveOutcome trial = mountain_pass(grid, trimmed, u0, v0, ctx.cfg.path_points,
                                         ctx.cfg.tol_solve, {}, nullptr, via);
      found = min_of(trial.u) < -ctx.cfg.tol_order && max_of(trial.u) > ctx.cfg.tol_order;
      pass = std::move(trial);
      have_any = true;
    } catch (const Error& err) {
      last_error = err.what();
    }
  }
  if (!have_any)
    fail(Errc::path_collapse, "run_nodal: every pass attempt failed (" + last_error + ")");
  const GridFunction& nodal = pass.u;

  rep.phi_tilde_nodal = pass.energy;
  rep.nodal = summarize(grid, r, "nodal", nodal, pass.iterations);
  rep.ord_nodal_below_u0 = min_gap(u0, nodal);
  rep.ord_nodal_above_v0 = min_gap(nodal, v0);
  rep.nodal_sign_change =
      min_of(nodal) < -ctx.cfg.tol_order && max_of(nodal) > ctx.cfg.tol_order;
  result.fields["nodal"] = nodal;

  if (!rep.nodal_sign_change)
    fail(Errc::non_nodal,
         "run_nodal: mountain-pass point has constant sign (report retained)");
  if (rep.ord_nodal_below_u0 < -ctx.cfg.tol_order ||
      rep.ord_nodal_above_v0 < -ctx.cfg.tol_order)
    fail(Errc::non_convergence, "run_nodal: nodal solution escaped the order interval");
}

void run_full(const PipelineContext& ctx, PipelineResult& result) {
  result.cfg = ctx.cfg;
  result.audit = ctx.audit;
  fill_header(ctx, result);
  run_constant_sign(ctx, result);
  run_extremal(ctx, result);
  run_nodal(ctx, result);
  result.report.timestamp = utc_timestamp();
}

SolveOutcome stage_minimize(const PipelineContext& ctx) {
  const Reaction f0 = truncate_zero_aplus(ctx.reaction);
  const double ap = ctx.reaction.params().a_plus;
  const GridFunction start =
      best_bump_start(ctx.grid, f0, ctx.eigen.e1, 1e-3 * ap, 1.2 * ap);
  return minimize_energy(ctx.grid, f0, start, ctx.cfg.tol_solve);
}

SolveOutcome stage_monotone(const PipelineContext& ctx) {
  const GridFunction sub = subsolution_start(ctx.grid, ctx.eigen, ctx.reaction, 1.0);
  return monotone_iteration(ctx.grid, ctx.reaction, sub,
                            constant(ctx.grid, ctx.reaction.params().a_plus),
                            ctx.reaction.params().c2, IterationDirection::up,
                            ctx.cfg.tol_solve);
}

GridFunction eigen_subsolution(const PipelineContext& ctx, double shrink) {
  return subsolution_start(ctx.grid, ctx.eigen, ctx.reaction, shrink);
}

// --- serialization ----------------------------------------------------------

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["domain"] = {cfg.a, cfg.b};
  j["n"] = cfg.n;
  j["p"] = cfg.p;
  j["s"] = cfg.s;
  ordered_json reaction;
  reaction["type"] = cfg.reaction_type;
  if (std::isnan(cfg.eta))
    reaction["eta"] = nullptr;
  else
    reaction["eta"] = cfg.eta;
  if (std::isnan(cfg.gamma))
    reaction["gamma"] = nullptr;
  else
    reaction["gamma"] = cfg.gamma;
  if (!cfg.table.empty()) {
    ordered_json pts = ordered_json::array();
    for (const auto& [t, f] : cfg.table) pts.push_back({t, f});
    reaction["table"] = pts;
    const ReactionParams& tp = cfg.table_params;
    reaction["params"] = {{"c0", tp.c0},     {"c1", tp.c1},         {"c2", tp.c2},
                          {"q", tp.q},       {"delta0", tp.delta0}, {"a_minus", tp.a_minus},
                          {"a_plus", tp.a_plus}, {"mu", tp.mu},     {"eta1", tp.eta1},
                          {"eta2", tp.eta2}, {"eps_inf", tp.eps_inf}, {"t_asym", tp.t_asym}};
  }
  j["reaction"] = reaction;
  j["tol_eigen"] = cfg.tol_eigen;
  j["tol_solve"] = cfg.tol_solve;
  j["tol_order"] = cfg.tol_order;
  j["path_points"] = cfg.path_points;
  j["out_dir"] = cfg.out_dir;
  j["seed"] = cfg.seed;
  j["force"] = cfg.force;
  j["identify_tol"] = cfg.identify_tol;
  return j;
}

RunConfig config_from_json(const ordered_json& j) {
  RunConfig cfg;
  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    if (!d.is_array() || d.size() != 2)
      fail(Errc::invalid_config, "config: domain must be [a, b]");
    cfg.a = d[0].get<double>();
    cfg.b = d[1].get<double>();
  }
  cfg.n = j.value("n", cfg.n);
  cfg.p = j.value("p", cfg.p);
  cfg.s = j.value("s", cfg.s);
  if (j.contains("reaction")) {
    const auto& r = j.at("reaction");
    cfg.reaction_type = r.value("type", cfg.reaction_type);
    if (r.contains("eta") && !r.at("eta").is_null()) cfg.eta = r.at("eta").get<double>();
    if (r.contains("gamma") && !r.at("gamma").is_null()) cfg.gamma = r.at("gamma").get<double>();
    if (r.contains("table"))
      for (const auto& pt : r.at("table"))
        cfg.table.emplace_back(pt.at(0).get<double>(), pt.at(1).get<double>());
    if (r.contains("params")) {
      const auto& tp = r.at("params");
      ReactionParams& prm = cfg.table_params;
      prm.c0 = tp.value("c0", prm.c0);
      prm.c1 = tp.value("c1", prm.c1);
      prm.c2 = tp.value("c2", prm.c2);
      prm.q = tp.value("q", prm.q);
      prm.delta0 = tp.value("delta0", prm.delta0);
      prm.a_minus = tp.value("a_minus", prm.a_minus);
      prm.a_plus = tp.value("a_plus", prm.a_plus);
      prm.mu = tp.value("mu", prm.mu);
      prm.eta1 = tp.value("eta1", prm.eta1);
      prm.eta2 = tp.value("eta2", prm.eta2);
      prm.eps_inf = tp.value("eps_inf", prm.eps_inf);
      prm.t_asym = tp.value("t_asym", prm.t_asym);
    }
  }
  cfg.tol_eigen = j.value("tol_eigen", cfg.tol_eigen);
  cfg.tol_solve = j.value("tol_solve", cfg.tol_solve);
  cfg.tol_order = j.value("tol_order", cfg.tol_order);
  cfg.path_points = j.value("path_points", cfg.path_points);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.force = j.value("force", cfg.force);
  cfg.identify_tol = j.value("identify_tol", cfg.identify_tol);
  return cfg;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string dump = config_to_json(cfg).dump();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : dump) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

namespace {

ordered_json summary_to_json(const SolutionSummary& s) {
  return {{"name", s.name},       {"energy", s.energy}, {"residual", s.residual},
          {"min", s.min},         {"max", s.max},       {"iterations", s.iterations},
          {"csv", s.csv}};
}

SolutionSummary summary_from_json(const ordered_json& j) {
  SolutionSummary s;
  s.name = j.at("name").get<std::string>();
  s.energy = j.at("energy").get<double>();
  s.residual = j.at("residual").get<double>();
  s.min = j.at("min").get<double>();
  s.max = j.at("max").get<double>();
  s.iterations = j.at("iterations").get<std::size_t>();
  s.csv = j.at("csv").get<std::string>();
  return s;
}

}  // namespace

ordered_json report_to_json(const SolutionReport& rep) {
  ordered_json j;
  j["lambda1"] = rep.lambda1;
  j["e1"] = {{"min", rep.e1_min}, {"max", rep.e1_max}, {"norm_p", rep.e1_norm_p}};
  j["reaction"] = {{"eta", rep.eta},       {"gamma", rep.gamma}, {"a_plus", rep.a_plus},
                   {"a_minus", rep.a_minus}, {"delta0", rep.delta0}, {"c0", rep.c0},
                   {"c1", rep.c1},         {"c2", rep.c2},       {"q", rep.q},
                   {"mu", rep.mu}};
  j["solutions"] = {{"u0", summary_to_json(rep.u0)},
                    {"u1", summary_to_json(rep.u1)},
                    {"v0", summary_to_json(rep.v0)},
                    {"v1", summary_to_json(rep.v1)},
                    {"nodal", summary_to_json(rep.nodal)}};
  j["case_b_u1"] = rep.case_b_u1;
  j["case_b_v1"] = rep.case_b_v1;
  j["orderings"] = {{"u0_pos", rep.ord_u0_pos},
                    {"u0_below_aplus", rep.ord_u0_below_aplus},
                    {"u1_above_u0", rep.ord_u1_above_u0},
                    {"v0_neg", rep.ord_v0_neg},
                    {"v0_above_aminus", rep.ord_v0_above_aminus},
                    {"v1_below_v0", rep.ord_v1_below_v0},
                    {"nodal_below_u0", rep.ord_nodal_below_u0},
                    {"nodal_above_v0", rep.ord_nodal_above_v0},
                    {"weighted_gap_u0_aplus", rep.weighted_gap_u0_aplus}};
  j["nodal_sign_change"] = rep.nodal_sign_change;
  j["extremal"] = {{"aux_energy", rep.aux_energy},
                   {"barrier_min_gap", rep.barrier_min_gap},
                   {"gap_uplus_u0", rep.gap_uplus_u0},
                   {"gap_vminus_v0", rep.gap_vminus_v0},
                   {"identified_uplus", rep.identified_uplus},
                   {"identified_vminus", rep.identified_vminus},
                   {"gap_split_plus", rep.gap_split_plus},
                   {"gap_split_minus", rep.gap_split_minus}};
  j["phi_tilde"] = {{"u0", rep.phi_tilde_u0},
                    {"v0", rep.phi_tilde_v0},
                    {"nodal", rep.phi_tilde_nodal}};
  j["timestamp"] = rep.timestamp;
  return j;
}

SolutionReport report_from_json(const ordered_json& j) {
  SolutionReport rep;
  rep.lambda1 = j.at("lambda1").get<double>();
  rep.e1_min = j.at("e1").at("min").get<double>();
  rep.e1_max = j.at("e1").at("max").get<double>();
  rep.e1_norm_p = j.at("e1").at("norm_p").get<double>();
  const auto& rx = j.at("reaction");
  rep.eta = rx.at("eta").get<double>();
  rep.gamma = rx.at("gamma").get<double>();
  rep.a_plus = rx.at("a_plus").get<double>();
  rep.a_minus = rx.at("a_minus").get<double>();
  rep.delta0 = rx.at("delta0").get<double>();
  rep.c0 = rx.at("c0").get<double>();
  rep.c1 = rx.at("c1").get<double>();
  rep.c2 = rx.at("c2").get<double>();
  rep.q = rx.at("q").get<double>();
  rep.mu = rx.at("mu").get<double>();
  const auto& sol = j.at("solutions");
  rep.u0 = summary_from_json(sol.at("u0"));
  rep.u1 = summary_from_json(sol.at("u1"));
  rep.v0 = summary_from_json(sol.at("v0"));
  rep.v1 = summary_from_json(sol.at("v1"));
  rep.nodal = summary_from_json(sol.at("nodal"));
  rep.case_b_u1 = j.at("case_b_u1").get<bool>();
  rep.case_b_v1 = j.at("case_b_v1").get<bool>();
  const auto& ord = j.at("orderings");
  rep.ord_u0_pos = ord.at("u0_pos").get<double>();
  rep.ord_u0_below_aplus = ord.at("u0_below_aplus").get<double>();
  rep.ord_u1_above_u0 = ord.at("u1_above_u0").get<double>();
  rep.ord_v0_neg = ord.at("v0_neg").get<double>();
  rep.ord_v0_above_aminus = ord.at("v0_above_aminus").get<double>();
  rep.ord_v1_below_v0 = ord.at("v1_below_v0").get<double>();
  rep.ord_nodal_below_u0 = ord.at("nodal_below_u0").get<double>();
  rep.ord_nodal_above_v0 = ord.at("nodal_above_v0").get<double>();
  rep.weighted_gap_u0_aplus = ord.at("weighted_gap_u0_aplus").get<double>();
  rep.nodal_sign_change = j.at("nodal_sign_change").get<bool>();
  const auto& ext = j.at("extremal");
  rep.aux_energy = ext.at("aux_energy").get<double>();
  rep.barrier_min_gap = ext.at("barrier_min_gap").get<double>();
  rep.gap_uplus_u0 = ext.at("gap_uplus_u0").get<double>();
  rep.gap_vminus_v0 = ext.at("gap_vminus_v0").get<double>();
  rep.identified_uplus = ext.at("identified_uplus").get<bool>();
  rep.identified_vminus = ext.at("identified_vminus").get<bool>();
  rep.gap_split_plus = ext.at("gap_split_plus").get<double>();
  rep.gap_split_minus = ext.at("gap_split_minus").get<double>();
  const auto& pt = j.at("phi_tilde");
  rep.phi_tilde_u0 = pt.at("u0").get<double>();
  rep.phi_tilde_v0 = pt.at("v0").get<double>();
  rep.phi_tilde_nodal = pt.at("nodal").get<double>();
  rep.timestamp = j.at("timestamp").get<std::string>();
  return rep;
}

ordered_json audit_to_json(const AuditReport& audit) {
  ordered_json j;
  j["all_passed"] = audit.all_passed();
  j["lambda1"] = audit.lambda1;
  j["eta1_margin"] = audit.eta1_margin;
  j["largest_t_checked"] = audit.largest_t_checked;
  ordered_json checks = ordered_json::array();
  for (const AuditCheck* c : audit.checks()) {
    ordered_json jc;
    jc["name"] = c->name;
    jc["passed"] = c->passed;
    jc["violations"] = c->violations;
    if (c->witness) {
      jc["witness"] = {{"node", c->witness->node},
                       {"t", c->witness->t},
                       {"lhs", c->witness->lhs},
                       {"rhs", c->witness->rhs}};
    } else {
      jc["witness"] = nullptr;
    }
    checks.push_back(jc);
  }
  j["checks"] = checks;
  return j;
}

// --- export ------------------------------------------------------------------

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::io_error, "cannot open " + path.string());
  out << text;
  if (!out) fail(Errc::io_error, "write failed for " + path.string());
}

void write_csv(const std::filesystem::path& path, const Grid& grid, const GridFunction& u) {
  std::string text = "x,u\n";
  char line[80];
  for (std::size_t i = 0; i < grid.n; ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", grid.nodes[i], u[i]);
    text += line;
  }
  write_text(path, text);
}

}  // namespace

void export_report(const PipelineContext& ctx, const PipelineResult& result,
                   const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::io_error, "cannot create output directory " + dir);

  static const char* kOrder[] = {"e1",     "u0", "u1",     "v0",   "v1",
                                 "u_plus", "v_minus", "w", "nodal"};
  for (const char* name : kOrder) {
    const auto it = result.fields.find(name);
    if (it != result.fields.end())
      write_csv(fs::path(dir) / (std::string(name) + ".csv"), ctx.grid, it->second);
  }

  write_text(fs::path(dir) / "report.json", report_to_json(result.report).dump(2) + "\n");
  write_text(fs::path(dir) / "audit.json", audit_to_json(result.audit).dump(2) + "\n");

  ordered_json manifest;
  manifest["version"] = kVersion;
  manifest["config_hash"] = config_hash(result.cfg);
  manifest["config"] = config_to_json(result.cfg);
  write_text(fs::path(dir) / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace fpls
