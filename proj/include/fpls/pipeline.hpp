#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fpls/eigenpair.hpp"
#include "fpls/grid.hpp"
#include "fpls/reaction.hpp"
#include "fpls/solvers.hpp"

namespace fpls {

using ordered_json = nlohmann::ordered_json;

inline constexpr const char* kVersion = "0.1.0";

/// Full run configuration; validated against the grid preconditions.
struct RunConfig {
  double a = -1.0;
  double b = 1.0;
  std::size_t n = 200;
  double p = 2.0;
  double s = 0.4;

  std::string reaction_type = "example";  // "example" | "tabulated"
  // NaN means "resolve at run time": eta = lambda1 + 1, gamma = eta + 3/2.
  double eta = std::numeric_limits<double>::quiet_NaN();
  double gamma = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::pair<double, double>> table;  // tabulated (t, f) pairs
  ReactionParams table_params;                   // declared constants for tables

  double tol_eigen = 1e-10;
  double tol_solve = 1e-8;
  double tol_order = 1e-6;
  std::size_t path_points = 41;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool force = false;          // run the pipeline even if the audit fails
  double identify_tol = 1e-4;  // max-norm gap for identifying u+ with u0
};

void validate(const RunConfig& cfg);  // throws Errc::invalid_config and friends
RunConfig config_from_json(const ordered_json& j);
ordered_json config_to_json(const RunConfig& cfg);
std::string config_hash(const RunConfig& cfg);  // FNV-1a over the canonical dump

/// Scalar summary of one computed solution; the nodal values live in the CSV.
struct SolutionSummary {
  std::string name;
  double energy = 0.0;    // untruncated problem energy
  double residual = 0.0;  // gradient proxy of the untruncated energy
  double min = 0.0;
  double max = 0.0;
  std::size_t iterations = 0;
  std::string csv;
  bool operator==(const SolutionSummary&) const = default;
};

/// Everything report.json carries. Ordering fields hold the minimum nodal
/// margin of the stated inequality; positive values mean it holds strictly.
struct SolutionReport {
  double lambda1 = 0.0;
  double e1_min = 0.0, e1_max = 0.0, e1_norm_p = 0.0;
  double eta = 0.0, gamma = 0.0;
  double a_plus = 0.0, a_minus = 0.0, delta0 = 0.0;
  double c0 = 0.0, c1 = 0.0, c2 = 0.0, q = 0.0, mu = 0.0;

  SolutionSummary u0, u1, v0, v1, nodal;
  bool case_b_u1 = false, case_b_v1 = false;  // second solution via mountain pass

  double ord_u0_pos = 0.0;          // min u0
  double ord_u0_below_aplus = 0.0;  // min (a_plus - u0)
  double ord_u1_above_u0 = 0.0;     // min (u1 - u0)
  double ord_v0_neg = 0.0;          // min (-v0)
  double ord_v0_above_aminus = 0.0; // min (v0 - a_minus)
  double ord_v1_below_v0 = 0.0;     // min (v0 - v1)
  double ord_nodal_below_u0 = 0.0;  // min (u0 - nodal)
  double ord_nodal_above_v0 = 0.0;  // min (nodal - v0)
  double weighted_gap_u0_aplus = 0.0;  // min (a_plus - u0) / d^s
  bool nodal_sign_change = false;

  double aux_energy = 0.0;        // minimum of the auxiliary q-problem energy
  double barrier_min_gap = 0.0;   // min (u_plus - theta w)
  double gap_uplus_u0 = 0.0;      // max-norm gap between u_plus and u0
  double gap_vminus_v0 = 0.0;
  bool identified_uplus = false;  // gap below the identification threshold
  bool identified_vminus = false;
  double gap_split_plus = 0.0;    // |argmin of the positive split - u0|_inf
  double gap_split_minus = 0.0;

  double phi_tilde_u0 = 0.0;     // interval-truncated energy at u0
  double phi_tilde_v0 = 0.0;
  double phi_tilde_nodal = 0.0;  // mountain-pass level

  std::string timestamp;

  bool operator==(const SolutionReport&) const = default;
};

ordered_json report_to_json(const SolutionReport& rep);
SolutionReport report_from_json(const ordered_json& j);
ordered_json audit_to_json(const AuditReport& audit);

/// Shared state of a run: grid, eigenpair, resolved reaction, audit verdicts.
struct PipelineContext {
  RunConfig cfg;
  Grid grid;
  EigenPair eigen;
  Reaction reaction;
  AuditReport audit;
};

/// Scalars plus the nodal fields each stage produced (keys: e1, u0, u1, v0,
/// v1, u_plus, v_minus, w, nodal).
struct PipelineResult {
  RunConfig cfg;
  SolutionReport report;
  AuditReport audit;
  std::map<std::string, GridFunction> fields;
};

/// Grid + eigenpair + reaction resolution + hypothesis audit. Throws
/// Errc::audit_failed when a check fails and cfg.force is not set.
PipelineContext prepare(const RunConfig& cfg);

/// Four constant-sign solutions (two positive, two negative).
void run_constant_sign(const PipelineContext& ctx, PipelineResult& result);
/// Extremal constant-sign solutions by monotone iteration, plus the auxiliary
/// barrier diagnostics.
void run_extremal(const PipelineContext& ctx, PipelineResult& result);
/// Nodal solution by mountain pass between u0 and v0 under the interval
/// truncation; also re-derives u0 and v0 from the sign-split functionals.
void run_nodal(const PipelineContext& ctx, PipelineResult& result);

/// All three stages. `result` is filled progressively, so partial output
/// survives a thrown stage for diagnosis.
void run_full(const PipelineContext& ctx, PipelineResult& result);

/// Single engines behind the CLI subcommands `minimize` and `monotone`:
/// the first positive solution by coercive minimization, and the least
/// positive solution by monotone iteration from an eigenfunction subsolution.
SolveOutcome stage_minimize(const PipelineContext& ctx);
SolveOutcome stage_monotone(const PipelineContext& ctx);

/// Largest eigenfunction multiple that is a strict discrete subsolution
/// within the sublinear regime, scaled by `shrink`.
GridFunction eigen_subsolution(const PipelineContext& ctx, double shrink = 1.0);

/// report.json + manifest.json + one CSV per field (header "x,u", one row per
/// node, 17 significant digits).
void export_report(const PipelineContext& ctx, const PipelineResult& result,
                   const std::string& dir);

}  // namespace fpls
