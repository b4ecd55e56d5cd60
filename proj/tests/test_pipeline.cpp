#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "fpls/errors.hpp"
#include "fpls/forms.hpp"
#include "fpls/pipeline.hpp"
#include "fpls/solvers.hpp"

using namespace fpls;

namespace {

RunConfig small_config() {
  RunConfig cfg;
  cfg.n = 64;
  cfg.tol_solve = 1e-9;
  cfg.out_dir = "pipeline_test_out";
  return cfg;
}

struct FullRun {
  PipelineContext ctx;
  PipelineResult result;
};

const FullRun& small_run() {
  static const FullRun run = [] {
    FullRun r{prepare(small_config()), {}};
    run_full(r.ctx, r.result);
    return r;
  }();
  return run;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string strip_timestamp(std::string text) {
  static const std::regex stamp("\"timestamp\": \"[^\"]*\"");
  return std::regex_replace(text, stamp, "\"timestamp\": \"X\"");
}

}  // namespace

TEST_SUITE_BEGIN("pipeline");

TEST_CASE("five solutions with the expected orderings") {
  const FullRun& run = small_run();
  const SolutionReport& rep = run.result.report;
  const double tol_order = run.ctx.cfg.tol_order;

  CHECK(rep.lambda1 > 0.0);
  CHECK(rep.eta == doctest::Approx(rep.lambda1 + 1.0));
  CHECK(rep.gamma == doctest::Approx(rep.eta + 1.5));

  // two positive, two negative, one nodal
  CHECK(rep.ord_u0_pos > 0.0);
  CHECK(rep.ord_u0_below_aplus > 0.0);
  CHECK(rep.ord_u1_above_u0 > -tol_order);
  CHECK(rep.ord_v0_neg > 0.0);
  CHECK(rep.ord_v0_above_aminus > 0.0);
  CHECK(rep.ord_v1_below_v0 > -tol_order);
  CHECK(rep.nodal_sign_change);
  CHECK(rep.nodal.min < -tol_order);
  CHECK(rep.nodal.max > tol_order);
  CHECK(rep.ord_nodal_below_u0 > -tol_order);
  CHECK(rep.ord_nodal_above_v0 > -tol_order);

  // energies of the first wells are negative
  CHECK(rep.u0.energy < 0.0);
  CHECK(rep.v0.energy < 0.0);
  // pass level strictly above both endpoint energies
  CHECK(rep.phi_tilde_nodal > std::max(rep.phi_tilde_u0, rep.phi_tilde_v0) + 1e-10);

  // every reported solution is a critical point of the untruncated energy
  for (const SolutionSummary* s : {&rep.u0, &rep.u1, &rep.v0, &rep.v1, &rep.nodal})
    CHECK(s->residual < 10.0 * run.ctx.cfg.tol_solve);

  // the boundary-weighted gap to the upper zero stays positive
  CHECK(rep.weighted_gap_u0_aplus > 0.0);
}

TEST_CASE("reported residuals recompute from the untruncated gradient") {
  const FullRun& run = small_run();
  const GridFunction& u0 = run.result.fields.at("u0");
  const double recomputed = gradient_proxy_norm(
      run.ctx.grid, energy_gradient(run.ctx.grid, run.ctx.reaction, u0));
  CHECK(std::abs(recomputed - run.result.report.u0.residual) < 1e-12);
  CHECK(recomputed < run.ctx.cfg.tol_solve);
}

TEST_CASE("odd reaction on the symmetric domain mirrors the branches exactly") {
  const FullRun& run = small_run();
  const GridFunction& u0 = run.result.fields.at("u0");
  const GridFunction& v0 = run.result.fields.at("v0");
  const GridFunction& u1 = run.result.fields.at("u1");
  const GridFunction& v1 = run.result.fields.at("v1");
  for (std::size_t i = 0; i < u0.size(); ++i) {
    CHECK(v0[i] == -u0[i]);  // reflection reuse is bit-exact for odd reactions
    CHECK(v1[i] == -u1[i]);
  }
}

TEST_CASE("extremal stage identifies the least solution with the first well") {
  const FullRun& run = small_run();
  const SolutionReport& rep = run.result.report;
  CHECK(rep.aux_energy < 0.0);
  CHECK(rep.barrier_min_gap > -run.ctx.cfg.tol_order);
  CHECK(rep.gap_uplus_u0 < run.ctx.cfg.identify_tol);
  CHECK(rep.gap_vminus_v0 < run.ctx.cfg.identify_tol);
  CHECK(rep.identified_uplus);
  CHECK(rep.identified_vminus);
  // the split functionals recover the constant-sign minimizers
  CHECK(rep.gap_split_plus < 1e-5);
  CHECK(rep.gap_split_minus < 1e-5);
}

TEST_CASE("report serialization round-trips losslessly") {
  const FullRun& run = small_run();
  const ordered_json j = report_to_json(run.result.report);
  const SolutionReport back = report_from_json(ordered_json::parse(j.dump()));
  CHECK(back == run.result.report);
}

TEST_CASE("config serialization round-trips") {
  RunConfig cfg = small_config();
  cfg.eta = 9.0;
  cfg.gamma = 11.0;
  cfg.seed = 1234;
  cfg.force = true;
  const RunConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.a == cfg.a);
  CHECK(back.b == cfg.b);
  CHECK(back.n == cfg.n);
  CHECK(back.p == cfg.p);
  CHECK(back.s == cfg.s);
  CHECK(back.eta == cfg.eta);
  CHECK(back.gamma == cfg.gamma);
  CHECK(back.tol_solve == cfg.tol_solve);
  CHECK(back.seed == cfg.seed);
  CHECK(back.force == cfg.force);
  CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("export writes the report, manifest, and per-solution CSVs") {
  namespace fs = std::filesystem;
  const FullRun& run = small_run();
  const std::string dir = "pipeline_test_out/export";
  fs::remove_all(dir);
  export_report(run.ctx, run.result, dir);

  for (const char* name : {"report.json", "manifest.json", "audit.json", "u0.csv", "u1.csv",
                           "v0.csv", "v1.csv", "nodal.csv", "e1.csv"})
    CHECK(fs::exists(fs::path(dir) / name));

  // CSV contract: header plus one row per node
  const std::string csv = slurp(fs::path(dir) / "u0.csv");
  CHECK(csv.rfind("x,u\n", 0) == 0);
  CHECK(static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n')) ==
        run.ctx.grid.n + 1);

  // report.json parses back to the in-memory report
  const SolutionReport parsed =
      report_from_json(ordered_json::parse(slurp(fs::path(dir) / "report.json")));
  CHECK(parsed == run.result.report);

  const ordered_json manifest = ordered_json::parse(slurp(fs::path(dir) / "manifest.json"));
  CHECK(manifest.at("version").get<std::string>() == kVersion);
  CHECK(manifest.at("config_hash").get<std::string>() == config_hash(run.result.cfg));
}

TEST_CASE("rerunning the same configuration is deterministic") {
  namespace fs = std::filesystem;
  const RunConfig cfg = small_config();
  std::string dirs[2] = {"pipeline_test_out/det_a", "pipeline_test_out/det_b"};
  for (const std::string& dir : dirs) {
    fs::remove_all(dir);
    const PipelineContext ctx = prepare(cfg);
    PipelineResult result;
    run_full(ctx, result);
    export_report(ctx, result, dir);
  }
  const std::string rep_a = slurp(fs::path(dirs[0]) / "report.json");
  const std::string rep_b = slurp(fs::path(dirs[1]) / "report.json");
  CHECK(strip_timestamp(rep_a) == strip_timestamp(rep_b));
  CHECK(slurp(fs::path(dirs[0]) / "manifest.json") ==
        slurp(fs::path(dirs[1]) / "manifest.json"));
  for (const char* csv : {"u0.csv", "u1.csv", "v0.csv", "v1.csv", "nodal.csv"})
    CHECK(slurp(fs::path(dirs[0]) / csv) == slurp(fs::path(dirs[1]) / csv));
}

TEST_CASE("configuration validation") {
  RunConfig cfg = small_config();
  cfg.p = 1.5;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = small_config();
  cfg.s = 0.6;  // p*s = 1.2
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = small_config();
  cfg.a = 2.0;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = small_config();
  cfg.eta = 5.0;
  cfg.gamma = 5.5;  // needs gamma > eta + 1
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = small_config();
  cfg.reaction_type = "unknown";
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg = small_config();
  cfg.eta = 0.5;  // below lambda1: rejected when resolving the reaction
  CHECK_THROWS_AS(prepare(cfg), Error);
}

TEST_CASE("single-engine stages agree with the pipeline") {
  const FullRun& run = small_run();
  const SolveOutcome u0 = stage_minimize(run.ctx);
  double gap = 0.0;
  const GridFunction& ref = run.result.fields.at("u0");
  for (std::size_t i = 0; i < ref.size(); ++i)
    gap = std::max(gap, std::abs(u0.u[i] - ref[i]));
  CHECK(gap < 1e-7);

  const SolveOutcome uplus = stage_monotone(run.ctx);
  gap = 0.0;
  const GridFunction& ref_plus = run.result.fields.at("u_plus");
  for (std::size_t i = 0; i < ref_plus.size(); ++i)
    gap = std::max(gap, std::abs(uplus.u[i] - ref_plus[i]));
  CHECK(gap < 1e-7);
}

TEST_CASE("tabulated reactions drive the same machinery under --force") {
  // Tables are log-dense near the origin so the sublinear well survives the
  // interpolation, yet no finite table reproduces square-root growth inside
  // its innermost cell: the audit honestly rejects the sublinearity claim and
  // force runs the first stage anyway.
  RunConfig cfg = small_config();
  const Reaction model = example_reaction(9.0, 11.0);
  cfg.reaction_type = "tabulated";
  cfg.eta = std::numeric_limits<double>::quiet_NaN();
  cfg.table.emplace_back(0.0, 0.0);
  for (int k = 0; k <= 80; ++k) {
    const double t = 1e-6 * std::pow(2.5e6, k / 80.0);
    cfg.table.emplace_back(t, model.f(0, t));
    cfg.table.emplace_back(-t, model.f(0, -t));
  }
  cfg.table_params.eta1 = 9.0;
  cfg.table_params.eta2 = 9.0;
  cfg.table_params.eps_inf = 10.0;  // linear tail extension is only approximate
  cfg.table_params.mu = 1.75;
  cfg.force = true;
  const PipelineContext ctx = prepare(cfg);
  CHECK(ctx.reaction.params().a_plus > 0.0);
  CHECK_FALSE(ctx.audit.sublinear.passed);
  const SolveOutcome u0 = stage_minimize(ctx);
  CHECK(u0.energy < 0.0);
  CHECK(norm_inf(u0.u) > 0.0);
  CHECK(norm_inf(u0.u) <= ctx.reaction.params().a_plus + 1e-8);

  // without force the audit gate rejects the run
  cfg.force = false;
  CHECK_THROWS_AS(prepare(cfg), Error);
}

TEST_SUITE_END();
