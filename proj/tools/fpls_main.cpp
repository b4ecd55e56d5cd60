// Command-line driver for the nonlocal multiplicity pipeline.
//
// Subcommands:
//   eigen          first eigenpair of the weighted nonlocal eigenproblem
//   audit          reaction hypothesis audit, printed as JSON
//   solve          full five-solution pipeline with report/CSV export
//   minimize       first positive solution (coercive minimization only)
//   monotone       least positive solution (monotone iteration only)
//   mountain-pass  full pipeline, reporting the nodal mountain-pass solution
//
// Exit codes: 0 success, 2 hypothesis-audit failure, 3 solver failure,
// 4 invalid configuration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"

#include "fpls/errors.hpp"
#include "fpls/forms.hpp"
#include "fpls/pipeline.hpp"

namespace {

int exit_code_for(fpls::Errc code) {
  switch (code) {
    case fpls::Errc::audit_failed:
      return 2;
    case fpls::Errc::invalid_config:
    case fpls::Errc::invalid_order:
    case fpls::Errc::invalid_domain:
    case fpls::Errc::grid_mismatch:
    case fpls::Errc::parameter_constraint:
    case fpls::Errc::no_sign_change:
    case fpls::Errc::invalid_weight:
      return 4;
    default:
      return 3;
  }
}

struct Flags {
  std::string config_path;
  std::string domain;
  std::optional<std::size_t> n;
  std::optional<double> p, s, eta, gamma, tol, tol_eigen, tol_order;
  std::optional<std::size_t> path_points;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool force = false;
};

fpls::RunConfig make_config(const Flags& flags) {
  fpls::RunConfig cfg;
  if (!flags.config_path.empty()) {
    std::ifstream in(flags.config_path);
    if (!in) fpls::fail(fpls::Errc::invalid_config, "cannot read config file " + flags.config_path);
    fpls::ordered_json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      fpls::fail(fpls::Errc::invalid_config, std::string("config parse error: ") + e.what());
    }
    cfg = fpls::config_from_json(j);
  }
  if (!flags.domain.empty()) {
    const auto comma = flags.domain.find(',');
    if (comma == std::string::npos)
      fpls::fail(fpls::Errc::invalid_config, "--domain expects 'a,b'");
    try {
      cfg.a = std::stod(flags.domain.substr(0, comma));
      cfg.b = std::stod(flags.domain.substr(comma + 1));
    } catch (const std::exception&) {
      fpls::fail(fpls::Errc::invalid_config, "--domain expects numbers 'a,b'");
    }
  }
  if (flags.n) cfg.n = *flags.n;
  if (flags.p) cfg.p = *flags.p;
  if (flags.s) cfg.s = *flags.s;
  if (flags.eta) cfg.eta = *flags.eta;
  if (flags.gamma) cfg.gamma = *flags.gamma;
  if (flags.tol) cfg.tol_solve = *flags.tol;
  if (flags.tol_eigen) cfg.tol_eigen = *flags.tol_eigen;
  if (flags.tol_order) cfg.tol_order = *flags.tol_order;
  if (flags.path_points) cfg.path_points = *flags.path_points;
  if (flags.out) cfg.out_dir = *flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.force) cfg.force = true;
  return cfg;
}

void write_solution_csv(const fpls::PipelineContext& ctx, const fpls::GridFunction& u,
                        const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fpls::fail(fpls::Errc::io_error, "cannot open " + path);
  out << "x,u\n";
  char line[80];
  for (std::size_t i = 0; i < ctx.grid.n; ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", ctx.grid.nodes[i], u[i]);
    out << line;
  }
}

void print_outcome(const char* name, const fpls::SolveOutcome& out) {
  std::printf("%s: energy = %.17g, residual = %.6e, iterations = %zu\n", name, out.energy,
              out.residual, out.iterations);
}

int cmd_eigen(const fpls::RunConfig& cfg) {
  fpls::validate(cfg);
  const fpls::Grid grid = fpls::build_grid(cfg.a, cfg.b, cfg.n, cfg.p, cfg.s);
  const fpls::EigenPair pair =
      fpls::first_eigenpair(grid, fpls::GridFunction(grid.n, 1.0), cfg.tol_eigen);
  std::printf("lambda1 = %.17g\n", pair.lambda1);
  std::printf("residual = %.6e, iterations = %zu\n", pair.residual, pair.iterations);
  std::filesystem::create_directories(cfg.out_dir);
  const std::string path = cfg.out_dir + "/e1.csv";
  std::ofstream out(path, std::ios::binary);
  if (!out) fpls::fail(fpls::Errc::io_error, "cannot open " + path);
  out << "x,u\n";
  char line[80];
  for (std::size_t i = 0; i < grid.n; ++i) {
    std::snprintf(line, sizeof line, "%.17g,%.17g\n", grid.nodes[i], pair.e1[i]);
    out << line;
  }
  std::printf("e1 written to %s\n", path.c_str());
  return 0;
}

int cmd_audit(fpls::RunConfig cfg) {
  cfg.force = true;  // audit reports, the exit code carries the verdict
  const fpls::PipelineContext ctx = fpls::prepare(cfg);
  std::cout << fpls::audit_to_json(ctx.audit).dump(2) << "\n";
  return ctx.audit.all_passed() ? 0 : 2;
}

int cmd_solve(const fpls::RunConfig& cfg) {
  const fpls::PipelineContext ctx = fpls::prepare(cfg);
  fpls::PipelineResult result;
  try {
    fpls::run_full(ctx, result);
  } catch (const fpls::Error&) {
    fpls::export_report(ctx, result, ctx.cfg.out_dir);  // keep partial output
    throw;
  }
  fpls::export_report(ctx, result, ctx.cfg.out_dir);
  const fpls::SolutionReport& rep = result.report;
  std::printf("lambda1 = %.17g, eta = %.6g, gamma = %.6g, a+ = %.6g\n", rep.lambda1, rep.eta,
              rep.gamma, rep.a_plus);
  for (const fpls::SolutionSummary* s : {&rep.u0, &rep.u1, &rep.v0, &rep.v1, &rep.nodal})
    std::printf("%-5s energy = %+.10e  residual = %.3e  range = [%+.6e, %+.6e]\n",
                s->name.c_str(), s->energy, s->residual, s->min, s->max);
  std::printf("nodal sign change: %s\n", rep.nodal_sign_change ? "yes" : "no");
  std::printf("report written to %s\n", (ctx.cfg.out_dir + "/report.json").c_str());
  return 0;
}

int cmd_minimize(const fpls::RunConfig& cfg) {
  const fpls::PipelineContext ctx = fpls::prepare(cfg);
  const fpls::SolveOutcome out = fpls::stage_minimize(ctx);
  print_outcome("u0", out);
  std::filesystem::create_directories(ctx.cfg.out_dir);
  write_solution_csv(ctx, out.u, ctx.cfg.out_dir + "/u0.csv");
  return 0;
}

int cmd_monotone(const fpls::RunConfig& cfg) {
  const fpls::PipelineContext ctx = fpls::prepare(cfg);
  const fpls::SolveOutcome out = fpls::stage_monotone(ctx);
  print_outcome("u_plus", out);
  std::filesystem::create_directories(ctx.cfg.out_dir);
  write_solution_csv(ctx, out.u, ctx.cfg.out_dir + "/u_plus.csv");
  return 0;
}

int cmd_mountain_pass(const fpls::RunConfig& cfg) {
  const fpls::PipelineContext ctx = fpls::prepare(cfg);
  fpls::PipelineResult result;
  try {
    fpls::run_full(ctx, result);
  } catch (const fpls::Error&) {
    fpls::export_report(ctx, result, ctx.cfg.out_dir);
    throw;
  }
  fpls::export_report(ctx, result, ctx.cfg.out_dir);
  const fpls::SolutionReport& rep = result.report;
  std::printf("nodal: energy = %.17g, residual = %.3e, range = [%+.6e, %+.6e]\n",
              rep.nodal.energy, rep.nodal.residual, rep.nodal.min, rep.nodal.max);
  std::printf("pass level = %.17g vs endpoints max = %.17g\n", rep.phi_tilde_nodal,
              std::max(rep.phi_tilde_u0, rep.phi_tilde_v0));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonlocal p-Laplacian five-solution variational pipeline"};
  app.require_subcommand(1);

  Flags flags;
  app.add_option("--config", flags.config_path, "JSON run configuration (flags override it)");
  app.add_option("--domain", flags.domain, "domain endpoints 'a,b'");
  app.add_option("--n", flags.n, "number of grid cells");
  app.add_option("--p", flags.p, "exponent p >= 2");
  app.add_option("--s", flags.s, "fractional order s in (0,1), with p*s < 1");
  app.add_option("--eta", flags.eta, "asymptotic slope (default lambda1 + 1)");
  app.add_option("--gamma", flags.gamma, "reaction dip parameter (default eta + 1.5)");
  app.add_option("--tol", flags.tol, "solver tolerance (gradient proxy norm)");
  app.add_option("--tol-eigen", flags.tol_eigen, "eigen solver tolerance");
  app.add_option("--tol-order", flags.tol_order, "ordering tolerance");
  app.add_option("--path-points", flags.path_points, "mountain-pass path size M");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--seed", flags.seed, "seed recorded in the manifest");
  app.add_flag("--force", flags.force, "run even if the hypothesis audit fails");

  auto* sc_eigen = app.add_subcommand("eigen", "first eigenpair; prints lambda1, writes e1.csv");
  auto* sc_audit = app.add_subcommand("audit", "hypothesis audit as JSON");
  auto* sc_solve = app.add_subcommand("solve", "full pipeline; writes report and CSVs");
  auto* sc_min = app.add_subcommand("minimize", "first positive solution only");
  auto* sc_mp = app.add_subcommand("mountain-pass", "pipeline with nodal pass summary");
  auto* sc_mono = app.add_subcommand("monotone", "least positive solution only");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 4;
  }

  try {
    const fpls::RunConfig cfg = make_config(flags);
    if (sc_eigen->parsed()) return cmd_eigen(cfg);
    if (sc_audit->parsed()) return cmd_audit(cfg);
    if (sc_solve->parsed()) return cmd_solve(cfg);
    if (sc_min->parsed()) return cmd_minimize(cfg);
    if (sc_mp->parsed()) return cmd_mountain_pass(cfg);
    if (sc_mono->parsed()) return cmd_monotone(cfg);
  } catch (const fpls::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
