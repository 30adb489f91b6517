#include <CLI11.hpp>
#include <cstdio>

#include "commands.hpp"

namespace {

using namespace fgps::cli;

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--out", common.out_dir, "Output directory (default $FGPS_OUT_DIR or .)");
  cmd->add_flag("--svg", common.svg, "Also write an SVG plot");
  cmd->add_option("--jobs", common.jobs, "Parallel solves in sweeps")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", common.seed, "Seed for randomized checks");
}

void add_quadrature(CLI::App* cmd, QuadratureArgs& q) {
  cmd->add_option("--ng", q.ng, "Gegenbauer polynomial degree N_G");
  cmd->add_option("--lambda", q.lambda, "Gegenbauer index lambda > -1/2");
}

void add_problem(CLI::App* cmd, ProblemArgs& p, bool scalar_n = true) {
  cmd->add_option("--problem", p.problem, "Registered problem name or JSON file");
  if (scalar_n) cmd->add_option("--n", p.n, "Collocation points N (even)");
  cmd->add_option("--memory", p.memory, "Memory length L");
  add_quadrature(cmd, p.quad);
  cmd->add_option("--tol-step", p.nlp.tol_step, "Step-norm stopping tolerance");
  cmd->add_option("--tol-obj", p.nlp.tol_obj, "Objective-change stopping tolerance");
  cmd->add_option("--tol-feas", p.nlp.tol_feas, "Feasibility tolerance");
  cmd->add_option("--tol-grad", p.nlp.tol_grad, "Inner projected-gradient tolerance");
  cmd->add_option("--max-outer", p.nlp.max_outer, "Outer iteration limit");
  cmd->add_option("--max-inner", p.nlp.max_inner, "Inner iteration limit");
  cmd->add_flag("--trace", p.trace, "Write the solver trace CSV");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fourier-Gegenbauer pseudospectral fractional derivatives and periodic optimal control"};
  app.require_subcommand(1);
  Common common;
  int code = 0;

  NodesArgs nodes;
  auto* c_nodes = app.add_subcommand("nodes", "Gegenbauer-Gauss nodes and integration weights");
  c_nodes->add_option("--ng", nodes.ng, "Polynomial degree N_G")->required();
  c_nodes->add_option("--lambda", nodes.lambda, "Gegenbauer index lambda > -1/2");
  add_common(c_nodes, common);
  c_nodes->callback([&] { code = guarded([&] { return cmd_nodes(nodes, common); }); });

  FracderivArgs fd;
  auto* c_fd = app.add_subcommand("fracderiv", "Fractional derivative at the nodes against the oracle");
  c_fd->add_option("--f", fd.f, "sin, cos, or an expression in t");
  c_fd->add_option("--alpha", fd.alpha, "Order alpha (non-integer)");
  c_fd->add_option("--memory", fd.memory, "Memory length L");
  c_fd->add_option("--n", fd.n, "Grid size N (even)");
  c_fd->add_option("--period", fd.period, "Period T");
  c_fd->add_flag("--verify", common.verify, "Spot-check the circulant matrix");
  add_quadrature(c_fd, fd.quad);
  add_common(c_fd, common);
  c_fd->callback([&] { code = guarded([&] { return cmd_fracderiv(fd, common); }); });

  ConvergenceArgs conv;
  auto* c_conv = app.add_subcommand("convergence", "Max node error over a grid of orders and N");
  c_conv->add_option("--f", conv.f, "sin, cos, or an expression in t");
  c_conv->add_option("--alpha", conv.alphas, "Orders (repeatable or comma separated)")->delimiter(',');
  c_conv->add_option("--n", conv.ns, "Grid sizes (repeatable or comma separated)")->delimiter(',');
  c_conv->add_option("--memory", conv.memory, "Memory length L");
  c_conv->add_option("--period", conv.period, "Period T");
  c_conv->add_flag("--verify", common.verify, "Spot-check the circulant matrix");
  add_quadrature(c_conv, conv.quad);
  add_common(c_conv, common);
  c_conv->callback([&] { code = guarded([&] { return cmd_convergence(conv, common); }); });

  BoundArgs bound;
  auto* c_bound = app.add_subcommand("bound", "Truncation error bound against L, N and m");
  c_bound->add_option("--n", bound.n, "Grid size N");
  c_bound->add_option("--alpha", bound.alpha, "Order alpha");
  c_bound->add_option("--memory", bound.memory, "Memory length L");
  c_bound->add_option("--ng", bound.ng, "Polynomial degree N_G");
  c_bound->add_option("--lambda", bound.lambda, "Gegenbauer index");
  c_bound->add_option("--zeta", bound.zeta, "Mean-value point in (0, 1]");
  c_bound->add_option("--gap", bound.gap, "m - alpha used in the m sweep");
  c_bound->add_option("--d-lambda", bound.d_lambda, "Constant D^lambda");
  c_bound->add_option("--b1-lambda", bound.b1_lambda, "Constant B1^lambda");
  c_bound->add_option("--branch", bound.branch, "auto or asymptotic");
  add_common(c_bound, common);
  c_bound->callback([&] { code = guarded([&] { return cmd_bound(bound, common); }); });

  SolveArgs solve;
  auto* c_solve = app.add_subcommand("solve", "Solve a periodic fractional optimal control problem");
  add_problem(c_solve, solve.base);
  c_solve->add_option("--alpha", solve.alpha, "Order alpha");
  add_common(c_solve, common);
  c_solve->callback([&] { code = guarded([&] { return cmd_solve(solve, common); }); });

  SweepArgs sweep;
  auto* c_sweep = app.add_subcommand("sweep-alpha", "Solve for a list of orders");
  add_problem(c_sweep, sweep.base);
  c_sweep->add_option("--alpha", sweep.alphas, "Orders (repeatable or comma separated)")->delimiter(',');
  add_common(c_sweep, common);
  c_sweep->callback([&] { code = guarded([&] { return cmd_sweep_alpha(sweep, common); }); });

  JnArgs jn;
  auto* c_jn = app.add_subcommand("jn-table", "Optimal objective against N");
  add_problem(c_jn, jn.base, false);
  c_jn->add_option("--alpha", jn.alpha, "Order alpha");
  c_jn->add_option("--n", jn.ns, "Grid sizes (repeatable or comma separated)")->delimiter(',');
  add_common(c_jn, common);
  c_jn->callback([&] { code = guarded([&] { return cmd_jn_table(jn, common); }); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }
  return code;
}
