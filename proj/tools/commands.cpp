#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "fgps/common.hpp"
#include "fgps/errorbound.hpp"
#include "fgps/expr.hpp"
#include "fgps/fourier.hpp"
#include "fgps/fracderiv.hpp"
#include "fgps/gegenbauer.hpp"
#include "fgps/ocp.hpp"
#include "svg.hpp"

namespace fgps::cli {

namespace fs = std::filesystem;

std::string short_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

fs::path output_dir(const Common& common) {
  fs::path dir = common.out_dir;
  if (dir.empty()) {
    const char* env = std::getenv("FGPS_OUT_DIR");
    dir = env && *env ? fs::path(env) : fs::path(".");
  }
  fs::create_directories(dir);
  return dir;
}

class Csv {
 public:
  Csv(const fs::path& path, const std::vector<std::string>& header) : path_(path), out_(path) {
    if (!out_) throw std::runtime_error("cannot open " + path.string() + " for writing");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

void validate_jobs(int jobs) {
  if (jobs < 1) throw UsageError("--jobs must be at least 1");
}

// Calls body(i) for i in [0, count) on up to `jobs` threads. The first
// exception is rethrown after all threads finish.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body) {
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> threads;
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (failure) std::rethrow_exception(failure);
}

gegenbauer::QuadratureRule make_rule(const QuadratureArgs& q) {
  return gegenbauer::make_rule(q.ng, gegenbauer::GegenbauerIndex(q.lambda));
}

// Test function and its m-th derivative. sin and cos are exact; any other
// text is parsed as an expression in t and differentiated by a 13-point stencil.
struct TestFunction {
  std::string name;
  fracderiv::RealFunction f;
  std::function<double(int, double)> deriv;
};

TestFunction test_function(const std::string& name, double period) {
  if (name == "sin") {
    return {name, [](double t) { return std::sin(t); },
            [](int m, double t) { return std::sin(t + m * std::numbers::pi / 2); }};
  }
  if (name == "cos") {
    return {name, [](double t) { return std::cos(t); },
            [](int m, double t) { return std::cos(t + m * std::numbers::pi / 2); }};
  }
  const expr::Expr e = expr::parse(name, 0, 0);
  auto f = [e](double t) { return e.eval({t, {}, {}}); };
  const double h = period / 64.0;
  return {name, f, [f, h](int m, double t) { return fracderiv::stencil_derivative(f, m, t, h); }};
}

struct FdRow {
  double t, approx, oracle, error;
  bool oracle_converged;
};

struct FdCheck {
  std::vector<FdRow> rows;
  double max_error = 0.0;
  std::size_t unconverged = 0;
};

FdCheck fd_check(const TestFunction& fn, double alpha, double memory, std::size_t n,
                 double period, const gegenbauer::QuadratureRule& rule, const Common& common) {
  const fourier::FourierGrid grid(period, n);
  const fracderiv::FractionalOrder order(alpha, memory);
  fracderiv::BuildOptions build;
  build.verify = common.verify;
  build.seed = common.seed;
  const auto fim = fracderiv::build_fim(grid, rule, order, build);
  std::vector<double> samples(n);
  for (std::size_t j = 0; j < n; ++j) samples[j] = fn.f(grid.node(j));
  const auto approx = fracderiv::approx_fd_at_nodes(fim, samples);
  const int m = order.ceiling();
  const fracderiv::RealFunction fm = [&fn, m](double t) { return fn.deriv(m, t); };

  FdCheck check;
  for (std::size_t l = 0; l < n; ++l) {
    const auto oracle = fracderiv::reduced_fd_oracle(fm, order, grid.node(l));
    const double err = std::fabs(approx[l] - oracle.value);
    check.rows.push_back({grid.node(l), approx[l], oracle.value, err, oracle.converged});
    check.max_error = std::max(check.max_error, err);
    if (!oracle.converged) ++check.unconverged;
  }
  return check;
}

struct ProblemSource {
  bool from_file = false;
  std::string text;  // file contents or registry name
  std::string name;
  std::optional<double> memory;

  ocp::OcpProblem make(std::optional<double> alpha) const {
    if (!from_file) {
      return ocp::registry_lookup(text, alpha.value_or(0.99999), memory.value_or(30.0));
    }
    ocp::OcpProblem p = ocp::problem_from_json(text, name);
    if (alpha || memory) {
      p.order = fracderiv::FractionalOrder(alpha.value_or(p.order.alpha()),
                                           memory.value_or(p.order.memory()));
    }
    return p;
  }
};

ProblemSource problem_source(const ProblemArgs& args) {
  ProblemSource src;
  src.memory = args.memory;
  const fs::path path(args.problem);
  if (fs::is_regular_file(path)) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    src.from_file = true;
    src.text = ss.str();
    src.name = path.stem().string();
  } else {
    const auto names = ocp::registry_names();
    if (std::find(names.begin(), names.end(), args.problem) == names.end()) {
      throw UsageError("'" + args.problem + "' is neither a problem file nor a registered problem");
    }
    src.text = args.problem;
    src.name = args.problem;
  }
  return src;
}

ocp::OcpSolveOptions solve_options(const ProblemArgs& args) {
  ocp::OcpSolveOptions o;
  o.nlp = args.nlp;
  o.nlp.record_trace = args.trace;
  o.nlp.validate();
  return o;
}

std::vector<std::string> solution_header(const ocp::OcpProblem& p, bool flag_column) {
  std::vector<std::string> h{"node", "t"};
  for (std::size_t j = 0; j < p.n_x; ++j) h.push_back("y" + std::to_string(j + 1));
  for (std::size_t i = 0; i < p.n_u; ++i) h.push_back("u" + std::to_string(i + 1));
  h.push_back("adfe_max_at_node");
  if (flag_column) h.push_back("nonconverged");
  return h;
}

// A non-converged solution gets an extra column flagging every row.
void write_solution(const fs::path& path, const ocp::OcpProblem& p, const ocp::OcpSolution& s) {
  const std::size_t n = static_cast<std::size_t>(s.states.rows());
  const fourier::FourierGrid grid(p.period, n);
  Csv csv(path, solution_header(p, !s.converged));
  for (std::size_t l = 0; l < n; ++l) {
    std::vector<std::string> row{std::to_string(l), csv_number(grid.node(l))};
    for (std::size_t j = 0; j < p.n_x; ++j) {
      row.push_back(csv_number(s.states(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j))));
    }
    for (std::size_t i = 0; i < p.n_u; ++i) {
      row.push_back(csv_number(s.controls(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(i))));
    }
    row.push_back(csv_number(s.max_adfe_at_node(l)));
    if (!s.converged) row.push_back("1");
    csv.row(row);
  }
}

void write_trace(const fs::path& path, const ocp::OcpSolution& s) {
  Csv csv(path, {"outer", "inner", "J", "max_eq_residual", "step_norm"});
  for (const auto& r : s.trace) {
    csv.row({std::to_string(r.outer), std::to_string(r.inner), csv_number(r.objective),
             csv_number(r.max_eq_residual), csv_number(r.step_norm)});
  }
}

// Profiles on 100 equispaced plot points through the trigonometric interpolant.
void write_profile_svg(const fs::path& path, const ocp::OcpProblem& p,
                       const ocp::OcpSolution& s, const std::string& title) {
  const auto n = static_cast<std::size_t>(s.states.rows());
  const fourier::FourierGrid grid(p.period, n);
  std::vector<double> ts(100);
  for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = p.period * static_cast<double>(i) / 99.0;
  Chart chart{title, "t", "value", false, {}};
  const auto add = [&](const std::string& label, const Eigen::VectorXd& col) {
    const std::vector<double> samples(col.data(), col.data() + col.size());
    chart.series.push_back({label, ts, fourier::interpolate(grid, samples, ts)});
  };
  for (std::size_t j = 0; j < p.n_x; ++j) add("y" + std::to_string(j + 1), s.states.col(static_cast<Eigen::Index>(j)));
  for (std::size_t i = 0; i < p.n_u; ++i) add("u" + std::to_string(i + 1), s.controls.col(static_cast<Eigen::Index>(i)));
  write_svg(path.string(), chart);
}

void report_solution(const std::string& label, const ocp::OcpSolution& s) {
  std::printf("%s: J_N = %s, max ADFE = %.3e, converged = %s (%s)\n", label.c_str(),
              csv_number(s.objective).c_str(), s.max_adfe(), s.converged ? "yes" : "no",
              s.message.c_str());
}

}  // namespace

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const expr::SyntaxError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const expr::ArityError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const std::out_of_range& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitInput;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const expr::EvalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNonConvergence;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNonConvergence;
  }
}

int cmd_nodes(const NodesArgs& args, const Common& common) {
  const auto rule = make_rule({args.ng, args.lambda});
  const fs::path path = output_dir(common) / "nodes.csv";
  Csv csv(path, {"index", "node", "shifted_node", "weight"});
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    csv.row({std::to_string(i), csv_number(rule.nodes[i]), csv_number(rule.shifted_nodes[i]),
             csv_number(rule.weights[i])});
  }
  std::printf("wrote %zu nodes to %s%s\n", rule.nodes.size(), path.string().c_str(),
              rule.ill_conditioned ? " (weights ill-conditioned)" : "");
  return kExitOk;
}

int cmd_fracderiv(const FracderivArgs& args, const Common& common) {
  const fracderiv::FractionalOrder order(args.alpha, args.memory);
  const fourier::FourierGrid grid(args.period, args.n);
  const auto fn = test_function(args.f, args.period);
  const auto rule = make_rule(args.quad);
  const auto check = fd_check(fn, order.alpha(), order.memory(), grid.size(), args.period, rule, common);

  const fs::path dir = output_dir(common);
  Csv csv(dir / "fracderiv.csv", {"node_index", "t", "approx", "oracle", "abs_error"});
  for (std::size_t l = 0; l < check.rows.size(); ++l) {
    const auto& r = check.rows[l];
    csv.row({std::to_string(l), csv_number(r.t), csv_number(r.approx), csv_number(r.oracle),
             csv_number(r.error)});
  }
  csv.row({"max_abs_error", "", "", "", csv_number(check.max_error)});
  if (check.unconverged > 0) {
    csv.row({"oracle_unconverged_nodes", "", "", "", std::to_string(check.unconverged)});
  }
  if (common.svg) {
    Chart chart{"D^" + short_number(args.alpha) + " " + args.f, "t", "value", false, {}};
    Series a{"FGPS", {}, {}, true}, o{"oracle", {}, {}, false};
    for (const auto& r : check.rows) {
      a.x.push_back(r.t);
      a.y.push_back(r.approx);
      o.x.push_back(r.t);
      o.y.push_back(r.oracle);
    }
    chart.series = {o, a};
    write_svg((dir / "fracderiv.svg").string(), chart);
  }
  std::printf("max_abs_error = %.3e over %zu nodes\n", check.max_error, check.rows.size());
  if (check.unconverged > 0) {
    std::fprintf(stderr, "oracle did not converge at %zu nodes\n", check.unconverged);
    return kExitNonConvergence;
  }
  return kExitOk;
}

int cmd_convergence(const ConvergenceArgs& args, const Common& common) {
  if (args.alphas.empty()) throw UsageError("convergence: empty alpha list");
  if (args.ns.empty()) throw UsageError("convergence: empty N list");
  for (double a : args.alphas) fracderiv::FractionalOrder(a, args.memory);
  for (std::size_t n : args.ns) fourier::FourierGrid(args.period, n);
  validate_jobs(common.jobs);
  const auto fn = test_function(args.f, args.period);
  const auto rule = make_rule(args.quad);

  const std::size_t cols = args.ns.size();
  std::vector<double> errors(args.alphas.size() * cols);
  std::vector<std::size_t> unconverged(errors.size());
  parallel_for(errors.size(), common.jobs, [&](std::size_t k) {
    const auto check = fd_check(fn, args.alphas[k / cols], args.memory, args.ns[k % cols],
                                args.period, rule, common);
    errors[k] = check.max_error;
    unconverged[k] = check.unconverged;
  });

  const fs::path dir = output_dir(common);
  std::vector<std::string> header{"alpha"};
  for (std::size_t n : args.ns) header.push_back("N=" + std::to_string(n));
  Csv csv(dir / "convergence.csv", header);
  Chart chart{"max node error, " + args.f, "N", "max abs error", true, {}};
  for (std::size_t i = 0; i < args.alphas.size(); ++i) {
    std::vector<std::string> row{csv_number(args.alphas[i])};
    Series s{"alpha=" + short_number(args.alphas[i]), {}, {}, true};
    for (std::size_t c = 0; c < cols; ++c) {
      row.push_back(csv_number(errors[i * cols + c]));
      s.x.push_back(static_cast<double>(args.ns[c]));
      s.y.push_back(errors[i * cols + c]);
    }
    csv.row(row);
    chart.series.push_back(s);
  }
  if (common.svg) write_svg((dir / "convergence.svg").string(), chart);
  std::printf("wrote %zu x %zu error matrix to %s\n", args.alphas.size(), cols,
              csv.path().string().c_str());
  const bool ok = std::all_of(unconverged.begin(), unconverged.end(), [](auto u) { return u == 0; });
  if (!ok) std::fprintf(stderr, "oracle did not converge for some entries\n");
  return ok ? kExitOk : kExitNonConvergence;
}

int cmd_bound(const BoundArgs& args, const Common& common) {
  errorbound::ReportSweep sweep;
  sweep.base = {args.n, args.alpha, args.memory, args.lambda, args.ng, args.zeta,
                {args.d_lambda, args.b1_lambda}, errorbound::Branch::Auto};
  if (args.branch == "asymptotic") {
    sweep.base.branch = errorbound::Branch::Asymptotic;
  } else if (args.branch != "auto") {
    throw UsageError("--branch must be auto or asymptotic");
  }
  if (!(args.gap > 0.0 && args.gap < 1.0)) throw UsageError("--gap must lie in (0, 1)");
  sweep.gap = args.gap;
  const auto rows = errorbound::bound_report(sweep);
  const fs::path path = output_dir(common) / "bound.csv";
  Csv csv(path, {"param", "value", "bound_log10"});
  for (const auto& r : rows) csv.row({r.param, csv_number(r.value), csv_number(r.bound_log10)});
  std::printf("wrote %zu rows to %s\n", rows.size(), path.string().c_str());
  return kExitOk;
}

int cmd_solve(const SolveArgs& args, const Common& common) {
  const auto src = problem_source(args.base);
  const auto problem = src.make(args.alpha);
  const auto options = solve_options(args.base);
  const auto rule = make_rule(args.base.quad);
  const auto solution = ocp::solve(problem, args.base.n, rule, options);

  const fs::path dir = output_dir(common);
  write_solution(dir / "solution.csv", problem, solution);
  if (args.base.trace) write_trace(dir / "trace.csv", solution);
  if (common.svg) {
    write_profile_svg(dir / "solution.svg", problem, solution,
                      src.name + ", alpha=" + short_number(problem.order.alpha()));
  }
  report_solution(src.name + " N=" + std::to_string(args.base.n), solution);
  return solution.converged ? kExitOk : kExitNonConvergence;
}

int cmd_sweep_alpha(const SweepArgs& args, const Common& common) {
  if (args.alphas.empty()) throw UsageError("sweep-alpha: empty alpha list");
  validate_jobs(common.jobs);
  const auto src = problem_source(args.base);
  for (double a : args.alphas) src.make(a);  // rejects integer orders before any solve
  const auto options = solve_options(args.base);
  const auto rule = make_rule(args.base.quad);

  // One job warm-starts each order from the previous solution; more jobs
  // solve the orders independently.
  std::vector<ocp::AlphaRun> runs;
  if (common.jobs == 1) {
    runs = ocp::evolve_alpha([&](double a) { return src.make(a); }, args.alphas, args.base.n,
                             rule, options);
  } else {
    runs.resize(args.alphas.size());
    parallel_for(runs.size(), common.jobs, [&](std::size_t k) {
      runs[k].alpha = args.alphas[k];
      try {
        runs[k].solution = ocp::solve(src.make(args.alphas[k]), args.base.n, rule, options);
      } catch (const std::exception& e) {
        runs[k].error = e.what();
      }
    });
  }

  const fs::path dir = output_dir(common);
  Csv index(dir / "sweep_index.csv", {"alpha", "file", "J", "max_adfe", "converged"});
  Chart chart{src.name + ": y1 against alpha", "t", "y1", false, {}};
  bool ok = true;
  for (const auto& run : runs) {
    const std::string file = "solution_alpha_" + short_number(run.alpha) + ".csv";
    if (!run.solution) {
      ok = false;
      std::fprintf(stderr, "alpha=%s failed: %s\n", short_number(run.alpha).c_str(), run.error.c_str());
      index.row({csv_number(run.alpha), "", "nan", "nan", "0"});
      continue;
    }
    const auto& s = *run.solution;
    const auto problem = src.make(run.alpha);
    write_solution(dir / file, problem, s);
    if (args.base.trace) {
      write_trace(dir / ("trace_alpha_" + short_number(run.alpha) + ".csv"), s);
    }
    index.row({csv_number(run.alpha), file, csv_number(s.objective), csv_number(s.max_adfe()),
               s.converged ? "1" : "0"});
    ok = ok && s.converged;
    report_solution("alpha=" + short_number(run.alpha), s);

    const auto n = static_cast<std::size_t>(s.states.rows());
    const fourier::FourierGrid grid(problem.period, n);
    std::vector<double> ts(100);
    for (std::size_t i = 0; i < ts.size(); ++i) ts[i] = problem.period * static_cast<double>(i) / 99.0;
    const Eigen::VectorXd y1 = s.states.col(0);
    const std::vector<double> samples(y1.data(), y1.data() + y1.size());
    chart.series.push_back({"alpha=" + short_number(run.alpha), ts,
                            fourier::interpolate(grid, samples, ts)});
  }
  if (common.svg) write_svg((dir / "sweep_alpha.svg").string(), chart);
  return ok ? kExitOk : kExitNonConvergence;
}

int cmd_jn_table(const JnArgs& args, const Common& common) {
  std::vector<std::size_t> ns;
  for (std::size_t n : args.ns) {
    if (std::find(ns.begin(), ns.end(), n) == ns.end()) ns.push_back(n);
  }
  if (ns.empty()) throw UsageError("jn-table: empty N list");
  validate_jobs(common.jobs);
  const auto src = problem_source(args.base);
  const auto problem = src.make(args.alpha);
  for (std::size_t n : ns) fourier::FourierGrid(problem.period, n);
  const auto options = solve_options(args.base);
  const auto rule = make_rule(args.base.quad);

  std::vector<double> values(ns.size(), std::nan(""));
  std::vector<std::string> errors(ns.size());
  std::vector<bool> converged(ns.size(), false);
  parallel_for(ns.size(), common.jobs, [&](std::size_t k) {
    try {
      const auto s = ocp::solve(problem, ns[k], rule, options);
      values[k] = s.objective;
      converged[k] = s.converged;
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  });

  const fs::path dir = output_dir(common);
  Csv csv(dir / "jn.csv", {"N", "J_N"});
  Series series{"J_N", {}, {}, true};
  bool ok = true;
  for (std::size_t k = 0; k < ns.size(); ++k) {
    csv.row({std::to_string(ns[k]), csv_number(values[k])});
    series.x.push_back(static_cast<double>(ns[k]));
    series.y.push_back(values[k]);
    if (!errors[k].empty()) {
      std::fprintf(stderr, "N=%zu failed: %s\n", ns[k], errors[k].c_str());
    } else {
      std::printf("N=%zu J_N=%s%s\n", ns[k], csv_number(values[k]).c_str(),
                  converged[k] ? "" : " (not converged)");
    }
    ok = ok && converged[k];
  }
  if (common.svg) {
    write_svg((dir / "jn.svg").string(), Chart{src.name + ": J_N against N", "N", "J_N", false, {series}});
  }
  return ok ? kExitOk : kExitNonConvergence;
}

}  // namespace fgps::cli
