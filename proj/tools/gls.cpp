// Command-line front end: one-shot estimation plus the four experiment
// drivers.  Exit codes: 0 success, 2 solver breakdown (recovered solution
// still written), 3 ill-posed problem.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "gls/experiments.hpp"

namespace fs = std::filesystem;
using namespace gls;

namespace {

struct CommonOpts {
  std::uint64_t seed = 20240601;
  std::string out = "out";
  double tol = 1e-10;
  std::size_t max_iter = 0;
  std::string precond = "identity";
  std::string solver = "aug";
  std::size_t replications = 1000;
  bool paper_scale = false;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--seed", opts.seed, "random seed");
  cmd->add_option("--out", opts.out, "output directory");
  cmd->add_option("--tol", opts.tol, "relative tolerance");
  cmd->add_option("--max-iter", opts.max_iter, "iteration cap (0 = theory bound)");
}

DenseMatrix build_d(const std::string& spec, const Glm& glm) {
  const std::size_t m = glm.x.rows();
  if (spec == "identity") return DenseMatrix::identity(m);
  if (spec == "scaled-identity") {
    double alpha = 0.0;
    for (double v : glm.sigma.diagonal()) alpha = std::max(alpha, v);
    if (alpha <= 0.0) alpha = 1.0;
    return alpha * DenseMatrix::identity(m);
  }
  if (spec == "diag") {
    Vector d = glm.sigma.diagonal();
    for (double& v : d)
      if (v <= 0.0) v = 1.0;  // zero-variance rows get a unit auxiliary
    return DenseMatrix::diagonal(d);
  }
  if (spec.rfind("dense:", 0) == 0) return read_matrix_csv(spec.substr(6));
  throw Error("unknown preconditioner spec: " + spec);
}

int run_solve(const std::string& dir, const CommonOpts& opts) {
  const Glm glm = load_problem_dir(dir);
  const fs::path out_dir(opts.out);
  fs::create_directories(out_dir);

  PcgConfig cfg;
  cfg.tol_rel = opts.tol;
  cfg.max_iter = opts.max_iter;

  GlsSolution sol;
  PcgTrace trace;
  if (opts.solver == "direct") {
    sol = blue_augmented_direct(glm, true);
  } else if (opts.solver == "ne") {
    auto res = pcg_normal_equations(glm, nullptr, cfg);
    sol = std::move(res.solution);
    trace = std::move(res.trace);
  } else {
    auto precond = dense_preconditioner(glm.x, build_d(opts.precond, glm));
    const Vector w1(glm.x.rows(), 0.0), z1(glm.x.cols(), 0.0);
    AugSolveResult res;
    if (opts.solver == "aug")
      res = pcg_aug(glm, *precond, w1, z1, cfg);
    else if (opts.solver == "aug-full")
      res = pcg_aug_full(glm, *precond, w1, z1, cfg);
    else if (opts.solver == "aug-alt")
      res = pcg_aug_alt(glm, *precond, w1, z1, cfg);
    else
      throw Error("unknown solver: " + opts.solver);
    sol = std::move(res.solution);
    trace = std::move(res.trace);
  }

  write_vector_csv(out_dir / "b.csv", sol.b);
  write_vector_csv(out_dir / "w.csv", sol.w);
  if (sol.estimator_cov) write_matrix_csv(out_dir / "estimator_cov.csv", *sol.estimator_cov);
  if (!trace.rows.empty()) write_trace_csv(out_dir / "trace.csv", trace);
  write_key_values(out_dir / "solution.toml",
                   {{"solver", opts.solver},
                    {"termination", to_string(sol.termination)},
                    {"iterations", std::to_string(sol.iterations)},
                    {"residual_seminorm", format_double(sol.residual_seminorm)}});

  std::cout << "solver=" << opts.solver << " termination=" << to_string(sol.termination)
            << " iterations=" << sol.iterations << "\n";
  return sol.termination == Termination::Breakdown ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GLS estimation by preconditioned conjugate gradients"};
  app.require_subcommand(1);

  CommonOpts opts;

  auto* solve_cmd = app.add_subcommand("solve", "estimate a GLM from a problem directory");
  std::string problem_dir;
  solve_cmd->add_option("dir", problem_dir, "problem directory")->required();
  add_common(solve_cmd, opts);
  solve_cmd->add_option("--precond", opts.precond,
                        "identity|scaled-identity|diag|dense:PATH");
  solve_cmd->add_option("--solver", opts.solver, "aug|aug-alt|aug-full|ne|direct");

  auto* scaling_cmd = app.add_subcommand("scaling", "covariance scaling study");
  std::size_t scaling_m = 300, scaling_n = 50;
  add_common(scaling_cmd, opts);
  scaling_cmd->add_option("--m", scaling_m, "observations");
  scaling_cmd->add_option("--n", scaling_n, "parameters");

  auto* mc_cmd = app.add_subcommand("monte-carlo", "unbiasedness study");
  std::size_t mc_m = 80, mc_n = 20;
  add_common(mc_cmd, opts);
  mc_cmd->add_option("--m", mc_m, "observations");
  mc_cmd->add_option("--n", mc_n, "parameters");
  mc_cmd->add_option("--replications", opts.replications, "MC replications");

  auto* sur_cmd = app.add_subcommand("sur-bench", "synthetic SUR benchmark");
  SurBenchConfig sur_cfg;
  add_common(sur_cmd, opts);
  sur_cmd->add_option("--M", sur_cfg.obs, "observations per equation");
  sur_cmd->add_option("--G", sur_cfg.equations, "equations");
  sur_cmd->add_option("--N", sur_cfg.base_params, "base regressor columns");
  sur_cmd->add_flag("--reduce", sur_cfg.reduce, "apply the rank reduction pre-pass");

  auto* var_cmd = app.add_subcommand("var-suite", "restricted VAR suite");
  VarSuiteConfig var_cfg;
  add_common(var_cmd, opts);
  var_cmd->add_option("--G", var_cfg.dim_g, "VAR dimension");
  var_cmd->add_option("--M", var_cfg.sample_len, "sample length");
  var_cmd->add_flag("--paper-scale", opts.paper_scale, "M=300, G=12, N=60 dimensions");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_cmd->parsed()) return run_solve(problem_dir, opts);
    if (scaling_cmd->parsed()) {
      ScalingConfig cfg;
      cfg.m = scaling_m;
      cfg.n = scaling_n;
      cfg.seed = opts.seed;
      cfg.tol_rel = opts.tol;
      emit_scaling_report(opts.out, run_scaling(cfg));
      std::cout << "wrote " << opts.out << "\n";
      return 0;
    }
    if (mc_cmd->parsed()) {
      MonteCarloConfig cfg;
      cfg.m = mc_m;
      cfg.n = mc_n;
      cfg.replications = opts.replications;
      cfg.seed = opts.seed;
      cfg.tol_rel = opts.tol;
      emit_mc_report(opts.out, run_monte_carlo(cfg));
      std::cout << "wrote " << opts.out << "\n";
      return 0;
    }
    if (sur_cmd->parsed()) {
      sur_cfg.seed = opts.seed;
      sur_cfg.tol_rel = opts.tol;
      emit_sur_bench_report(opts.out, run_sur_bench(sur_cfg));
      std::cout << "wrote " << opts.out << "\n";
      return 0;
    }
    if (var_cmd->parsed()) {
      var_cfg.seed = opts.seed;
      var_cfg.paper_scale = opts.paper_scale;
      emit_var_suite_report(opts.out, run_var_suite(var_cfg));
      std::cout << "wrote " << opts.out << "\n";
      return 0;
    }
  } catch (const RankDeficient& e) {
    std::cerr << "ill-posed problem: " << e.what() << "\n";
    return 3;
  } catch (const NullspaceSingular& e) {
    std::cerr << "ill-posed problem: " << e.what() << "\n";
    return 3;
  } catch (const SingularCovariance& e) {
    std::cerr << "ill-posed problem: " << e.what() << "\n";
    return 3;
  } catch (const BadMultiplicities& e) {
    std::cerr << "ill-posed problem: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
