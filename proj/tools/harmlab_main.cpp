#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

#include "harmlab/errors.hpp"
#include "harmlab/mesh_io.hpp"
#include "harmlab/pipelines.hpp"
#include "harmlab/solver.hpp"

using namespace harmlab;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitChecksFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct PipelineArgs {
  std::string config;
  std::string out;
  std::string table;
  std::optional<int> levels;
  std::optional<double> alpha;
};

void add_pipeline_options(CLI::App* sub, PipelineArgs& a) {
  sub->add_option("--config", a.config, "scenario config (JSON)")->required();
  sub->add_option("--out", a.out, "report path (JSON); default stdout");
  sub->add_option("--table", a.table, "table path (CSV)");
  sub->add_option("--levels", a.levels, "exhaustion levels, or refinements for converge");
  sub->add_option("--alpha", a.alpha, "potential exponent");
}

int run_pipeline(const std::string& name, const PipelineArgs& a) {
  ScenarioConfig c = load_config(a.config);
  if (!c.pipeline.empty() && c.pipeline != name)
    throw ConfigError("/pipeline", "config names '" + c.pipeline + "' but the subcommand is '" + name + "'");
  c.pipeline = name;
  if (a.levels) {
    if (name == "converge") c.refinements = *a.levels;
    else c.exhaustion.levels = *a.levels;
  }
  if (a.alpha) {
    if (!(*a.alpha > 0)) throw ConfigError("--alpha", "must be positive");
    c.alpha = *a.alpha;
  }
  if (!a.out.empty()) c.report_path = a.out;
  if (!a.table.empty()) c.table_path = a.table;
  Report r = run_scenario(c);
  if (c.report_path.empty()) std::cout << r.to_json().dump(2) << "\n";
  write_outputs(r, c);
  for (const Check& ck : r.checks)
    std::fprintf(stderr, "%s  %s\n", ck.pass ? "PASS" : "FAIL", ck.name.c_str());
  return r.all_pass() ? kExitPass : kExitChecksFailed;
}

int run_gen(const std::string& config, const std::string& out) {
  ScenarioConfig c = load_config(config);
  SurfaceMesh m = generate(with_resolution(c.scenario, c.resolution.back()));
  if (out.empty()) std::cout << mesh_to_json(m);
  else write_mesh(m, out);
  std::fprintf(stderr, "%s: %d vertices, %d triangles, hash %s\n", scenario_name(c.scenario).c_str(),
               m.num_vertices, m.num_triangles(), mesh_hash(m).c_str());
  return kExitPass;
}

int run_solve(const std::string& mesh_path, const std::vector<std::string>& dirichlet,
              const std::vector<std::string>& neumann, double tolerance, const std::string& out) {
  SurfaceMesh m = read_mesh(mesh_path);
  BoundaryCondition bc;
  for (const BoundaryLoop& l : m.loops) bc[l.label] = LoopCondition::neumann();
  for (const std::string& d : dirichlet) {
    const auto eq = d.find('=');
    if (eq == std::string::npos) throw ConfigError("--dirichlet", "expected LABEL=VALUE, got '" + d + "'");
    double v = 0.0;
    try {
      v = std::stod(d.substr(eq + 1));
    } catch (const std::exception&) {
      throw ConfigError("--dirichlet", "bad value in '" + d + "'");
    }
    bc[d.substr(0, eq)] = LoopCondition::dirichlet(v);
  }
  for (const std::string& n : neumann) bc[n] = LoopCondition::neumann();
  SolverOptions opt;
  opt.tolerance = tolerance;
  SolveResult s = solve_laplace(m, bc, opt);
  Json j;
  j["mesh_hash"] = mesh_hash(m);
  Json jb = Json::object();
  for (const auto& [label, cond] : bc)
    jb[label] = cond.kind == LoopCondition::Kind::dirichlet ? Json{{"dirichlet", cond.value}} : Json("neumann");
  j["boundary"] = jb;
  j["tolerance"] = tolerance;
  j["iterations"] = s.report.iterations;
  j["relative_residual"] = s.report.relative_residual;
  j["values"] = s.f;
  if (out.empty()) std::cout << j.dump(2) << "\n";
  else write_text(out, j.dump(2) + "\n");
  return kExitPass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harmlab: discrete harmonic-function experiments on surfaces"};
  app.require_subcommand(1);

  std::string gen_config, gen_out;
  auto* gen = app.add_subcommand("gen", "generate a scenario mesh");
  gen->add_option("--config", gen_config, "scenario config (JSON)")->required();
  gen->add_option("--out", gen_out, "mesh path (JSON); default stdout");

  std::string solve_mesh, solve_out;
  std::vector<std::string> solve_dirichlet, solve_neumann;
  double solve_tol = 1e-10;
  auto* solve = app.add_subcommand("solve", "solve a Laplace problem on a mesh file");
  solve->add_option("--mesh", solve_mesh, "mesh path (JSON)")->required();
  solve->add_option("--dirichlet", solve_dirichlet, "LABEL=VALUE, repeatable");
  solve->add_option("--neumann", solve_neumann, "LABEL, repeatable (default for unlisted loops)");
  solve->add_option("--tolerance", solve_tol, "relative residual tolerance");
  solve->add_option("--out", solve_out, "output path (JSON); default stdout");

  const std::vector<std::pair<std::string, std::string>> pipelines{
      {"capacity", "capacity of an exhaustion"},
      {"classify", "classify an end as parabolic or non-parabolic"},
      {"separate", "exhaustion harmonic separating ends"},
      {"periods", "periods of a conjugate differential"},
      {"betti", "period-matrix rank lower bound for b1"},
      {"kahler", "potential metric completeness on the annulus"},
      {"counterexample", "glued plane: non-parabolic yet not distinguishable"},
      {"converge", "convergence study against a closed form"},
  };
  std::vector<PipelineArgs> args(pipelines.size());
  std::vector<CLI::App*> subs;
  for (size_t i = 0; i < pipelines.size(); ++i) {
    subs.push_back(app.add_subcommand(pipelines[i].first, pipelines[i].second));
    add_pipeline_options(subs.back(), args[i]);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfig;
  }

  try {
    if (gen->parsed()) return run_gen(gen_config, gen_out);
    if (solve->parsed()) return run_solve(solve_mesh, solve_dirichlet, solve_neumann, solve_tol, solve_out);
    for (size_t i = 0; i < subs.size(); ++i)
      if (subs[i]->parsed()) return run_pipeline(pipelines[i].first, args[i]);
  } catch (const Error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", to_string(e.kind()), e.what());
    return (e.kind() == ErrorKind::config || e.kind() == ErrorKind::parameter) ? kExitConfig : kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
  return kExitConfig;
}
