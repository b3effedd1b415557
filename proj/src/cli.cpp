#include "degen/cli.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "degen/oracle.hpp"
#include "degen/regularity.hpp"
#include "degen/scaling.hpp"
#include "degen/solver.hpp"

namespace degen {
namespace {

using nlohmann::json;

// Usage-level problems detected after CLI11 parsing (bad spec strings etc).
struct usage_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

uint64_t fnv1a64(const std::string& bytes) {
  uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
  return buf;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot reopen output " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_bytes(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << content;
  if (!out) throw io_error("short write to " + path);
}

// Collects output records and finalizes manifest.json.  The wall clock is
// the only field expected to differ between identical reruns.
struct Manifest {
  std::string out_dir;
  std::string command;
  std::vector<std::string> args;
  uint64_t seed = 0;
  json params = json::object();
  json outputs = json::array();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();

  void record(const std::string& name) {
    std::string bytes = read_bytes(out_dir + "/" + name);
    outputs.push_back({{"file", name},
                       {"bytes", bytes.size()},
                       {"fnv1a64", hex64(fnv1a64(bytes))}});
  }

  void finish() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                  std::chrono::steady_clock::now() - t0)
                  .count();
    json m;
    m["version"] = kCliVersion;
    m["command"] = command;
    m["args"] = args;
    m["seed"] = seed;
    m["params"] = params;
    m["outputs"] = outputs;
    m["wall_clock_ms"] = ms;
    write_bytes(out_dir + "/manifest.json", m.dump(2) + "\n");
  }
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw usage_error("cannot parse " + what + " value '" + s + "'");
  }
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
  std::vector<double> out;
  for (const std::string& tok : split(s, ','))
    out.push_back(parse_double(tok, what));
  return out;
}

// "1e-1 3e-2 1e-2 ..." decade ladder cut at eps_min, which becomes the last
// rung; eps_min >= 0.1 collapses to a single stage.
std::vector<double> schedule_from(double eps_min) {
  if (!(eps_min > 0.0) || !std::isfinite(eps_min))
    throw usage_error("--eps-min must be positive");
  std::vector<double> sched;
  double r = 1e-1;
  bool times3 = true;
  while (r > eps_min * (1.0 + 1e-9)) {
    sched.push_back(r);
    r *= times3 ? 0.3 : (1.0 / 3.0);
    times3 = !times3;
  }
  sched.push_back(eps_min);
  return sched;
}

// Family spec strings: "ode:<delta>", "radial:<gamma>", "aronsson",
// "separable:t1,t2[,t3];c1,c2[,c3]", "radial_plus_smooth:<q>",
// "p_radial:<p>".  dim_hint resolves the families that exist in several
// dimensions; 0 means "use the family default".  gamma_hint fills in the
// exponent of the ode and radial families when the string carries none, so
// "--bc oracle:radial" inherits the problem's --gamma.
ExactSolution parse_oracle(const std::string& spec, int dim_hint,
                           double gamma_hint = -1.0) {
  std::vector<std::string> parts = split(spec, ':');
  const std::string& name = parts[0];
  auto arg = [&](size_t i) -> const std::string& {
    if (parts.size() <= i)
      throw usage_error("oracle spec '" + spec + "' is missing a parameter");
    return parts[i];
  };
  auto exponent = [&](const char* what) {
    if (parts.size() > 1) return parse_double(parts[1], what);
    if (gamma_hint >= 0.0) return gamma_hint;
    throw usage_error("oracle spec '" + spec + "' is missing a parameter");
  };
  if (name == "ode") return ode_profile(exponent("delta"));
  if (name == "radial")
    return radial_profile(exponent("gamma"), dim_hint > 0 ? dim_hint : 2);
  if (name == "aronsson") return aronsson();
  if (name == "separable") {
    std::vector<std::string> halves = split(arg(1), ';');
    if (halves.size() != 2)
      throw usage_error("separable spec needs 'taus;consts'");
    return separable_infinity_harmonic(parse_list(halves[0], "tau"),
                                       parse_list(halves[1], "const"));
  }
  if (name == "radial_plus_smooth")
    return radial_plus_smooth(Polynomial2D::zero(), parse_double(arg(1), "q"));
  if (name == "p_radial")
    return p_radial_profile(parse_double(arg(1), "p"),
                            dim_hint > 0 ? dim_hint : 2);
  throw usage_error("unknown oracle family '" + name + "'");
}

std::function<double(const Vec&)> parse_bc(const std::string& spec, int dim,
                                           double gamma_hint = -1.0) {
  std::vector<std::string> parts = split(spec, ':');
  if (parts[0] == "oracle") {
    if (parts.size() < 2) throw usage_error("--bc oracle: needs a family");
    std::string rest = spec.substr(spec.find(':') + 1);
    ExactSolution sol = parse_oracle(rest, dim, gamma_hint);
    if (sol.dim != dim)
      throw usage_error("boundary oracle lives in dimension " +
                        std::to_string(sol.dim) + ", problem is " +
                        std::to_string(dim) + "d");
    return sol.eval;
  }
  if (parts[0] == "affine") {
    if (parts.size() != 2) throw usage_error("--bc affine:a,b0[,b1]");
    std::vector<double> c = parse_list(parts[1], "affine coefficient");
    if (static_cast<int>(c.size()) != dim + 1)
      throw usage_error("--bc affine needs 1+dim coefficients");
    Vec b = Vec::zero(dim);
    for (int i = 0; i < dim; ++i) b.c[i] = c[static_cast<size_t>(i) + 1];
    AffineFn fn{c[0], b};
    return [fn](const Vec& X) { return fn(X); };
  }
  throw usage_error("--bc must be oracle:<spec> or affine:<coeffs>");
}

std::function<double(const Vec&)> parse_source(const std::string& spec) {
  std::vector<std::string> parts = split(spec, ':');
  if (parts[0] == "const" && parts.size() == 2) {
    double v = parse_double(parts[1], "source");
    return [v](const Vec&) { return v; };
  }
  throw usage_error("--f must be const:<value>");
}

OperatorSpec parse_operator(const std::string& spec) {
  std::vector<std::string> parts = split(spec, ':');
  if (parts[0] == "trace" && parts.size() == 1) return OperatorSpec::trace();
  if ((parts[0] == "pucci_minus" || parts[0] == "pucci_plus")) {
    if (parts.size() != 2)
      throw usage_error("--op " + parts[0] + ":<lambda>,<Lambda>");
    std::vector<double> ll = parse_list(parts[1], "ellipticity");
    if (ll.size() != 2)
      throw usage_error("--op " + parts[0] + " needs lambda,Lambda");
    return parts[0] == "pucci_minus" ? OperatorSpec::pucci_minus(ll[0], ll[1])
                                     : OperatorSpec::pucci_plus(ll[0], ll[1]);
  }
  throw usage_error("--op must be trace, pucci_minus:l,L or pucci_plus:l,L");
}

json vec_json(const Vec& v) {
  json a = json::array();
  for (int i = 0; i < v.dim; ++i) a.push_back(v.c[i]);
  return a;
}

void write_decay_json(const std::string& path, const DecayReport& rep) {
  json j;
  j["center"] = vec_json(rep.center);
  j["rho0"] = rep.rho0;
  j["levels"] = json::array();
  for (const DecayLevel& lv : rep.levels)
    j["levels"].push_back({{"k", lv.k},
                           {"radius", lv.radius},
                           {"a", lv.a},
                           {"b", vec_json(lv.b)},
                           {"E", lv.E},
                           {"points", lv.points}});
  j["alpha_hat"] = rep.alpha_hat;
  j["C0_hat"] = rep.C0_hat;
  j["fit_residual"] = rep.fit_residual;
  j["saturated"] = rep.saturated;
  j["truncated"] = rep.truncated;
  write_bytes(path, j.dump(2) + "\n");
}

struct CommonOpts {
  std::string out_dir = ".";
  uint64_t seed = 0;
  double tol = 0.0;  // 0: per-dimension default
  double eps_min = 1e-2;
  long max_iters = 10'000'000;
};

SolveConfig build_config(const CommonOpts& c, int dim, int n) {
  SolveConfig cfg = SolveConfig::defaults_for(dim);
  cfg.n = n;
  if (c.tol > 0.0) cfg.tol = c.tol;
  cfg.eps_schedule = schedule_from(c.eps_min);
  cfg.max_iters_per_stage = c.max_iters;
  return cfg;
}

int cmd_solve(Manifest& man, const CommonOpts& common, int dim, int n,
              const std::string& op_spec, double gamma,
              const std::string& f_spec, const std::string& bc_spec,
              const std::string& solver) {
  if (dim != 1 && dim != 2) throw usage_error("--dim must be 1 or 2");
  if (!(gamma >= 0.0) || !std::isfinite(gamma))
    throw usage_error("--gamma must be >= 0");
  if (n != 0 && n < 3) throw usage_error("--n must be at least 3");
  ProblemSpec prob;
  prob.dim = dim;
  prob.F = parse_operator(op_spec);
  prob.H = DegeneracySpec::pure_power(gamma);
  prob.f = parse_source(f_spec);
  prob.boundary = parse_bc(bc_spec, dim, gamma);

  if (n <= 0) n = SolveConfig::defaults_for(dim).n;
  ScalarField u;
  if (solver == "bvp") {
    if (dim != 1 || prob.F.kind != OperatorKind::Trace)
      throw usage_error("--solver bvp applies to --dim 1 --op trace only");
    double gap = 0.0;
    auto f1 = prob.f;
    u = solve_ode_bvp(
        gamma, [f1](double t) { return f1(Vec::make(t)); }, prob.lo, prob.hi,
        prob.boundary(Vec::make(prob.lo)), prob.boundary(Vec::make(prob.hi)),
        n, &gap);
    man.params["shooting_gap"] = gap;
  } else if (solver == "relax") {
    SolveConfig cfg = build_config(common, dim, n);
    SolveResult res = solve_dirichlet(prob, cfg);
    u = std::move(res.u);
    man.params["iterations"] = res.diag.total_iterations;
    man.params["final_residual"] = res.diag.final_residual;
    man.params["eps_final"] = res.diag.eps_final;
    man.params["monotone_violations"] = res.diag.monotone_violations;
  } else {
    throw usage_error("--solver must be relax or bvp");
  }
  save_csv(u, man.out_dir + "/solution.csv");
  man.record("solution.csv");
  return 0;
}

int cmd_estimate(Manifest& man, const std::string& in_path,
                 const std::string& center_spec, double rho0, int K) {
  if (!(rho0 > 0.0 && rho0 <= 0.5))
    throw usage_error("--rho0 must lie in (0, 0.5]");
  if (K < 2) throw usage_error("--K must be at least 2");
  ScalarField u;
  try {
    u = load_csv(in_path);
  } catch (const io_error& e) {
    // Unreadable input is a configuration problem, not a numerical one.
    throw usage_error(e.what());
  }
  Vec center = Vec::zero(u.grid.dim);
  if (!center_spec.empty()) {
    std::vector<double> c = parse_list(center_spec, "center");
    if (static_cast<int>(c.size()) != u.grid.dim)
      throw usage_error("--center needs " + std::to_string(u.grid.dim) +
                        " coordinates for this field");
    for (int i = 0; i < u.grid.dim; ++i) center.c[i] = c[static_cast<size_t>(i)];
  }
  DecayReport rep = dyadic_decay(u, center, rho0, K);
  write_decay_json(man.out_dir + "/decay.json", rep);
  man.record("decay.json");
  man.params["alpha_hat"] = rep.alpha_hat;
  return 0;
}

int cmd_table(Manifest& man, const CommonOpts& common,
              const std::string& gammas_spec, int dim, int n, double rho0,
              int K) {
  if (dim != 1 && dim != 2) throw usage_error("--dim must be 1 or 2");
  if (!(rho0 > 0.0 && rho0 <= 0.5))
    throw usage_error("--rho0 must lie in (0, 0.5]");
  if (K < 2) throw usage_error("--K must be at least 2");
  std::vector<double> gammas = parse_list(gammas_spec, "gamma");
  for (double g : gammas)
    if (!(g >= 0.0) || !std::isfinite(g))
      throw usage_error("--gammas entries must be >= 0");
  TableConfig cfg;
  cfg.dim = dim;
  cfg.n = n > 0 ? n : (dim == 1 ? 2049 : 65);
  cfg.rho0 = rho0;
  cfg.K = K;
  if (common.tol > 0.0)
    cfg.tol = common.tol;
  else
    cfg.tol = SolveConfig::defaults_for(dim).tol;
  cfg.eps_schedule = schedule_from(common.eps_min);
  cfg.max_iters_per_stage = common.max_iters;

  std::vector<TableRow> rows = exponent_vs_gamma_table(gammas, cfg);
  std::string csv = "gamma,alpha_hat,alpha_theory,abs_err,solver_residual,status\n";
  long ok = 0;
  for (const TableRow& r : rows) {
    if (r.status == "ok") ++ok;
    csv += g17(r.gamma);
    csv += ',';
    csv += g17(r.alpha_hat);
    csv += ',';
    csv += g17(r.alpha_theory);
    csv += ',';
    csv += g17(r.abs_err);
    csv += ',';
    csv += g17(r.solver_residual);
    csv += ',';
    csv += r.status;
    csv += '\n';
  }
  write_bytes(man.out_dir + "/table.csv", csv);
  man.record("table.csv");
  man.params["rows_ok"] = ok;
  return ok > 0 ? 0 : 2;
}

// Oracle parameters can ride in the name ("radial:1.5") or in dedicated
// flags ("--name radial --gamma 1.5 --d 2"); negative flag values mean
// "not given".
ExactSolution oracle_from_flags(const std::string& name, double gamma,
                                double q, double p, int d) {
  if (name.find(':') != std::string::npos)
    return parse_oracle(name, d, gamma);
  if (name == "ode") return ode_profile(gamma >= 0.0 ? gamma : 1.0);
  if (name == "radial")
    return radial_profile(gamma >= 0.0 ? gamma : 1.0, d > 0 ? d : 2);
  if (name == "aronsson") return aronsson();
  if (name == "separable")
    throw usage_error("separable needs inline parameters, "
                      "--name separable:t1,t2;c1,c2");
  if (name == "radial_plus_smooth")
    return radial_plus_smooth(Polynomial2D::zero(),
                              q > 0.0 ? q : 4.0 / 3.0);
  if (name == "p_radial")
    return p_radial_profile(p > 0.0 ? p : 3.0, d > 0 ? d : 2);
  throw usage_error("unknown oracle family '" + name + "'");
}

int cmd_oracle(Manifest& man, const CommonOpts& common,
               const std::string& name_spec, double gamma, double q, double p,
               int dim, int n, bool check) {
  ExactSolution sol = oracle_from_flags(name_spec, gamma, q, p, dim);
  if (dim > 0 && sol.dim != dim)
    throw usage_error("oracle family resolved to dimension " +
                      std::to_string(sol.dim) + ", got --d " +
                      std::to_string(dim));
  if (n <= 0) n = sol.dim == 1 ? 1025 : 129;
  Grid g = make_grid(sol.dim, n, -1.0, 1.0);
  ScalarField u = sample(g, sol.eval);
  save_csv(u, man.out_dir + "/field.csv");
  man.record("field.csv");
  man.params["alpha_expected"] = sol.alpha_expected;
  man.params["family"] = sol.name;
  if (!check) return 0;

  // Self-check: the defining equation residual at generic points, kept away
  // from the singular set where the jet is unavailable.
  if (!sol.defining_residual)
    throw usage_error("family '" + sol.name +
                      "' has no pinned defining equation to check");
  std::mt19937_64 rng(common.seed ^ 0x517cc1b727220a95ull);
  std::uniform_real_distribution<double> U(-0.95, 0.95);
  const int count = 100;
  int got = 0;
  double worst = 0.0;
  while (got < count) {
    Vec X = Vec::zero(sol.dim);
    for (int i = 0; i < sol.dim; ++i) X.c[i] = U(rng);
    if (sol.singular_distance && sol.singular_distance(X) < 0.05) continue;
    worst = std::max(worst, std::fabs(sol.defining_residual(X)));
    ++got;
  }
  man.params["residual_check"] = worst;
  const bool ok = worst <= 1e-10;
  std::printf("residual check: max |residual| = %s over %d generic points: %s\n",
              g17(worst).c_str(), count, ok ? "ok" : "FAIL");
  return ok ? 0 : 2;
}

int cmd_sclimit(Manifest& man, const CommonOpts& common,
                const std::string& deltas_spec, int n, double ball,
                const std::string& op_spec, const std::string& f_spec,
                const std::string& bc_spec) {
  std::vector<double> deltas = parse_list(deltas_spec, "delta");
  for (size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0) || !std::isfinite(deltas[i]))
      throw usage_error("--deltas entries must be >= 0");
    if (i > 0 && !(deltas[i] < deltas[i - 1]))
      throw usage_error("--deltas must be strictly decreasing");
  }
  if (n < 3) throw usage_error("--n must be at least 3");
  if (!(ball > 0.0 && ball < 1.0))
    throw usage_error("--ball must lie in (0,1)");
  ScLimitConfig cfg;
  cfg.n = n;
  cfg.tol = common.tol > 0.0 ? common.tol : 1e-5;
  cfg.eps_schedule = schedule_from(common.eps_min);
  cfg.max_iters_per_stage = common.max_iters;
  std::vector<ScLimitMember> members =
      sc_limit_family(parse_operator(op_spec), parse_source(f_spec), deltas,
                      parse_bc(bc_spec, 2), cfg);

  // c1_prev: interior C^1 distance to the previous member; blank on the
  // first row and across failed solves.
  std::string csv = "delta,c1_prev,residual,status\n";
  long ok = 0;
  for (size_t i = 0; i < members.size(); ++i) {
    const ScLimitMember& m = members[i];
    if (m.status == "ok") ++ok;
    std::string dist;
    if (i > 0 && m.status == "ok" && members[i - 1].status == "ok")
      dist = g17(c1_distance(m.u, members[i - 1].u, Vec::zero(2), ball));
    csv += g17(m.delta);
    csv += ',';
    csv += dist;
    csv += ',';
    csv += g17(m.residual);
    csv += ',';
    csv += m.status;
    csv += '\n';
  }
  write_bytes(man.out_dir + "/sclimit.csv", csv);
  man.record("sclimit.csv");
  man.params["members_ok"] = ok;
  return ok > 0 ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"degenerate elliptic regularity laboratory"};
  app.set_version_flag("--version", kCliVersion);
  app.require_subcommand(1);

  CommonOpts common;
  app.add_option("--out-dir", common.out_dir, "output directory");
  app.add_option("--seed", common.seed, "rng seed recorded in the manifest");
  app.add_option("--tol", common.tol, "solver residual tolerance");
  app.add_option("--eps-min", common.eps_min,
                 "last rung of the regularization schedule");
  app.add_option("--max-iters", common.max_iters,
                 "iteration budget per continuation stage");

  auto* solve = app.add_subcommand("solve", "solve a Dirichlet problem");
  int s_dim = 2, s_n = 0;
  std::string s_op = "trace", s_f = "const:1", s_bc, s_solver = "relax";
  double s_gamma = 0.0;
  solve->add_option("--dim", s_dim, "1 or 2")->required();
  solve->add_option("--n", s_n, "grid points per axis");
  solve->add_option("--op", s_op, "trace | pucci_minus:l,L | pucci_plus:l,L");
  solve->add_option("--gamma", s_gamma, "degeneracy exponent");
  solve->add_option("--f", s_f, "source, const:<value>");
  solve->add_option("--bc", s_bc, "oracle:<family spec> | affine:a,b0[,b1]")
      ->required();
  solve->add_option("--solver", s_solver, "relax | bvp");

  auto* estimate = app.add_subcommand("estimate", "decay exponent of a field");
  std::string e_in, e_center;
  double e_rho0 = 0.5;
  int e_K = 6;
  estimate->add_option("--in", e_in, "field csv")->required();
  estimate->add_option("--center", e_center, "comma separated coordinates");
  estimate->add_option("--rho0", e_rho0, "ball ratio in (0,1)");
  estimate->add_option("--K", e_K, "number of levels");

  auto* table = app.add_subcommand("table", "exponent against gamma");
  std::string t_gammas;
  int t_dim = 1, t_n = 0, t_K = 8;
  double t_rho0 = 0.5;
  table->add_option("--gammas", t_gammas, "comma separated list")->required();
  table->add_option("--dim", t_dim, "1 or 2");
  table->add_option("--n", t_n, "grid points per axis");
  table->add_option("--rho0", t_rho0, "ball ratio");
  table->add_option("--K", t_K, "number of levels");

  auto* oracle = app.add_subcommand("oracle", "sample a closed-form solution");
  std::string o_name;
  int o_dim = 0, o_n = 0;
  double o_gamma = -1.0, o_q = -1.0, o_p = -1.0;
  bool o_check = false;
  oracle->add_option("--name", o_name, "family, e.g. radial or radial:1.5")
      ->required();
  oracle->add_option("--gamma", o_gamma, "degeneracy exponent (ode, radial)");
  oracle->add_option("--q", o_q, "radial power (radial_plus_smooth)");
  oracle->add_option("--p", o_p, "p exponent (p_radial)");
  oracle->add_option("--d,--dim", o_dim, "dimension for the radial families");
  oracle->add_option("--n", o_n, "grid points per axis");
  oracle->add_flag("--check", o_check,
                   "verify the defining equation at generic points");

  auto* sclimit = app.add_subcommand("sclimit", "vanishing-degeneracy family");
  std::string c_deltas, c_op = "trace", c_f = "const:1", c_bc = "oracle:radial:1";
  int c_n = 65;
  double c_ball = 0.8;
  sclimit->add_option("--deltas", c_deltas, "strictly decreasing list")
      ->required();
  sclimit->add_option("--n", c_n, "grid points per axis");
  sclimit->add_option("--ball", c_ball, "comparison ball radius");
  sclimit->add_option("--op", c_op, "diffusion operator, as in solve");
  sclimit->add_option("--f", c_f, "source, const:<value>");
  sclimit->add_option("--bc", c_bc, "shared boundary data, as in solve");

  // Global options may appear after the subcommand name.
  for (CLI::App* sub : {solve, estimate, table, oracle, sclimit})
    sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  Manifest man;
  man.args = args;
  man.seed = common.seed;
  try {
    std::filesystem::create_directories(common.out_dir);
    man.out_dir = common.out_dir;
    int rc = 0;
    if (solve->parsed()) {
      man.command = "solve";
      rc = cmd_solve(man, common, s_dim, s_n, s_op, s_gamma, s_f, s_bc,
                     s_solver);
    } else if (estimate->parsed()) {
      man.command = "estimate";
      rc = cmd_estimate(man, e_in, e_center, e_rho0, e_K);
    } else if (table->parsed()) {
      man.command = "table";
      rc = cmd_table(man, common, t_gammas, t_dim, t_n, t_rho0, t_K);
    } else if (oracle->parsed()) {
      man.command = "oracle";
      rc = cmd_oracle(man, common, o_name, o_gamma, o_q, o_p, o_dim, o_n,
                      o_check);
    } else if (sclimit->parsed()) {
      man.command = "sclimit";
      rc = cmd_sclimit(man, common, c_deltas, c_n, c_ball, c_op, c_f, c_bc);
    }
    // Partial numerical failures (rc 2) still wrote their outputs; the
    // manifest must name whatever exists.
    man.finish();
    return rc;
  } catch (const usage_error& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return 1;
  } catch (const error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}

}  // namespace degen
