#include "gaussex/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

#include "gaussex/config.hpp"
#include "gaussex/constants.hpp"
#include "gaussex/error.hpp"
#include "gaussex/harness.hpp"
#include "gaussex/records.hpp"
#include "gaussex/sampler.hpp"
#include "gaussex/svg.hpp"

namespace gaussex {

namespace {

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string out_dir = ".";
  std::string format = "csv";
  CLI::Option* seed_opt = nullptr;
  CLI::Option* threads_opt = nullptr;
  CLI::Option* out_opt = nullptr;
};

bool given(const CLI::Option* o) { return o != nullptr && o->count() > 0; }

std::string g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::optional<unsigned> env_threads() {
  const char* s = std::getenv("GAUSSEX_THREADS");
  if (s == nullptr || *s == '\0') return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (*end != '\0' || v < 1) throw UsageError("GAUSSEX_THREADS must be a positive integer");
  return static_cast<unsigned>(v);
}

unsigned resolve_threads(const Globals& g, std::optional<unsigned> from_config) {
  if (given(g.threads_opt)) return std::max(1u, g.threads);
  if (auto e = env_threads()) return *e;
  return from_config.value_or(1u);
}

std::uint64_t resolve_seed(const Globals& g, std::uint64_t fallback) { return given(g.seed_opt) ? g.seed : fallback; }

std::string out_path(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  return (std::filesystem::path(dir) / name).string();
}

// Model flags shared by formula, expansion-check and sample; each overrides the config value.
struct ModelFlags {
  std::string config;
  std::string kind;
  std::size_t n = 0;
  double alpha = 0, a = 0, b = 0, p_const = 0, hw = 0, pickands = 0;
  std::vector<double> weights;
  std::string y;
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, bool with_kind) {
    app->add_option("--config", config, "experiment config file (flags win)")->check(CLI::ExistingFile);
    if (with_kind) opts["kind"] = app->add_option("model", kind, "perf | chi")->check(CLI::IsMember({"perf", "chi"}));
    opts["n"] = app->add_option("--n", n, "dimension n");
    opts["alpha"] = app->add_option("--alpha", alpha, "Hurst-type index alpha in (0, 2]");
    opts["weights"] = app->add_option("--weights", weights, "perf weights a_1 .. a_{n+1}")->delimiter(',');
    opts["a"] = app->add_option("--a", a, "chi correlation scale a");
    opts["b"] = app->add_option("--b", b, "chi variance decay b");
    opts["y"] = app->add_option("--y", y, "chi driving process")->check(CLI::IsMember({"fbm", "subfbm"}));
    opts["p_const"] = app->add_option("--p-const", p_const, "generalized Piterbarg constant for chi");
    opts["hw"] = app->add_option("--hw", hw, "H_W value for perf at alpha = 1");
    opts["pickands"] = app->add_option("--pickands", pickands, "Pickands constant for perf at alpha < 1");
  }

  bool set(const std::string& k) const {
    const auto it = opts.find(k);
    return it != opts.end() && given(it->second);
  }

  ModelConfig resolve() const {
    ModelConfig m;
    bool have = false;
    if (!config.empty()) {
      m = load_config(config).model;
      have = true;
    }
    const bool fixed_kind = !opts.count("kind") && !kind.empty() && !have;
    if (set("kind") || fixed_kind) {
      if (have && m.kind != kind) m = ModelConfig{};
      m.kind = kind;
      have = true;
    }
    if (!have) throw UsageError("give a model (perf | chi) or --config");
    if (set("n")) m.n = n;
    if (set("alpha")) m.alpha = alpha;
    if (set("weights")) m.weights = weights;
    if (set("a")) m.a = a;
    if (set("b")) m.b = b;
    if (set("y")) m.y = y;
    if (set("p_const")) m.p_const = p_const;
    if (set("hw")) m.hw = hw;
    if (set("pickands")) m.pickands = pickands;
    if (m.kind == "perf") {
      if (!set("n") && config.empty()) throw UsageError("--n is required for perf models");
      if (!set("alpha") && config.empty()) throw UsageError("--alpha is required");
      if (m.weights.empty()) m.weights.assign(m.n + 1, 1.0);
      if (m.weights.size() != m.n + 1) throw UsageError("--weights needs n + 1 values");
    } else if (m.kind == "chi") {
      for (const char* k : {"n", "alpha", "a", "b"}) {
        if (!set(k) && config.empty()) throw UsageError(std::string("--") + k + " is required for chi models");
      }
    }
    return m;
  }
};

// ----------------------------------------------------------------------------- constant

struct ConstantArgs {
  std::string kind;
  double alpha = 1.0;
  double lambda = 0.0;
  double mesh = 0.0;
  std::size_t reps = 0;
  double b = 0.0;
  double horizon = 0.0;
  bool extrapolate = false;
  std::string y = "fbm";
  std::size_t n = 0;
  std::vector<double> weights;
  std::string config;
  CLI::Option *lambda_opt, *mesh_opt, *reps_opt, *b_opt, *horizon_opt, *n_opt, *alpha_opt;
};

CommandOutcome cmd_constant(const ConstantArgs& a, const Globals& g) {
  const ConstantKind kind = constant_kind_from_string(a.kind);
  std::optional<ExperimentConfig> cfg;
  if (!a.config.empty()) cfg = load_config(a.config);
  const Exec exec{resolve_threads(g, cfg ? std::optional<unsigned>(cfg->run.threads) : std::nullopt)};
  const std::uint64_t seed = resolve_seed(g, cfg ? cfg->run.seed : 1);
  const bool is_hw = kind == ConstantKind::h_w;

  double alpha = a.alpha;
  double b = a.b;
  std::string y = a.y;
  bool have_b = given(a.b_opt);
  if (cfg && cfg->model.kind == "chi") {
    if (!given(a.alpha_opt)) alpha = cfg->model.alpha;
    if (!have_b) b = cfg->model.b / cfg->model.a;
    have_b = true;
    y = cfg->model.y;
  }
  const double lambda = given(a.lambda_opt) ? a.lambda : (is_hw ? 6.0 : 20.0);
  const double mesh = given(a.mesh_opt) ? a.mesh : (is_hw ? 0.1 : 0.02);
  std::size_t reps = given(a.reps_opt) ? a.reps : (is_hw ? 10000 : 20000);
  if (cfg && !given(a.reps_opt)) reps = cfg->run.n_reps;

  ConstantEstimate est;
  std::optional<double> known;
  switch (kind) {
    case ConstantKind::pickands:
      est = pickands_estimate(alpha, lambda, mesh, reps, seed, a.extrapolate, exec);
      known = lookup_known(kind, alpha);
      break;
    case ConstantKind::piterbarg:
    case ConstantKind::generalized_piterbarg: {
      if (!have_b) throw UsageError("--b is required for " + a.kind);
      const double horizon = given(a.horizon_opt) ? a.horizon : piterbarg_required_horizon(alpha, b);
      if (kind == ConstantKind::piterbarg) {
        est = piterbarg_estimate(alpha, b, horizon, mesh, reps, seed, exec);
        known = lookup_known(kind, alpha, b);
      } else {
        est = generalized_piterbarg_estimate(self_similar_kernel(y, alpha), alpha, b, horizon, mesh, reps, seed, exec);
        if (y == "fbm") known = lookup_known(ConstantKind::piterbarg, alpha, b);
      }
      break;
    }
    case ConstantKind::h_w: {
      std::size_t n = a.n;
      std::vector<double> w = a.weights;
      if (cfg && cfg->model.kind == "perf") {
        if (!given(a.n_opt)) n = cfg->model.n;
        if (w.empty()) w = cfg->model.weights;
      }
      if (n == 0) throw UsageError("--n is required for h_w");
      if (w.empty()) w.assign(n + 1, 1.0);
      const PerfTableSpec spec(n, 1.0, w);
      est = hw_estimate(spec, lambda, mesh, reps, seed, exec);
      if (spec.m() == n + 1 && n <= 2) known = 1.0;
      std::cout << "upper bound " << g17(hw_upper_bound(spec)) << "\n";
      break;
    }
  }

  std::cout << to_string(kind) << " = " << g17(est.value) << " +- " << g17(est.std_error) << "\n";
  if (known) std::cout << "known " << g17(*known) << ", |value - known| = " << g17(std::abs(est.value - *known)) << "\n";
  if (est.truncation_sensitivity > 0.05) {
    std::cerr << "warning: estimate is sensitive to its upper tail (clipped-mean change "
              << g17(est.truncation_sensitivity) << ")\n";
  }

  CommandOutcome out;
  if (g.format == "json") {
    auto j = to_json(est);
    if (known) j["known"] = *known;
    const auto path = out_path(g.out_dir, "constant_" + to_string(kind) + ".json");
    write_text(path, j.dump(2) + "\n");
    out.artifacts.push_back(path);
  } else {
    std::string csv = "kind,value,stderr,lambda,mesh,n_reps,alpha,drift,extrapolated,seed\n";
    csv += to_string(kind) + "," + g17(est.value) + "," + g17(est.std_error) + "," + g17(est.lambda) + "," +
           g17(est.mesh) + "," + std::to_string(est.n_reps) + "," + g17(est.alpha) + "," + g17(est.drift) + "," +
           (est.extrapolated ? "true" : "false") + "," + std::to_string(est.seed) + "\n";
    const auto path = out_path(g.out_dir, "constant_" + to_string(kind) + ".csv");
    write_text(path, csv);
    out.artifacts.push_back(path);
  }
  return out;
}

// ----------------------------------------------------------------------------- tail / compare

struct RunArgs {
  std::string config;
  std::vector<double> u;
  std::size_t reps = 0;
  CLI::Option *u_opt, *reps_opt;
};

ExperimentConfig resolve_run(const RunArgs& r, const Globals& g) {
  ExperimentConfig c = load_config(r.config);
  if (given(r.u_opt)) c.run.u = r.u;
  if (given(r.reps_opt)) c.run.n_reps = r.reps;
  if (given(g.seed_opt)) c.run.seed = g.seed;
  c.run.threads = resolve_threads(g, c.run.threads);
  if (given(g.out_opt)) c.run.output = g.out_dir;
  if (c.run.u.empty()) throw UsageError("at least one u level is required");
  for (std::size_t i = 1; i < c.run.u.size(); ++i) {
    if (!(c.run.u[i] > c.run.u[i - 1])) throw UsageError("u levels must be strictly increasing");
  }
  if (c.run.n_reps == 0) throw UsageError("n_reps must be positive");
  return c;
}

CommandOutcome cmd_tail(const RunArgs& r, const Globals& g) {
  const auto c = resolve_run(r, g);
  const auto model = build_model(c.model);
  const auto grid = build_grid(c);
  const auto tails = estimate_tails(model, grid, c.run.u, c.run.n_reps, c.run.seed, Exec{c.run.threads});
  CommandOutcome out;
  std::cout << "model " << model.name() << ", grid " << grid.summary() << "\n";
  std::string csv = "u,p_hat,ci_lo,ci_hi,n_reps\n";
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& t : tails) {
    std::cout << "u = " << t.u << ": p_hat = " << g17(t.p_hat) << " [" << t.ci_lo << ", " << t.ci_hi << "]\n";
    csv += g17(t.u) + "," + g17(t.p_hat) + "," + g17(t.ci_lo) + "," + g17(t.ci_hi) + "," + std::to_string(t.n_reps) +
           "\n";
    rows.push_back({{"u", t.u}, {"p_hat", t.p_hat}, {"ci_lo", t.ci_lo}, {"ci_hi", t.ci_hi}, {"n_reps", t.n_reps}});
  }
  if (g.format == "json") {
    nlohmann::json j{{"config_hash", config_hash(c)}, {"model", model.name()}, {"grid", grid.summary()},
                     {"seed", c.run.seed}, {"software_version", software_version()}, {"rows", rows}};
    const auto path = out_path(c.run.output, "tail.json");
    write_text(path, j.dump(2) + "\n");
    out.artifacts.push_back(path);
  } else {
    const auto path = out_path(c.run.output, "tail.csv");
    write_text(path, csv);
    out.artifacts.push_back(path);
  }
  return out;
}

CommandOutcome cmd_compare(const RunArgs& r, const Globals& g) {
  const auto c = resolve_run(r, g);
  const auto model = build_model(c.model);
  const auto grid = build_grid(c);
  std::vector<ConstantEstimate> used;
  const auto formula = build_formula(c.model, &used);
  auto rec = ratio_table(model, formula, c.run.u, grid, c.run.n_reps, c.run.seed, Exec{c.run.threads});
  rec.config_hash = config_hash(c);
  rec.timestamp = utc_timestamp();
  rec.constants = used;

  std::cout << "model " << rec.model << ", grid " << rec.grid << "\n" << formula.description << "\n";
  for (const auto& row : rec.rows) {
    std::cout << "u = " << row.u << ": p_hat = " << g17(row.p_hat) << ", asymptotic = " << g17(row.asymptotic)
              << ", ratio = " << row.ratio << " [" << row.ratio_lo << ", " << row.ratio_hi << "]\n";
  }
  for (const auto& w : rec.warnings) std::cerr << "warning: " << w << "\n";

  CommandOutcome out;
  const auto json_path = out_path(c.run.output, "compare.json");
  store_record(rec, json_path);
  const auto csv_path = out_path(c.run.output, "compare.csv");
  write_text(csv_path, ratio_csv(rec));
  const auto svg_path = out_path(c.run.output, "compare.svg");
  write_text(svg_path, ratio_plot_svg(rec));
  out.artifacts = {json_path, csv_path, svg_path};
  return out;
}

// ----------------------------------------------------------------------------- expansion-check / formula / sample

struct ExpansionArgs {
  ModelFlags model;
  std::vector<double> deltas{0.1, 0.03, 0.01};
  std::size_t probes = 2000;
  std::vector<std::string> which;
};

CommandOutcome cmd_expansion_check(const ExpansionArgs& e, const Globals& g) {
  ModelConfig m = e.model.resolve();
  if (m.kind != "perf") throw UsageError("expansion-check needs a perf model");
  const PerfTableSpec spec(m.n, m.alpha, m.weights);
  std::vector<Expansion> which;
  for (const auto& w : e.which) which.push_back(expansion_from_string(w));
  const std::uint64_t seed = resolve_seed(g, 20240601);
  std::string csv = "expansion,delta,max_rel_error\n";
  nlohmann::json rows = nlohmann::json::array();
  for (double d : e.deltas) {
    for (const auto& [ex, err] : check_expansions(spec, d, e.probes, seed, which)) {
      std::cout << to_string(ex) << " delta = " << d << ": max relative error " << g17(err) << "\n";
      csv += to_string(ex) + "," + g17(d) + "," + g17(err) + "\n";
      rows.push_back({{"expansion", to_string(ex)}, {"delta", d}, {"max_rel_error", err}});
    }
  }
  CommandOutcome out;
  const auto path = out_path(g.out_dir, g.format == "json" ? "expansion.json" : "expansion.csv");
  write_text(path, g.format == "json" ? rows.dump(2) + "\n" : csv);
  out.artifacts.push_back(path);
  return out;
}

struct FormulaArgs {
  ModelFlags model;
  std::vector<double> u;
};

CommandOutcome cmd_formula(const FormulaArgs& f, const Globals& g) {
  const ModelConfig m = f.model.resolve();
  std::vector<ConstantEstimate> used;
  const auto formula = build_formula(m, &used);
  if (g.format == "json") {
    auto j = to_json(formula);
    for (double u : f.u) j["values"].push_back({{"u", u}, {"value", formula.evaluate(u)}});
    std::cout << j.dump(2) << "\n";
    return {};
  }
  std::cout << formula.description << "\n";
  std::cout << "C = " << g17(formula.constant_C) << "\n";
  std::cout << "exponent = " << g17(formula.u_exponent) << "\n";
  std::cout << "sigma* = " << g17(formula.sigma_star) << "\n";
  for (const auto& [name, value] : formula.factors) std::cout << "  " << name << " = " << g17(value) << "\n";
  for (double u : f.u) std::cout << "u = " << u << ": " << g17(formula.evaluate(u)) << "\n";
  return {};
}

struct SampleArgs {
  std::string config;
  std::string kernel = "fbm";
  double alpha = 1.0;
  double lo = 0.0;
  double hi = 1.0;
  double mesh = 0.01;
  std::size_t reps = 10;
};

CommandOutcome cmd_sample(const SampleArgs& s, const Globals& g) {
  std::optional<ExperimentConfig> cfg;
  if (!s.config.empty()) cfg = load_config(s.config);
  const std::uint64_t seed = resolve_seed(g, cfg ? cfg->run.seed : 1);
  const Exec exec{resolve_threads(g, cfg ? std::optional<unsigned>(cfg->run.threads) : std::nullopt)};

  std::optional<CovarianceKernel> kernel;
  std::optional<GridSpec> grid;
  if (cfg) {
    const auto model = build_model(cfg->model);
    grid = build_grid(*cfg);
    if (const auto* p = std::get_if<PerfTableSpec>(&model.spec())) {
      kernel = perf_kernel(*p);
    } else if (const auto* c = std::get_if<ChiSpec>(&model.spec())) {
      kernel = chi_x_kernel(*c);
    } else {
      kernel = std::get<CustomModel>(model.spec()).kernel;
    }
  } else {
    kernel = self_similar_kernel(s.kernel, s.alpha);
    grid = GridSpec::interval(s.lo, s.hi, s.mesh);
  }
  const auto batch = sample_paths(*kernel, *grid, s.reps, seed, exec);

  std::ostringstream os;
  os.precision(17);
  os << "rep";
  for (std::size_t i = 0; i < grid->size(); ++i) {
    os << ",";
    const auto& p = grid->point(i);
    for (std::size_t k = 0; k < p.size(); ++k) os << (k ? ";" : "") << p[k];
  }
  os << "\n";
  for (Eigen::Index r = 0; r < batch.values.rows(); ++r) {
    os << r;
    for (Eigen::Index c = 0; c < batch.values.cols(); ++c) os << "," << batch.values(r, c);
    os << "\n";
  }
  CommandOutcome out;
  const auto path = out_path(g.out_dir, "samples.csv");
  write_text(path, os.str());
  out.artifacts.push_back(path);
  std::cout << s.reps << " paths on " << grid->summary() << "\n";
  return out;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Monte Carlo and asymptotics for extremes of Gaussian fields", "gaussex"};
  app.set_version_flag("--version", software_version());
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed, "random seed");
  g.threads_opt = app.add_option("--threads", g.threads, "worker threads (fallback: GAUSSEX_THREADS)");
  g.out_opt = app.add_option("--out-dir", g.out_dir, "directory for written artifacts");
  app.add_option("--format", g.format, "artifact format")->check(CLI::IsMember({"csv", "json"}));

  ConstantArgs ca;
  auto* constant = app.add_subcommand("constant", "estimate a Pickands-type constant");
  constant->add_option("kind", ca.kind, "pickands | piterbarg | generalized_piterbarg | h_w")
      ->required()
      ->check(CLI::IsMember({"pickands", "piterbarg", "generalized_piterbarg", "h_w"}));
  ca.alpha_opt = constant->add_option("--alpha", ca.alpha, "index alpha");
  ca.lambda_opt = constant->add_option("--lambda", ca.lambda, "horizon lambda");
  ca.mesh_opt = constant->add_option("--mesh", ca.mesh, "grid mesh");
  ca.reps_opt = constant->add_option("--reps", ca.reps, "replications");
  ca.b_opt = constant->add_option("--b", ca.b, "drift parameter b (Piterbarg kinds)");
  ca.horizon_opt = constant->add_option("--horizon", ca.horizon, "truncation horizon S (Piterbarg kinds)");
  constant->add_flag("--extrapolate", ca.extrapolate, "paired slope over [lambda/2, lambda]");
  constant->add_option("--y", ca.y, "self-similar process for generalized_piterbarg")
      ->check(CLI::IsMember({"fbm", "subfbm"}));
  ca.n_opt = constant->add_option("--n", ca.n, "dimension n (h_w)");
  constant->add_option("--weights", ca.weights, "weights a_1 .. a_{n+1} (h_w)")->delimiter(',');
  constant->add_option("--config", ca.config, "experiment config (flags win)")->check(CLI::ExistingFile);

  RunArgs ta, pa;
  auto* tail = app.add_subcommand("tail", "estimate P(max over grid > u)");
  auto* compare = app.add_subcommand("compare", "empirical versus asymptotic ratio table");
  for (auto [cmd, args] : {std::pair{tail, &ta}, std::pair{compare, &pa}}) {
    cmd->add_option("--config", args->config, "experiment config")->required()->check(CLI::ExistingFile);
    args->u_opt = cmd->add_option("--u", args->u, "levels, overriding run.u")->delimiter(',');
    args->reps_opt = cmd->add_option("--reps", args->reps, "replications, overriding run.n_reps");
  }

  ExpansionArgs ea;
  auto* expansion = app.add_subcommand("expansion-check", "relative error of the local expansions near the optimizer");
  ea.model.add(expansion, false);
  ea.model.kind = "perf";
  expansion->add_option("--delta", ea.deltas, "distances to the optimizer set")->delimiter(',');
  expansion->add_option("--probes", ea.probes, "probe points per delta");
  expansion->add_option("--which", ea.which, "subset of var1,r1,sigma21,r2,var3")->delimiter(',');

  FormulaArgs fa;
  auto* formula = app.add_subcommand("formula", "print the asymptotic formula and its factors");
  fa.model.add(formula, true);
  formula->add_option("--u", fa.u, "levels at which to evaluate")->delimiter(',');

  SampleArgs sa;
  auto* sample = app.add_subcommand("sample", "draw Gaussian paths on a grid");
  sample->add_option("--config", sa.config, "experiment config (model and grid)")->check(CLI::ExistingFile);
  sample->add_option("--kernel", sa.kernel, "fbm | subfbm")->check(CLI::IsMember({"fbm", "subfbm"}));
  sample->add_option("--alpha", sa.alpha, "index alpha");
  sample->add_option("--lo", sa.lo, "interval start");
  sample->add_option("--hi", sa.hi, "interval end");
  sample->add_option("--mesh", sa.mesh, "interval mesh");
  sample->add_option("--reps", sa.reps, "number of paths");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    CommandOutcome out;
    if (*constant) {
      out = cmd_constant(ca, g);
    } else if (*tail) {
      out = cmd_tail(ta, g);
    } else if (*compare) {
      out = cmd_compare(pa, g);
    } else if (*expansion) {
      out = cmd_expansion_check(ea, g);
    } else if (*formula) {
      out = cmd_formula(fa, g);
    } else if (*sample) {
      out = cmd_sample(sa, g);
    }
    for (const auto& a : out.artifacts) std::cout << "wrote " << a << "\n";
    return out.exit_code;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const ModelError& e) {
    std::cerr << "model error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  }
}

}  // namespace gaussex
