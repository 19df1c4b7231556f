#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "gaussex/config.hpp"
#include "gaussex/error.hpp"
#include "gaussex/records.hpp"
#include "gaussex/svg.hpp"

using namespace gaussex;

namespace {

const char* kMinimal = R"(
[model]
kind = "perf"
n = 2
alpha = 1.5
weights = [1, 0.5, 1]

[grid]
kind = "simplex"
mesh = 0.05

[run]
u = [3.5]
n_reps = 1000
seed = 7
)";

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("gaussex_test_" + name)).string();
}

ExperimentConfig random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ExperimentConfig c;
  const int kind = static_cast<int>(rng() % 3);
  if (kind == 0) {
    c.model.kind = "perf";
    c.model.n = 1 + rng() % 3;
    c.model.alpha = 0.1 + 1.8 * u(rng);
    for (std::size_t i = 0; i <= c.model.n; ++i) c.model.weights.push_back(0.1 + u(rng));
    if (rng() % 2) c.model.hw = 1.0 + u(rng);
    if (rng() % 2) c.model.pickands = u(rng);
  } else if (kind == 1) {
    c.model.kind = "chi";
    c.model.n = 1 + rng() % 4;
    c.model.alpha = 0.1 + 1.8 * u(rng);
    c.model.a = u(rng);
    c.model.b = 3.0 * u(rng);
    c.model.y = rng() % 2 ? "fbm" : "subfbm";
    if (rng() % 2) c.model.p_const = 1.0 + u(rng);
  } else {
    c.model.kind = "custom";
    c.model.kernel = "fbm";
    c.model.alpha = u(rng) + 0.5;
    c.model.optimizer = {u(rng)};
    c.model.formula_c = u(rng);
    c.model.formula_exponent = 3.0 * u(rng);
    if (rng() % 2) c.model.formula_sigma = 1.0 + u(rng);
  }
  c.grid.kind = rng() % 2 ? "interval" : "simplex";
  c.grid.lo = -u(rng);
  c.grid.hi = 1.0 + u(rng);
  if (rng() % 2) {
    c.grid.mesh = 0.001 + u(rng) / 10.0;
  } else {
    c.grid.cells = 1 + rng() % 500;
  }
  c.grid.refine_levels = static_cast<int>(rng() % 5);
  c.grid.refine_ratio = 2 + static_cast<int>(rng() % 3);
  if (rng() % 2) c.grid.band = 0.01 + u(rng);
  double level = u(rng);
  for (std::size_t i = 0, k = 1 + rng() % 4; i < k; ++i) c.run.u.push_back(level += 0.1 + u(rng));
  c.run.n_reps = 1 + rng() % 1000000;
  c.run.seed = rng();
  c.run.threads = 1 + static_cast<unsigned>(rng() % 8);
  c.run.output = "out/\"quoted\" dir";
  return c;
}

}  // namespace

TEST(Config, MinimalParses) {
  const auto c = parse_config(kMinimal);
  EXPECT_EQ(c.model.kind, "perf");
  EXPECT_EQ(c.model.weights, (std::vector<double>{1.0, 0.5, 1.0}));
  EXPECT_EQ(c.run.u, (std::vector<double>{3.5}));
  EXPECT_EQ(c.run.seed, 7u);
  EXPECT_EQ(c.run.threads, 1u);
  EXPECT_EQ(c.grid.mesh, 0.05);
}

TEST(Config, UnknownFieldIsNamed) {
  std::string text = kMinimal;
  text.replace(text.find("seed = 7"), 8, "seed = 7\nsede = 8");
  try {
    parse_config(text);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.field(), "run.sede");
    EXPECT_EQ(e.line(), 16u);
    EXPECT_NE(std::string(e.what()).find("run.sede"), std::string::npos);
  }
}

TEST(Config, SchemaViolations) {
  auto with = [](const std::string& from, const std::string& to) {
    std::string text = kMinimal;
    text.replace(text.find(from), from.size(), to);
    return text;
  };
  EXPECT_THROW(parse_config(with("u = [3.5]", "u = [3.5, 3.0]")), ParseError);
  EXPECT_THROW(parse_config(with("n_reps = 1000", "n_reps = 1e3")), ParseError);
  EXPECT_THROW(parse_config(with("alpha = 1.5", "alpha = \"x\"")), ParseError);
  EXPECT_THROW(parse_config(with("mesh = 0.05", "mesh = 0.05\ncells = 20")), ParseError);
  EXPECT_THROW(parse_config(with("[run]", "[runs]")), ParseError);
  EXPECT_THROW(parse_config(with("weights = [1, 0.5, 1]", "weights = [1, 0.5]")), ParseError);
  EXPECT_THROW(parse_config(with("kind = \"perf\"", "kind = \"gue\"")), ParseError);
  EXPECT_THROW(parse_config(with("n = 2", "n = 2\nn = 3")), ParseError);
  EXPECT_NO_THROW(parse_config(with("seed = 7", "seed = 7  # trailing comment")));
}

TEST(Config, RoundTripRandomized) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 200; ++k) {
    const auto c = random_config(rng);
    const auto back = parse_config(format_config(c));
    EXPECT_EQ(back, c) << format_config(c);
  }
}

TEST(Config, FileRoundTripAndHash) {
  std::mt19937_64 rng(5);
  const auto c = random_config(rng);
  const auto path = temp_path("config.toml");
  save_config(c, path);
  EXPECT_EQ(load_config(path), c);
  auto threads = c;
  threads.run.threads += 3;
  EXPECT_EQ(config_hash(c), config_hash(threads));
  auto seed = c;
  seed.run.seed += 1;
  EXPECT_NE(config_hash(c), config_hash(seed));
  EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, BuildsModelsGridsAndFormulas) {
  const auto c = parse_config(kMinimal);
  const auto grid = build_grid(c);
  EXPECT_EQ(grid.size(), GridSpec::simplex(2, 0.05).size());
  EXPECT_EQ(build_formula(c.model).constant_C, 2.0);

  ExperimentConfig chi;
  chi.model.kind = "chi";
  chi.model.n = 2;
  chi.grid.kind = "interval";
  chi.grid.cells = 263;
  chi.grid.refine_levels = 4;
  chi.grid.band = 0.1281;
  chi.run.u = {2.5, 3.0, 3.5};
  EXPECT_EQ(build_grid(chi).size(), 400u);
  std::vector<ConstantEstimate> used;
  EXPECT_NEAR(build_formula(chi.model, &used).constant_C, 5.0132565492620005, 1e-12);
  ASSERT_EQ(used.size(), 1u);
  EXPECT_EQ(used[0].value, 2.0);

  chi.model.y = "subfbm";
  EXPECT_THROW(build_formula(chi.model), UsageError);
}

TEST(Config, DefaultBandFollowsLocalizationScale) {
  ExperimentConfig c;
  c.model.kind = "chi";
  c.model.n = 2;
  c.grid.kind = "interval";
  c.grid.cells = 100;
  c.grid.refine_levels = 1;
  c.run.u = {3.5};
  const auto g = build_grid(c);
  const double band = std::pow(std::log(3.5) / 3.5, 2.0);  // beta = alpha = 1
  ASSERT_EQ(g.refinement().size(), 1u);
  EXPECT_NEAR(g.refinement()[0].radius, band, 1e-12);
  EXPECT_EQ(variance_decay_exponent(c.model), 1.0);
}

TEST(Records, JsonRoundTrip) {
  ResultRecord r;
  r.config_hash = "0123456789abcdef";
  r.timestamp = "2026-01-01T00:00:00Z";
  r.software_version = software_version();
  r.model = "chi";
  r.grid = "interval";
  r.refinement = {{1, 0.01, 0.1, 20}};
  r.n_reps = 1000;
  r.seed = 0xfffffffffffffff1ULL;
  r.formula.constant_C = 5.013256549262001;
  r.formula.u_exponent = 1.0;
  r.formula.factors = {{"a", 0.1}, {"b", 1.0 / 3.0}};
  ConstantEstimate e;
  e.kind = ConstantKind::piterbarg;
  e.value = 2.0;
  e.std_error = 0.01;
  r.constants = {e};
  r.rows = {{2.5, 0.08199, 0.081, 0.083, 0.0778, 0.08199 / 0.0778, 1.02, 1.07, false}};
  r.warnings = {"none"};
  const auto path = temp_path("record.json");
  store_record(r, path);
  const auto back = load_record(path);
  EXPECT_EQ(to_json(back), to_json(r));
  EXPECT_EQ(back.seed, r.seed);
  EXPECT_EQ(back.rows[0].ratio, r.rows[0].ratio);
  EXPECT_EQ(back.formula.factors[1].second, 1.0 / 3.0);
}

TEST(Records, CsvColumns) {
  ResultRecord r;
  r.rows = {{3.0, 0.5, 0.4, 0.6, 0.25, 2.0, 1.6, 2.4, false}};
  const auto csv = ratio_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "u,p_hat,ci_lo,ci_hi,asymptotic,ratio");
  EXPECT_NE(csv.find("\n3,0.5,0.40000000000000002,0.59999999999999998,0.25,2\n"), std::string::npos);
}

TEST(Svg, ContainsReferenceLineAndWhiskers) {
  ResultRecord r;
  r.model = "chi <n=2>";
  r.rows = {{2.5, 0.08, 0.07, 0.09, 0.078, 1.03, 0.9, 1.15, false}, {3.0, 0.02, 0.018, 0.022, 0.0203, 0.99, 0.88, 1.08, false}};
  const auto svg = ratio_plot_svg(r);
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("stroke-dasharray"), std::string::npos);
  EXPECT_NE(svg.find("&lt;n=2&gt;"), std::string::npos);
  EXPECT_GE(std::count(svg.begin(), svg.end(), '\n'), 10);
}
