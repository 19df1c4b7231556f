#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "gaussex/asymptotics.hpp"
#include "gaussex/field_models.hpp"
#include "gaussex/grid.hpp"

namespace gaussex {

/// [model] section. `kind` selects which of the remaining fields apply:
///   perf:   n, alpha, weights, hw, pickands
///   chi:    n, alpha, a, b, y, p_const
///   custom: kernel, alpha, optimizer, formula_c, formula_exponent, formula_sigma
struct ModelConfig {
  std::string kind = "perf";
  std::size_t n = 1;
  double alpha = 1.0;
  std::vector<double> weights;
  double a = 1.0;
  double b = 1.0;
  std::string y = "fbm";
  std::optional<double> p_const;
  std::optional<double> hw;
  std::optional<double> pickands;
  std::string kernel = "fbm";
  std::vector<double> optimizer;
  std::optional<double> formula_c;
  std::optional<double> formula_exponent;
  std::optional<double> formula_sigma;

  bool operator==(const ModelConfig&) const = default;
};

/// [grid] section. Exactly one of mesh / cells; refinement is toward the optimizer set.
struct GridConfig {
  std::string kind = "interval";
  double lo = 0.0;
  double hi = 1.0;
  std::optional<double> mesh;
  std::optional<std::size_t> cells;
  int refine_levels = 0;
  int refine_ratio = 2;
  std::optional<double> band;  ///< defaults to (ln u / u)^(2 / beta) at the largest u

  bool operator==(const GridConfig&) const = default;
};

struct RunConfig {
  std::vector<double> u;
  std::size_t n_reps = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::string output = "out";

  bool operator==(const RunConfig&) const = default;
};

struct ExperimentConfig {
  ModelConfig model;
  GridConfig grid;
  RunConfig run;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parses the TOML subset used for experiments; throws ParseError with line and field.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Canonical text form; parse_config(format_config(c)) == c.
std::string format_config(const ExperimentConfig& config);
void save_config(const ExperimentConfig& config, const std::string& path);

/// FNV-1a of the canonical text form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

FieldModel build_model(const ModelConfig& model);

/// Decay exponent beta of the variance near the optimizer set (used for the default band).
double variance_decay_exponent(const ModelConfig& model);

/// Base grid, refined toward the optimizer set when refine_levels > 0.
GridSpec build_grid(const ExperimentConfig& config);

/// Asymptotic formula with constants taken from the config or the known table.
AsymptoticFormula build_formula(const ModelConfig& model, std::vector<ConstantEstimate>* used = nullptr);

}  // namespace gaussex
