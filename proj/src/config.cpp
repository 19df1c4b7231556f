#include "gaussex/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <variant>

#include "gaussex/error.hpp"

namespace gaussex {

namespace {

// ---------------------------------------------------------------------------
// Tokenizer for the TOML subset: key = number | "string" | true/false | [numbers].

struct Value {
  std::variant<double, std::string, bool, std::vector<double>> v;
  std::string raw;  // numeric literal as written, for integer fields
  std::size_t line = 0;
};

using Table = std::map<std::string, Value>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& tok, std::size_t line, const std::string& field) {
  double x = 0.0;
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last || tok.empty() || !std::isfinite(x)) {
    throw ParseError(line, field, "expected a decimal number, got '" + tok + "'");
  }
  return x;
}

// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && in_str) {
      ++i;
    } else if (s[i] == '"') {
      in_str = !in_str;
    } else if (s[i] == '#' && !in_str) {
      return s.substr(0, i);
    }
  }
  return s;
}

Value parse_value(const std::string& text, std::size_t line, const std::string& field) {
  Value val;
  val.line = line;
  if (text.empty()) throw ParseError(line, field, "missing value");
  if (text.front() == '"') {
    std::string out;
    std::size_t i = 1;
    for (; i < text.size() && text[i] != '"'; ++i) {
      if (text[i] == '\\') {
        if (++i >= text.size()) break;
        switch (text[i]) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: throw ParseError(line, field, "unsupported escape in string");
        }
      } else {
        out += text[i];
      }
    }
    if (i >= text.size() || trim(text.substr(i + 1)) != "") throw ParseError(line, field, "malformed string");
    val.v = out;
    return val;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ParseError(line, field, "arrays must close on the same line");
    std::vector<double> xs;
    std::stringstream ss(text.substr(1, text.size() - 2));
    std::string item;
    std::vector<std::string> items;
    while (std::getline(ss, item, ',')) items.push_back(trim(item));
    if (!items.empty() && items.back().empty()) items.pop_back();  // trailing comma
    for (const auto& it : items) xs.push_back(parse_number(it, line, field));
    val.v = xs;
    return val;
  }
  if (text == "true" || text == "false") {
    val.v = text == "true";
    return val;
  }
  val.v = parse_number(text, line, field);
  val.raw = text;
  return val;
}

std::map<std::string, Table> tokenize(const std::string& text) {
  static const std::set<std::string> sections{"model", "grid", "run"};
  std::map<std::string, Table> out;
  std::string current;
  std::istringstream in(text);
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const std::string s = trim(strip_comment(raw));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ParseError(line, "", "malformed section header");
      current = trim(s.substr(1, s.size() - 2));
      if (!sections.count(current)) throw ParseError(line, current, "unknown section (expected model, grid, run)");
      if (out.count(current)) throw ParseError(line, current, "section appears twice");
      out[current];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ParseError(line, "", "expected key = value");
    const std::string key = trim(s.substr(0, eq));
    if (current.empty()) throw ParseError(line, key, "key outside of a section");
    const std::string field = current + "." + key;
    if (key.empty()) throw ParseError(line, "", "empty key");
    auto& table = out[current];
    if (table.count(key)) throw ParseError(line, field, "key appears twice");
    table[key] = parse_value(trim(s.substr(eq + 1)), line, field);
  }
  return out;
}

// Typed access with strict schema: every key must be consumed.
class Reader {
 public:
  Reader(std::string section, Table table) : section_(std::move(section)), table_(std::move(table)) {}

  bool has(const std::string& key) const { return table_.count(key) > 0; }

  std::size_t line(const std::string& key) const { return has(key) ? table_.at(key).line : 0; }

  std::string field(const std::string& key) const { return section_ + "." + key; }

  const Value& get(const std::string& key) {
    const auto it = table_.find(key);
    if (it == table_.end()) throw ParseError(0, field(key), "required field is missing");
    used_.insert(key);
    return it->second;
  }

  double number(const std::string& key) {
    const auto& v = get(key);
    if (const auto* d = std::get_if<double>(&v.v)) return *d;
    throw ParseError(v.line, field(key), "expected a number");
  }

  std::optional<double> opt_number(const std::string& key) {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  std::uint64_t integer(const std::string& key) {
    const auto& v = get(key);
    std::uint64_t x = 0;
    const auto& raw = v.raw;
    const auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), x);
    if (raw.empty() || ec != std::errc() || ptr != raw.data() + raw.size()) {
      throw ParseError(v.line, field(key), "expected a nonnegative integer");
    }
    return x;
  }

  std::string string(const std::string& key) {
    const auto& v = get(key);
    if (const auto* s = std::get_if<std::string>(&v.v)) return *s;
    throw ParseError(v.line, field(key), "expected a string");
  }

  std::vector<double> array(const std::string& key) {
    const auto& v = get(key);
    if (const auto* a = std::get_if<std::vector<double>>(&v.v)) return *a;
    if (const auto* d = std::get_if<double>(&v.v)) return {*d};
    throw ParseError(v.line, field(key), "expected an array of numbers");
  }

  void finish() const {
    for (const auto& [key, v] : table_) {
      if (!used_.count(key)) throw ParseError(v.line, field(key), "unknown field");
    }
  }

 private:
  std::string section_;
  Table table_;
  std::set<std::string> used_;
};

void require(bool ok, const Reader& r, const std::string& key, const std::string& what) {
  if (!ok) throw ParseError(r.line(key), r.field(key), what);
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    if (c == '\t') {
      out += "\\t";
      continue;
    }
    out += c;
  }
  return out + "\"";
}

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // Keep a decimal marker so the literal reads as a real number.
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string arr(const std::vector<double>& xs) {
  std::string s = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + num(xs[i]);
  return s + "]";
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  auto sections = tokenize(text);
  for (const char* s : {"model", "grid", "run"}) {
    if (!sections.count(s)) throw ParseError(0, s, "missing section");
  }
  ExperimentConfig c;

  Reader m("model", sections["model"]);
  c.model.kind = m.string("kind");
  auto& mc = c.model;
  if (mc.kind == "perf") {
    mc.n = m.integer("n");
    mc.alpha = m.number("alpha");
    mc.weights = m.array("weights");
    require(mc.n >= 1, m, "n", "n must be at least 1");
    require(mc.weights.size() == mc.n + 1, m, "weights", "needs n + 1 weights");
    mc.hw = m.opt_number("hw");
    mc.pickands = m.opt_number("pickands");
  } else if (mc.kind == "chi") {
    mc.n = m.integer("n");
    mc.alpha = m.number("alpha");
    mc.a = m.number("a");
    mc.b = m.number("b");
    if (m.has("y")) mc.y = m.string("y");
    require(mc.y == "fbm" || mc.y == "subfbm", m, "y", "expected \"fbm\" or \"subfbm\"");
    mc.p_const = m.opt_number("p_const");
  } else if (mc.kind == "custom") {
    mc.kernel = m.string("kernel");
    mc.alpha = m.number("alpha");
    mc.optimizer = m.array("optimizer");
    mc.formula_c = m.number("formula_c");
    mc.formula_exponent = m.number("formula_exponent");
    mc.formula_sigma = m.opt_number("formula_sigma");
  } else {
    throw ParseError(m.line("kind"), "model.kind", "expected \"perf\", \"chi\" or \"custom\"");
  }
  m.finish();

  Reader g("grid", sections["grid"]);
  c.grid.kind = g.string("kind");
  require(c.grid.kind == "interval" || c.grid.kind == "simplex" || c.grid.kind == "hyperrectangle", g, "kind",
          "expected \"interval\", \"simplex\" or \"hyperrectangle\"");
  if (g.has("lo")) c.grid.lo = g.number("lo");
  if (g.has("hi")) c.grid.hi = g.number("hi");
  require(c.grid.hi > c.grid.lo, g, "hi", "needs lo < hi");
  c.grid.mesh = g.opt_number("mesh");
  if (g.has("cells")) c.grid.cells = g.integer("cells");
  if (c.grid.mesh.has_value() == c.grid.cells.has_value()) {
    throw ParseError(g.line(c.grid.mesh ? "mesh" : "cells"), "grid.mesh", "give exactly one of mesh or cells");
  }
  require(!c.grid.mesh || *c.grid.mesh > 0.0, g, "mesh", "mesh must be positive");
  require(!c.grid.cells || *c.grid.cells > 0, g, "cells", "cells must be positive");
  if (g.has("refine_levels")) c.grid.refine_levels = static_cast<int>(g.integer("refine_levels"));
  if (g.has("refine_ratio")) c.grid.refine_ratio = static_cast<int>(g.integer("refine_ratio"));
  require(c.grid.refine_ratio >= 2, g, "refine_ratio", "refine_ratio must be at least 2");
  c.grid.band = g.opt_number("band");
  require(!c.grid.band || *c.grid.band > 0.0, g, "band", "band must be positive");
  g.finish();

  Reader r("run", sections["run"]);
  c.run.u = r.array("u");
  require(!c.run.u.empty(), r, "u", "needs at least one level");
  for (std::size_t i = 1; i < c.run.u.size(); ++i) {
    require(c.run.u[i] > c.run.u[i - 1], r, "u", "levels must be strictly increasing");
  }
  c.run.n_reps = r.integer("n_reps");
  require(c.run.n_reps > 0, r, "n_reps", "n_reps must be positive");
  c.run.seed = r.integer("seed");
  if (r.has("threads")) c.run.threads = static_cast<unsigned>(r.integer("threads"));
  if (r.has("output")) c.run.output = r.string("output");
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  const auto& m = c.model;
  os << "[model]\nkind = " << quote(m.kind) << "\n";
  if (m.kind == "perf") {
    os << "n = " << m.n << "\nalpha = " << num(m.alpha) << "\nweights = " << arr(m.weights) << "\n";
    if (m.hw) os << "hw = " << num(*m.hw) << "\n";
    if (m.pickands) os << "pickands = " << num(*m.pickands) << "\n";
  } else if (m.kind == "chi") {
    os << "n = " << m.n << "\nalpha = " << num(m.alpha) << "\na = " << num(m.a) << "\nb = " << num(m.b)
       << "\ny = " << quote(m.y) << "\n";
    if (m.p_const) os << "p_const = " << num(*m.p_const) << "\n";
  } else {
    os << "kernel = " << quote(m.kernel) << "\nalpha = " << num(m.alpha) << "\noptimizer = " << arr(m.optimizer)
       << "\n";
    if (m.formula_c) os << "formula_c = " << num(*m.formula_c) << "\n";
    if (m.formula_exponent) os << "formula_exponent = " << num(*m.formula_exponent) << "\n";
    if (m.formula_sigma) os << "formula_sigma = " << num(*m.formula_sigma) << "\n";
  }
  const auto& g = c.grid;
  os << "\n[grid]\nkind = " << quote(g.kind) << "\nlo = " << num(g.lo) << "\nhi = " << num(g.hi) << "\n";
  if (g.mesh) os << "mesh = " << num(*g.mesh) << "\n";
  if (g.cells) os << "cells = " << *g.cells << "\n";
  os << "refine_levels = " << g.refine_levels << "\nrefine_ratio = " << g.refine_ratio << "\n";
  if (g.band) os << "band = " << num(*g.band) << "\n";
  const auto& r = c.run;
  os << "\n[run]\nu = " << arr(r.u) << "\nn_reps = " << r.n_reps << "\nseed = " << r.seed
     << "\nthreads = " << r.threads << "\noutput = " << quote(r.output) << "\n";
  return os.str();
}

void save_config(const ExperimentConfig& config, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write config file '" + path + "'");
  out << format_config(config);
}

std::string config_hash(const ExperimentConfig& config) {
  // Thread count and output location do not change results.
  ExperimentConfig c = config;
  c.run.threads = 1;
  c.run.output.clear();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : format_config(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

FieldModel build_model(const ModelConfig& m) {
  if (m.kind == "perf") return FieldModel(PerfTableSpec(m.n, m.alpha, m.weights));
  if (m.kind == "chi") return FieldModel(make_chi_spec(m.n, m.alpha, m.a, m.b, m.y));
  if (m.kind == "custom") {
    CustomModel c{m.kernel, self_similar_kernel(m.kernel, m.alpha), {}};
    for (double z : m.optimizer) c.optimizer_points.push_back({z});
    if (c.optimizer_points.empty()) throw ModelError("custom model needs at least one optimizer point");
    return FieldModel(std::move(c));
  }
  throw ModelError("unknown model kind '" + m.kind + "'");
}

double variance_decay_exponent(const ModelConfig& m) {
  if (m.kind == "chi") return m.alpha;
  if (m.kind == "perf" && m.alpha < 1.0) return 2.0;
  return 1.0;
}

GridSpec build_grid(const ExperimentConfig& c) {
  const auto& g = c.grid;
  const FieldModel model = build_model(c.model);
  std::size_t dim = 1;
  if (c.model.kind == "perf") dim = c.model.n;
  const double length = g.kind == "simplex" ? 1.0 : g.hi - g.lo;
  const double mesh = g.mesh ? *g.mesh : length / static_cast<double>(*g.cells);

  std::optional<GridSpec> base;
  if (g.kind == "interval") {
    if (dim != 1) throw UsageError("interval grids need a one-dimensional model");
    base = GridSpec::interval(g.lo, g.hi, mesh);
  } else if (g.kind == "simplex") {
    base = GridSpec::simplex(dim, mesh);
  } else {
    base = GridSpec::hyperrectangle(std::vector<Bounds>(dim, Bounds{g.lo, g.hi}), std::vector<double>(dim, mesh));
  }
  if (g.refine_levels <= 0) return *base;

  std::vector<Point> focus;
  if (const auto* p = std::get_if<PerfTableSpec>(&model.spec()); p && p->alpha() == 1.0) {
    focus = perf_optimizer(*p, mesh).points;
  } else {
    focus = model.optimizer().points;
  }
  double band = 0.0;
  if (g.band) {
    band = *g.band;
  } else {
    const double u = c.run.u.back();
    const double ratio = std::log(u) / u;
    if (!(ratio > 0.0)) throw UsageError("default refinement band needs u > 1; set grid.band");
    band = std::pow(ratio, 2.0 / variance_decay_exponent(c.model));
  }
  return base->refined(focus, band, g.refine_levels, g.refine_ratio);
}

AsymptoticFormula build_formula(const ModelConfig& m, std::vector<ConstantEstimate>* used) {
  auto note = [used](const ConstantEstimate& e) {
    if (used) used->push_back(e);
  };
  if (m.kind == "perf") {
    const PerfTableSpec spec(m.n, m.alpha, m.weights);
    std::optional<ConstantEstimate> hw, pk;
    if (m.hw) {
      ConstantEstimate e;
      e.kind = ConstantKind::h_w;
      e.value = *m.hw;
      e.alpha = 1.0;
      e.lambda_power = static_cast<double>(spec.m()) - 1.0;
      hw = e;
      note(e);
    }
    if (m.pickands) {
      ConstantEstimate e;
      e.kind = ConstantKind::pickands;
      e.value = *m.pickands;
      e.alpha = m.alpha;
      pk = e;
      note(e);
    }
    return perf_table_formula(spec, hw, pk);
  }
  if (m.kind == "chi") {
    const auto spec = make_chi_spec(m.n, m.alpha, m.a, m.b, m.y);
    ConstantEstimate e;
    e.kind = m.y == "fbm" ? ConstantKind::piterbarg : ConstantKind::generalized_piterbarg;
    e.alpha = m.alpha;
    e.drift = m.b / m.a;
    e.lambda_power = 0.0;
    if (m.p_const) {
      e.value = *m.p_const;
    } else if (auto known = m.y == "fbm" ? lookup_known(ConstantKind::piterbarg, m.alpha, e.drift) : std::nullopt) {
      e.value = *known;
    } else {
      throw UsageError("no tabulated Piterbarg constant for this chi model; set model.p_const");
    }
    note(e);
    return chi_formula(spec, e);
  }
  if (!m.formula_c || !m.formula_exponent) throw UsageError("custom models need formula_c and formula_exponent");
  AsymptoticFormula f;
  f.constant_C = *m.formula_c;
  f.u_exponent = *m.formula_exponent;
  f.sigma_star = m.formula_sigma.value_or(1.0);
  f.description = "user-supplied formula";
  f.factors = {{"C", f.constant_C}};
  return f;
}

}  // namespace gaussex
