#include "gaussex/field_models.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "gaussex/error.hpp"
#include "gaussex/rng.hpp"
#include "gaussex/sampler.hpp"

namespace gaussex {

namespace {

constexpr double kSimplexTol = 1e-12;

// t_0 = 0, t_1..t_n, t_{n+1} = 1.
std::vector<double> padded(PointView t) {
  std::vector<double> p(t.size() + 2);
  p.front() = 0.0;
  std::copy(t.begin(), t.end(), p.begin() + 1);
  p.back() = 1.0;
  return p;
}

// x_j for j = 1..n+1 with a hole at k*; index 0 holds x_0 = 0.
std::vector<double> full_x(const PerfTableSpec& spec, PointView x) {
  const std::size_t n = spec.n();
  if (x.size() != n) throw DomainError("alpha = 1 coordinates must have length n");
  std::vector<double> xf(n + 2, 0.0);
  std::size_t k = 0;
  for (std::size_t j = 1; j <= n + 1; ++j) {
    if (j == spec.k_star()) continue;
    xf[j] = x[k++];
  }
  return xf;
}

// Largest element of N below i, or 0.
std::size_t previous_in_N(const PerfTableSpec& spec, std::size_t i) {
  std::size_t p = 0;
  for (std::size_t k : spec.N()) {
    if (k < i) p = k;
  }
  return p;
}

// The displayed transform t(x) for i = 0..n+1, without validation.
std::vector<double> tt_map(const PerfTableSpec& spec, PointView x) {
  const std::size_t n = spec.n();
  const std::size_t ks = spec.k_star();
  const auto xf = full_x(spec, x);
  std::vector<double> t(n + 2, 0.0);
  t[n + 1] = 1.0;
  for (std::size_t i = 1; i <= n; ++i) {
    if (i >= ks) {
      double tail = 0.0;
      for (std::size_t j = i + 1; j <= n + 1; ++j) tail += xf[j];
      t[i] = 1.0 - tail;
    } else if (spec.in_N(i)) {
      t[i] = xf[i];
    } else {
      double acc = 0.0;
      for (std::size_t j = previous_in_N(spec, i); j <= i; ++j) acc += xf[j];
      t[i] = acc;
    }
  }
  return t;
}

double pow_abs(double x, double a) { return std::pow(std::abs(x), a); }

}  // namespace

// ---------------------------------------------------------------------------

PerfTableSpec::PerfTableSpec(std::size_t n, double alpha, std::vector<double> a)
    : n_(n), alpha_(alpha), a_(std::move(a)) {
  if (n_ == 0) throw ModelError("performance table needs n >= 1");
  if (!(alpha_ > 0.0 && alpha_ < 2.0)) throw ModelError("performance table alpha must lie in (0, 2)");
  if (a_.size() != n_ + 1) {
    throw ModelError("performance table needs n + 1 = " + std::to_string(n_ + 1) + " weights, got " +
                     std::to_string(a_.size()));
  }
  double top = 0.0;
  for (double w : a_) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ModelError("performance table weights must be positive and finite");
    top = std::max(top, w);
  }
  for (double& w : a_) w = w == top ? 1.0 : w / top;
  for (std::size_t i = 1; i <= n_ + 1; ++i) (a_[i - 1] == 1.0 ? N_ : Nc_).push_back(i);
}

void require_simplex_point(PointView t, std::size_t n) {
  if (t.size() != n) throw DomainError("simplex point must have " + std::to_string(n) + " coordinates");
  double prev = 0.0;
  for (double x : t) {
    if (!(x >= prev - kSimplexTol)) throw DomainError("point violates 0 <= t_1 <= ... <= t_n <= 1");
    prev = x;
  }
  if (!(prev <= 1.0 + kSimplexTol)) throw DomainError("point violates t_n <= 1");
}

double perf_cov(const PerfTableSpec& spec, PointView s, PointView t) {
  require_simplex_point(s, spec.n());
  require_simplex_point(t, spec.n());
  const auto ps = padded(s);
  const auto pt = padded(t);
  double acc = 0.0;
  for (std::size_t i = 1; i <= spec.n() + 1; ++i) {
    const double w = spec.weight(i);
    acc += w * w * fbm_increment_covariance(spec.alpha(), ps[i - 1], ps[i], pt[i - 1], pt[i]);
  }
  return acc;
}

double perf_variance(const PerfTableSpec& spec, PointView t) {
  require_simplex_point(t, spec.n());
  const auto p = padded(t);
  double acc = 0.0;
  for (std::size_t i = 1; i <= spec.n() + 1; ++i) {
    const double w = spec.weight(i);
    acc += w * w * pow_abs(p[i] - p[i - 1], spec.alpha());
  }
  return acc;
}

double perf_one_minus_corr(const PerfTableSpec& spec, PointView s, PointView t) {
  require_simplex_point(s, spec.n());
  require_simplex_point(t, spec.n());
  const auto ps = padded(s);
  const auto pt = padded(t);
  double d = 0.0;
  for (std::size_t i = 1; i <= spec.n() + 1; ++i) {
    const double w = spec.weight(i);
    d += w * w * fbm_increment_difference_variance(spec.alpha(), ps[i - 1], ps[i], pt[i - 1], pt[i]);
  }
  const double vs = perf_variance(spec, s);
  const double vt = perf_variance(spec, t);
  const double ss = std::sqrt(vs);
  const double st = std::sqrt(vt);
  const double diff = (vs - vt) / (ss + st);
  return (d - diff * diff) / (2.0 * ss * st);
}

CovarianceKernel perf_kernel(const PerfTableSpec& spec) {
  return CovarianceKernel("perf_table", spec.n(), [spec](PointView s, PointView t) { return perf_cov(spec, s, t); });
}

std::string to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::unique_point: return "unique_point";
    case OptimizerKind::positive_measure_set: return "positive_measure_set";
    case OptimizerKind::finite_point_set: return "finite_point_set";
  }
  return "unknown";
}

namespace {

// Lattice points of M: N^c increments vanish, N increments are multiples of 1/cells.
std::vector<Point> manifold_lattice(const PerfTableSpec& spec, double mesh) {
  const auto cells = static_cast<long>(std::llround(1.0 / mesh));
  if (cells < 1 || std::abs(static_cast<double>(cells) * mesh - 1.0) > 1e-9) {
    throw UsageError("optimizer lattice mesh must divide 1");
  }
  const std::size_t m = spec.m();
  std::vector<Point> out;
  std::vector<long> parts(m, 0);
  // Compositions of `cells` into m nonnegative parts, in lexicographic order.
  auto emit = [&] {
    std::vector<double> inc(spec.n() + 2, 0.0);
    for (std::size_t k = 0; k < m; ++k) inc[spec.N()[k]] = static_cast<double>(parts[k]) / static_cast<double>(cells);
    Point t(spec.n());
    double acc = 0.0;
    for (std::size_t i = 1; i <= spec.n(); ++i) {
      acc += inc[i];
      t[i - 1] = std::min(acc, 1.0);
    }
    out.push_back(std::move(t));
  };
  auto rec = [&](auto&& self, std::size_t k, long left) -> void {
    if (k + 1 == m) {
      parts[k] = left;
      emit();
      return;
    }
    for (long v = 0; v <= left; ++v) {
      parts[k] = v;
      self(self, k + 1, left - v);
    }
  };
  rec(rec, 0, cells);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

OptimizerReport perf_optimizer(const PerfTableSpec& spec, double manifold_mesh) {
  OptimizerReport r;
  r.m = spec.m();
  const double alpha = spec.alpha();
  const std::size_t n = spec.n();
  if (alpha < 1.0) {
    const double e = 2.0 / (1.0 - alpha);
    std::vector<double> w(n + 1);
    double total = 0.0;
    for (std::size_t i = 0; i <= n; ++i) {
      w[i] = std::pow(spec.a()[i], e);
      total += w[i];
    }
    Point z(n);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      acc += w[i];
      z[i] = acc / total;
    }
    r.kind = OptimizerKind::unique_point;
    r.points = {z};
    r.sigma_star = std::pow(total, (1.0 - alpha) / 2.0);
    r.manifold_dim = 0;
  } else if (alpha == 1.0) {
    r.kind = OptimizerKind::positive_measure_set;
    r.sigma_star = 1.0;
    r.manifold_dim = spec.m() - 1;
    r.points = manifold_lattice(spec, manifold_mesh);
  } else {
    r.kind = OptimizerKind::finite_point_set;
    r.sigma_star = 1.0;
    r.manifold_dim = 0;
    for (std::size_t j : spec.N()) {
      Point z(n, 0.0);
      for (std::size_t i = j; i <= n; ++i) z[i - 1] = 1.0;
      r.points.push_back(std::move(z));
    }
  }
  return r;
}

double optimizer_distance(const PerfTableSpec& spec, const OptimizerReport& report, PointView t) {
  if (t.size() != spec.n()) throw DomainError("point has wrong dimension");
  if (report.kind == OptimizerKind::positive_measure_set) {
    const auto p = padded(t);
    double off = 0.0;
    for (std::size_t i : spec.Nc()) off += std::abs(p[i] - p[i - 1]);
    return off;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : report.points) {
    double d = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) d = std::max(d, std::abs(z[i] - t[i]));
    best = std::min(best, d);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Local expansions

std::string to_string(Expansion e) {
  switch (e) {
    case Expansion::var1: return "var1";
    case Expansion::r1: return "r1";
    case Expansion::sigma21: return "sigma21";
    case Expansion::r2: return "r2";
    case Expansion::var3: return "var3";
  }
  return "unknown";
}

Expansion expansion_from_string(const std::string& name) {
  for (Expansion e : {Expansion::var1, Expansion::r1, Expansion::sigma21, Expansion::r2, Expansion::var3}) {
    if (to_string(e) == name) return e;
  }
  throw UsageError("unknown expansion '" + name + "' (expected var1, r1, sigma21, r2 or var3)");
}

std::vector<Expansion> applicable_expansions(const PerfTableSpec& spec) {
  if (spec.alpha() < 1.0) return {Expansion::var1, Expansion::r1};
  if (spec.alpha() == 1.0) return {Expansion::sigma21, Expansion::r2};
  return {Expansion::var3};
}

namespace {

void require_applicable(const PerfTableSpec& spec, Expansion e) {
  const auto ok = applicable_expansions(spec);
  if (std::find(ok.begin(), ok.end(), e) == ok.end()) {
    std::ostringstream os;
    os << "expansion " << to_string(e) << " does not apply for alpha = " << spec.alpha();
    throw UsageError(os.str());
  }
}

// Nearest corner z^(j), j in N, in sup norm.
std::size_t nearest_corner(const PerfTableSpec& spec, PointView t) {
  std::size_t best = spec.N().front();
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t j : spec.N()) {
    double d = 0.0;
    for (std::size_t i = 1; i <= spec.n(); ++i) d = std::max(d, std::abs(t[i - 1] - (i >= j ? 1.0 : 0.0)));
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

}  // namespace

double expansion_value(const PerfTableSpec& spec, Expansion e, PointView t, PointView s, std::size_t corner) {
  require_applicable(spec, e);
  require_simplex_point(t, spec.n());
  const double alpha = spec.alpha();
  const std::size_t n = spec.n();
  const auto pt = padded(t);
  switch (e) {
    case Expansion::var1: {
      const auto opt = perf_optimizer(spec);
      const auto pz = padded(opt.points.front());
      double total = 0.0;
      for (double w : spec.a()) total += std::pow(w, 2.0 / (1.0 - alpha));
      double acc = 0.0;
      for (std::size_t i = 1; i <= n + 1; ++i) {
        const double d = (pt[i] - pz[i]) - (pt[i - 1] - pz[i - 1]);
        acc += std::pow(spec.weight(i), 2.0 / (alpha - 1.0)) * d * d;
      }
      return alpha * (1.0 - alpha) * total / 4.0 * acc;
    }
    case Expansion::r1: {
      require_simplex_point(s, n);
      const double sigma = perf_optimizer(spec).sigma_star;
      double acc = 0.0;
      for (std::size_t i = 1; i <= n; ++i) {
        const double ai = spec.weight(i);
        const double an = spec.weight(i + 1);
        acc += (ai * ai + an * an) * pow_abs(s[i - 1] - t[i - 1], alpha);
      }
      return acc / (2.0 * sigma * sigma);
    }
    case Expansion::sigma21: {
      double acc = 0.0;
      for (std::size_t j : spec.Nc()) {
        const double w = spec.weight(j);
        acc += (1.0 - w * w) * std::abs(pt[j] - pt[j - 1]);
      }
      return 0.5 * acc;
    }
    case Expansion::r2: {
      require_simplex_point(s, n);
      const auto ps = padded(s);
      double acc = 0.0;
      for (std::size_t i = 1; i <= n + 1; ++i) {
        const double w = spec.weight(i);
        const double shift = std::abs(pt[i - 1] - ps[i - 1]) + std::abs(pt[i] - ps[i]);
        const double lengths = std::abs(pt[i] - pt[i - 1]) + std::abs(ps[i] - ps[i - 1]);
        acc += w * w * std::min(shift, lengths);
      }
      return 0.5 * acc;
    }
    case Expansion::var3: {
      const std::size_t j = corner == 0 ? nearest_corner(spec, t) : corner;
      if (!spec.in_N(j)) throw UsageError("var3 corner index must belong to N");
      double acc = 0.0;
      for (std::size_t i = 1; i <= n + 1; ++i) {
        if (i == j) continue;
        const double w = spec.weight(i);
        acc += w * w * pow_abs(pt[i] - pt[i - 1], alpha);
      }
      return 0.5 * (alpha * std::abs(pt[j] - pt[j - 1] - 1.0) - acc);
    }
  }
  return 0.0;
}

double expansion_exact(const PerfTableSpec& spec, Expansion e, PointView t, PointView s) {
  require_applicable(spec, e);
  switch (e) {
    case Expansion::var1:
    case Expansion::sigma21:
    case Expansion::var3: {
      const double star = perf_optimizer(spec, 1.0).sigma_star;
      const double v = perf_variance(spec, t);
      return (star * star - v) / (star * (star + std::sqrt(v)));
    }
    case Expansion::r1:
    case Expansion::r2:
      return perf_one_minus_corr(spec, s, t);
  }
  return 0.0;
}

namespace {

bool inside_simplex(const Point& t) {
  double prev = 0.0;
  for (double x : t) {
    if (x < prev) return false;
    prev = x;
  }
  return prev <= 1.0;
}

struct ProbeSampler {
  const PerfTableSpec& spec;
  double delta;
  std::mt19937_64 rng;

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

  // A random point of the optimizer set.
  Point center(const OptimizerReport& opt, std::size_t& corner) {
    corner = 0;
    if (opt.kind == OptimizerKind::unique_point) return opt.points.front();
    if (opt.kind == OptimizerKind::finite_point_set) {
      const std::size_t k = std::min(opt.points.size() - 1, static_cast<std::size_t>(unit() * opt.points.size()));
      corner = spec.N()[k];
      return opt.points[k];
    }
    // Uniform point of M: N increments from sorted uniforms, N^c increments zero.
    const std::size_t m = spec.m();
    std::vector<double> cuts(m - 1);
    for (double& c : cuts) c = unit();
    std::sort(cuts.begin(), cuts.end());
    std::vector<double> inc(spec.n() + 2, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
      const double lo = k == 0 ? 0.0 : cuts[k - 1];
      const double hi = k + 1 == m ? 1.0 : cuts[k];
      inc[spec.N()[k]] = hi - lo;
    }
    Point z(spec.n());
    double acc = 0.0;
    for (std::size_t i = 1; i <= spec.n(); ++i) {
      acc += inc[i];
      z[i - 1] = std::min(acc, 1.0);
    }
    return z;
  }

  // Uniform in the Euclidean delta-ball around z intersected with the simplex.
  Point near(const Point& z) {
    for (int attempt = 0; attempt < 1000000; ++attempt) {
      Point t(z.size());
      double r2 = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = (2.0 * unit() - 1.0) * delta;
        r2 += d * d;
        t[i] = z[i] + d;
      }
      if (r2 > delta * delta || r2 == 0.0) continue;
      if (inside_simplex(t)) return t;
    }
    throw UsageError("could not place expansion probes inside the simplex; delta too small");
  }
};

double relative_error(double approx, double exact) {
  if (exact == 0.0) return approx == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::abs(approx / exact - 1.0);
}

}  // namespace

std::map<Expansion, double> check_expansions(const PerfTableSpec& spec, double delta, std::size_t probe_count,
                                             std::uint64_t seed, std::vector<Expansion> which) {
  if (!(delta > 0.0)) throw UsageError("expansion check needs delta > 0");
  if (probe_count == 0) throw UsageError("expansion check needs at least one probe");
  if (which.empty()) which = applicable_expansions(spec);
  for (Expansion e : which) require_applicable(spec, e);

  const auto opt = perf_optimizer(spec, 1.0);
  std::map<Expansion, double> out;
  for (Expansion e : which) {
    ProbeSampler probes{spec, delta, std::mt19937_64(mix64(seed) ^ static_cast<std::uint64_t>(e))};
    const bool paired = e == Expansion::r1 || e == Expansion::r2;
    double worst = 0.0;
    for (std::size_t k = 0; k < probe_count; ++k) {
      std::size_t corner = 0;
      const Point z = probes.center(opt, corner);
      const Point t = probes.near(z);
      Point s;
      if (paired) {
        do {
          s = probes.near(z);
        } while (s == t);
      }
      const double approx = expansion_value(spec, e, t, s, corner);
      const double exact = expansion_exact(spec, e, t, s);
      worst = std::max(worst, relative_error(approx, exact));
    }
    out[e] = worst;
  }
  return out;
}

// ---------------------------------------------------------------------------
// alpha = 1 coordinates and the limiting field W

Point alpha1_transform(const PerfTableSpec& spec, PointView x) {
  for (double v : x) {
    if (!(v >= 0.0)) throw DomainError("alpha = 1 coordinates must be nonnegative");
  }
  const auto t = tt_map(spec, x);
  Point out(t.begin() + 1, t.end() - 1);
  double prev = 0.0;
  for (double v : out) {
    if (v < prev - kSimplexTol || v > 1.0 + kSimplexTol) {
      throw DomainError("coordinates lie outside the transformed simplex");
    }
    prev = v;
  }
  return out;
}

Point alpha1_inverse(const PerfTableSpec& spec, PointView t) {
  require_simplex_point(t, spec.n());
  const auto p = padded(t);
  Point x;
  x.reserve(spec.n());
  for (std::size_t i = 1; i <= spec.n() + 1; ++i) {
    if (i == spec.k_star()) continue;
    x.push_back(spec.in_N(i) ? p[i] : p[i] - p[i - 1]);
  }
  return x;
}

std::vector<double> w_coordinates(const PerfTableSpec& spec, PointView x) {
  for (double v : x) {
    if (!(v >= 0.0)) throw DomainError("W is indexed by nonnegative coordinates");
  }
  const std::size_t n = spec.n();
  const std::size_t ks = spec.k_star();
  const auto xf = full_x(spec, x);
  std::vector<double> s(n + 2, 0.0);
  for (std::size_t i = 1; i <= n + 1; ++i) {
    if (i >= ks) {
      double acc = 0.0;
      for (std::size_t j = i + 1; j <= n + 1; ++j) acc += xf[j];
      s[i] = acc;
    } else if (spec.in_N(i)) {
      s[i] = xf[i];
    } else {
      std::size_t from = 1;
      for (std::size_t k : spec.N()) {
        if (k < i) from = k;
      }
      double acc = 0.0;
      for (std::size_t j = from; j <= i; ++j) acc += xf[j];
      s[i] = acc;
    }
  }
  return s;
}

double w_increment_var(const PerfTableSpec& spec, PointView x, PointView y) {
  const auto sx = w_coordinates(spec, x);
  const auto sy = w_coordinates(spec, y);
  // Brownian covariance min(u, v) and the inclusion-exclusion rule for increments.
  auto inc_cov = [](double a1, double b1, double a2, double b2) {
    return std::min(b1, b2) - std::min(b1, a2) - std::min(a1, b2) + std::min(a1, a2);
  };
  double acc = 0.0;
  for (std::size_t i = 1; i <= spec.n() + 1; ++i) {
    if (spec.in_N(i)) {
      acc += 0.5 * (std::abs(sx[i] - sy[i]) + std::abs(sx[i - 1] - sy[i - 1]));
    } else {
      const double w = spec.weight(i);
      const double vx = std::abs(sx[i] - sx[i - 1]);
      const double vy = std::abs(sy[i] - sy[i - 1]);
      acc += 0.5 * w * w * (vx + vy - 2.0 * inc_cov(sx[i - 1], sx[i], sy[i - 1], sy[i]));
    }
  }
  return acc;
}

double yrr_min_form(const PerfTableSpec& spec, PointView x, PointView y) {
  const std::size_t n = spec.n();
  const std::size_t ks = spec.k_star();
  const auto tx = tt_map(spec, x);
  const auto ty = tt_map(spec, y);
  const auto xf = full_x(spec, x);
  const auto yf = full_x(spec, y);
  auto tail = [&](std::size_t from) {
    double acc = 0.0;
    for (std::size_t j = from; j <= n + 1; ++j) acc += xf[j] - yf[j];
    return acc;
  };
  double acc = 0.0;
  for (std::size_t i : spec.N()) {
    if (i < ks) acc += 0.5 * (std::abs(xf[i] - yf[i]) + std::abs(tx[i - 1] - ty[i - 1]));
  }
  acc += 0.5 * std::abs(tx[ks - 1] - ty[ks - 1]);
  acc += 0.5 * std::abs(tail(ks + 1));
  for (std::size_t i : spec.Nc()) {
    const double w2 = spec.weight(i) * spec.weight(i);
    if (i < ks) {
      acc += 0.5 * w2 * std::min(std::abs(tx[i - 1] - ty[i - 1]) + std::abs(tx[i] - ty[i]), xf[i] + yf[i]);
    } else {
      acc += 0.5 * w2 * std::min(std::abs(tail(i)) + std::abs(tail(i + 1)), xf[i] + yf[i]);
    }
  }
  return acc;
}

CovarianceKernel w_kernel(const PerfTableSpec& spec) {
  if (spec.alpha() != 1.0) throw UsageError("the field W is defined for alpha = 1 only");
  return CovarianceKernel("perf_w", spec.n(), [spec](PointView x, PointView y) {
    const Point zero(x.size(), 0.0);
    return 0.5 * (w_increment_var(spec, x, zero) + w_increment_var(spec, y, zero) - w_increment_var(spec, x, y));
  });
}

double hw_upper_bound(const PerfTableSpec& spec) {
  const double n = static_cast<double>(spec.n());
  double bound = std::pow(n, static_cast<double>(spec.m()) - 1.0);
  for (std::size_t i : spec.Nc()) {
    const double w = spec.weight(i);
    bound *= 1.0 + 2.0 * n / (1.0 - w * w);
  }
  return bound;
}

// ---------------------------------------------------------------------------
// Chi process

ChiSpec make_chi_spec(std::size_t n, double alpha, double a, double b, const std::string& y_name) {
  if (n == 0) throw ModelError("chi process needs n >= 1 components");
  if (!(alpha > 0.0 && alpha < 2.0)) throw ModelError("chi process alpha must lie in (0, 2)");
  if (!(a > 0.0) || !(b > 0.0)) throw ModelError("chi process needs a > 0 and b > 0");
  ChiSpec spec;
  spec.n = n;
  spec.alpha = alpha;
  spec.a = a;
  spec.b = b;
  spec.y_name = y_name;
  spec.y_kernel = self_similar_kernel(y_name, alpha);
  spec.gamma = alpha;
  spec.c_Y = y_name == "subfbm" ? 1.0 / (2.0 - std::pow(2.0, alpha - 1.0)) : 1.0;

  // Reject parameters for which 1 - a Var(Y(t) - Y(s)) leaves [-1, 1] on [0,1]^2.
  constexpr int cells = 64;
  double worst = 0.0;
  for (int i = 0; i <= cells; ++i) {
    for (int j = 0; j < i; ++j) {
      const double s = static_cast<double>(j) / cells;
      const double t = static_cast<double>(i) / cells;
      worst = std::max(worst, spec.y_kernel.eval(t, t) + spec.y_kernel.eval(s, s) - 2.0 * spec.y_kernel.eval(s, t));
    }
  }
  if (a * worst > 2.0) {
    std::ostringstream os;
    os << "chi correlation 1 - a Var(Y(t) - Y(s)) drops below -1 (a * max Var = " << a * worst << ")";
    throw ModelError(os.str());
  }
  return spec;
}

double chi_sigma(const ChiSpec& spec, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("chi time must lie in [0, 1]");
  return 1.0 / (1.0 + spec.b * std::pow(t, spec.alpha));
}

double chi_corr(const ChiSpec& spec, double s, double t) {
  const auto& k = spec.y_kernel;
  const double var = k.eval(t, t) + k.eval(s, s) - 2.0 * k.eval(s, t);
  const double r = 1.0 - spec.a * var;
  if (r < -1.0 - 1e-12 || r > 1.0 + 1e-12) throw ModelError("chi correlation outside [-1, 1]");
  return std::clamp(r, -1.0, 1.0);
}

CovarianceKernel chi_x_kernel(const ChiSpec& spec) {
  return CovarianceKernel("chi_x", 1, [spec](PointView s, PointView t) {
    return chi_sigma(spec, s[0]) * chi_sigma(spec, t[0]) * chi_corr(spec, s[0], t[0]);
  });
}

Point spherical_map(PointView theta) {
  const std::size_t n = theta.size() + 1;
  for (std::size_t i = 0; i < theta.size(); ++i) {
    const bool last = i + 1 == theta.size();
    const double hi = last ? 2.0 * std::numbers::pi : std::numbers::pi;
    if (!(theta[i] >= 0.0) || (last ? !(theta[i] < hi) : !(theta[i] <= hi))) {
      throw DomainError("spherical angle " + std::to_string(i + 1) + " out of range");
    }
  }
  Point v(n);
  double prod = 1.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    v[i] = prod * std::cos(theta[i]);
    prod *= std::sin(theta[i]);
  }
  v[n - 1] = prod;
  return v;
}

double chi_cov(const ChiSpec& spec, PointView p, PointView q) {
  if (p.size() != spec.n || q.size() != spec.n) {
    throw DomainError("chi field points are (theta_1..theta_{n-1}, t)");
  }
  const double t1 = p.back();
  const double t2 = q.back();
  const auto v1 = spherical_map(p.first(spec.n - 1));
  const auto v2 = spherical_map(q.first(spec.n - 1));
  double dot = 0.0;
  for (std::size_t i = 0; i < spec.n; ++i) dot += v1[i] * v2[i];
  return chi_sigma(spec, t1) * chi_sigma(spec, t2) * chi_corr(spec, t1, t2) * dot;
}

namespace {

void require_time_grid(const GridSpec& g) {
  if (g.dimension() != 1) throw UsageError("chi time grid must be one-dimensional");
  for (const auto& p : g.points()) {
    if (!(p[0] >= 0.0 && p[0] <= 1.0)) throw DomainError("chi time grid must lie in [0, 1]");
  }
}

// fn(rep, block, column offset) for every replication; the n components of a
// replication are consecutive columns of the block.
template <class Fn>
void for_each_chi_rep(const ChiSpec& spec, const GridSpec& time_grid, std::size_t n_reps, std::uint64_t seed,
                      const Exec& exec, Fn&& fn) {
  const GaussianSampler sampler(chi_x_kernel(spec), time_grid);
  sampler.for_each_block(
      n_reps, seed, exec,
      [&](std::size_t first, std::size_t count, const Eigen::MatrixXd& block) {
        for (std::size_t r = 0; r < count; ++r) fn(first + r, block, static_cast<Eigen::Index>(r * spec.n));
      },
      spec.n);
}

}  // namespace

std::vector<double> chi_sup_sample(const ChiSpec& spec, const GridSpec& time_grid, std::size_t n_reps,
                                   std::uint64_t seed, const Exec& exec) {
  require_time_grid(time_grid);
  std::vector<double> out(n_reps);
  for_each_chi_rep(spec, time_grid, n_reps, seed, exec,
                   [&](std::size_t rep, const Eigen::MatrixXd& block, Eigen::Index col) {
                     const auto norms = block.middleCols(col, static_cast<Eigen::Index>(spec.n)).rowwise().norm();
                     out[rep] = norms.maxCoeff();
                   });
  return out;
}

std::vector<std::pair<double, double>> chi_sphere_pairs(const ChiSpec& spec, const GridSpec& grid, std::size_t n_reps,
                                                        std::uint64_t seed, const Exec& exec) {
  if (grid.kind() != GridKind::sphere_time || grid.dimension() != spec.n) {
    throw UsageError("chi sphere comparison needs a sphere x time grid with n - 1 angles");
  }
  std::vector<double> times;
  for (const auto& p : grid.points()) times.push_back(p.back());
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());
  std::vector<Point> tp;
  for (double t : times) tp.push_back({t});
  const auto time_grid = GridSpec::from_points(GridKind::interval, tp, {grid.mesh().back()},
                                               {{times.front(), times.back()}});
  require_time_grid(time_grid);

  // Unit vectors and time index for each sphere x time point.
  const auto n = static_cast<Eigen::Index>(spec.n);
  Eigen::MatrixXd v(n, static_cast<Eigen::Index>(grid.size()));
  std::vector<Eigen::Index> tindex(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const auto& p = grid.point(k);
    const auto u = spherical_map(PointView(p).first(spec.n - 1));
    for (Eigen::Index i = 0; i < n; ++i) v(i, static_cast<Eigen::Index>(k)) = u[static_cast<std::size_t>(i)];
    tindex[k] = std::lower_bound(times.begin(), times.end(), p.back()) - times.begin();
  }

  std::vector<std::pair<double, double>> out(n_reps);
  for_each_chi_rep(spec, time_grid, n_reps, seed, exec,
                   [&](std::size_t rep, const Eigen::MatrixXd& block, Eigen::Index col) {
                     const auto x = block.middleCols(col, n);
                     const double chi = x.rowwise().norm().maxCoeff();
                     double z = -std::numeric_limits<double>::infinity();
                     for (std::size_t k = 0; k < grid.size(); ++k) {
                       z = std::max(z, x.row(tindex[k]).dot(v.col(static_cast<Eigen::Index>(k))));
                     }
                     out[rep] = {chi, z};
                   });
  return out;
}

// ---------------------------------------------------------------------------

std::string FieldModel::name() const {
  if (std::holds_alternative<PerfTableSpec>(v_)) return "perf_table";
  if (std::holds_alternative<ChiSpec>(v_)) return "chi";
  return std::get<CustomModel>(v_).name;
}

OptimizerReport FieldModel::optimizer() const {
  if (const auto* p = std::get_if<PerfTableSpec>(&v_)) return perf_optimizer(*p);
  if (std::holds_alternative<ChiSpec>(v_)) {
    OptimizerReport r;
    r.points = {{0.0}};
    return r;
  }
  const auto& c = std::get<CustomModel>(v_);
  OptimizerReport r;
  r.kind = c.optimizer_points.size() == 1 ? OptimizerKind::unique_point : OptimizerKind::finite_point_set;
  r.points = c.optimizer_points;
  r.m = c.optimizer_points.size();
  double top = 0.0;
  for (const auto& z : c.optimizer_points) top = std::max(top, c.kernel(z, z));
  r.sigma_star = std::sqrt(top);
  return r;
}

double FieldModel::coverage_distance(const GridSpec& grid) const {
  if (const auto* p = std::get_if<PerfTableSpec>(&v_)) {
    if (grid.dimension() != p->n()) throw UsageError("grid dimension does not match the performance table");
    const auto opt = perf_optimizer(*p, 1.0);
    if (opt.kind == OptimizerKind::positive_measure_set) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& t : grid.points()) best = std::min(best, optimizer_distance(*p, opt, t));
      return best;
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& z : opt.points) best = std::min(best, grid.distance_to(z));
    return best;
  }
  double best = std::numeric_limits<double>::infinity();
  for (const auto& z : optimizer().points) best = std::min(best, grid.distance_to(z));
  return best;
}

std::vector<double> FieldModel::sup_samples(const GridSpec& grid, std::size_t n_reps, std::uint64_t seed,
                                            const Exec& exec) const {
  return nested_sup_samples(grid, {}, n_reps, seed, exec).front();
}

std::vector<std::vector<double>> FieldModel::nested_sup_samples(const GridSpec& fine, const std::vector<GridSpec>& subs,
                                                                std::size_t n_reps, std::uint64_t seed,
                                                                const Exec& exec) const {
  std::vector<std::vector<Eigen::Index>> idx(1);
  for (std::size_t k = 0; k < fine.size(); ++k) idx[0].push_back(static_cast<Eigen::Index>(k));
  for (const auto& g : subs) {
    std::vector<Eigen::Index> ix;
    for (std::size_t k : fine.indices_of(g)) ix.push_back(static_cast<Eigen::Index>(k));
    idx.push_back(std::move(ix));
  }
  std::vector<std::vector<double>> out(idx.size(), std::vector<double>(n_reps));

  if (const auto* chi = std::get_if<ChiSpec>(&v_)) {
    require_time_grid(fine);
    for_each_chi_rep(*chi, fine, n_reps, seed, exec,
                     [&](std::size_t rep, const Eigen::MatrixXd& block, Eigen::Index col) {
                       const Eigen::VectorXd norms =
                           block.middleCols(col, static_cast<Eigen::Index>(chi->n)).rowwise().norm();
                       for (std::size_t g = 0; g < idx.size(); ++g) {
                         double best = -std::numeric_limits<double>::infinity();
                         for (Eigen::Index k : idx[g]) best = std::max(best, norms(k));
                         out[g][rep] = best;
                       }
                     });
    return out;
  }

  const CovarianceKernel kernel = std::holds_alternative<PerfTableSpec>(v_)
                                      ? perf_kernel(std::get<PerfTableSpec>(v_))
                                      : std::get<CustomModel>(v_).kernel;
  const GaussianSampler sampler(kernel, fine);
  sampler.for_each_block(n_reps, seed, exec, [&](std::size_t first, std::size_t count, const Eigen::MatrixXd& block) {
    for (std::size_t r = 0; r < count; ++r) {
      const auto col = block.col(static_cast<Eigen::Index>(r));
      for (std::size_t g = 0; g < idx.size(); ++g) {
        double best = -std::numeric_limits<double>::infinity();
        if (g == 0) {
          best = col.maxCoeff();
        } else {
          for (Eigen::Index k : idx[g]) best = std::max(best, col(k));
        }
        out[g][first + r] = best;
      }
    }
  });
  return out;
}

}  // namespace gaussex
