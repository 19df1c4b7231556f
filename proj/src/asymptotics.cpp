#include "gaussex/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "gaussex/error.hpp"

namespace gaussex {

double psi(double u) { return 0.5 * std::erfc(u / std::numbers::sqrt2); }

double gamma_fn(double x) {
  if (!(x > 0.0)) throw DomainError("gamma_fn needs x > 0");
  return std::tgamma(x);
}

double AsymptoticFormula::evaluate(double u) const {
  return constant_C * std::pow(u, u_exponent) * psi(u / sigma_star);
}

double AsymptoticFormula::log_evaluate(double u) const {
  return std::log(constant_C) + u_exponent * std::log(u) + std::log(psi(u / sigma_star));
}

void LambdaPartition::validate() const {
  const std::size_t n = alpha.size();
  if (n == 0) throw ModelError("partition needs at least one coordinate");
  if (beta.size() != n || a.size() != n || b.size() != n) {
    throw ModelError("partition vectors alpha, beta, a, b must all have length n");
  }
  std::set<std::size_t> seen;
  for (const auto* set : {&lambda0, &lambda1, &lambda2, &lambda3}) {
    for (std::size_t i : *set) {
      if (i < 1 || i > n) throw ModelError("partition index " + std::to_string(i) + " out of range");
      if (!seen.insert(i).second) throw ModelError("partition index " + std::to_string(i) + " appears twice");
    }
  }
  if (seen.size() != n) throw ModelError("partition does not cover every coordinate");
  for (std::size_t i = 1; i <= n; ++i) {
    if (!(alpha[i - 1] > 0.0 && alpha[i - 1] <= 2.0)) throw ModelError("alpha_i must lie in (0, 2]");
  }
  auto check = [&](const std::vector<std::size_t>& set, auto pred, const char* rule) {
    for (std::size_t i : set) {
      if (!(beta[i - 1] > 0.0) || !pred(alpha[i - 1], beta[i - 1])) {
        throw ModelError("coordinate " + std::to_string(i) + " violates " + rule);
      }
    }
  };
  check(lambda1, [](double al, double be) { return al < be; }, "alpha < beta on Lambda_1");
  check(lambda2, [](double al, double be) { return al == be; }, "alpha = beta on Lambda_2");
  check(lambda3, [](double al, double be) { return al > be; }, "alpha > beta on Lambda_3");
  if (!(vol_M > 0.0)) throw ModelError("vol_M must be positive");
}

AsymptoticFormula prop1_formula(const LambdaPartition& p, const std::map<std::size_t, ConstantEstimate>& piterbarg,
                                const std::map<std::size_t, ConstantEstimate>& pickands) {
  p.validate();
  AsymptoticFormula f;
  f.sigma_star = 1.0;
  double c = p.vol_M;
  double exponent = 0.0;
  f.factors.emplace_back("vol_M", p.vol_M);

  std::vector<std::size_t> h_set = p.lambda0;
  h_set.insert(h_set.end(), p.lambda1.begin(), p.lambda1.end());
  std::sort(h_set.begin(), h_set.end());
  for (std::size_t i : h_set) {
    const auto it = pickands.find(i);
    if (it == pickands.end()) throw UsageError("missing Pickands constant for coordinate " + std::to_string(i));
    const double ai = p.a[i - 1];
    c *= ai * it->second.value;
    exponent += 2.0 / p.alpha[i - 1];
    f.factors.emplace_back("a_" + std::to_string(i), ai);
    f.factors.emplace_back("H_" + std::to_string(i), it->second.value);
  }
  for (std::size_t i : p.lambda1) {
    const double be = p.beta[i - 1];
    const double g = std::pow(p.b[i - 1], -1.0 / be) * gamma_fn(1.0 / be + 1.0);
    c *= g;
    exponent -= 2.0 / be;
    f.factors.emplace_back("b^(-1/beta) Gamma(1/beta+1)_" + std::to_string(i), g);
  }
  for (std::size_t i : p.lambda2) {
    const auto it = piterbarg.find(i);
    if (it == piterbarg.end()) throw UsageError("missing Piterbarg constant for coordinate " + std::to_string(i));
    const double want = std::pow(p.a[i - 1], -p.beta[i - 1]) * p.b[i - 1];
    if (std::abs(it->second.drift - want) > 1e-9 * std::max(1.0, want)) {
      std::ostringstream os;
      os << "Piterbarg constant for coordinate " << i << " has drift " << it->second.drift << ", expected " << want;
      throw UsageError(os.str());
    }
    c *= it->second.value;
    f.factors.emplace_back("P_" + std::to_string(i), it->second.value);
  }
  f.constant_C = c;
  f.u_exponent = exponent;
  f.description = "product-form constant";
  return f;
}

AsymptoticFormula perf_table_formula(const PerfTableSpec& spec, const std::optional<ConstantEstimate>& hw,
                                     const std::optional<ConstantEstimate>& pickands,
                                     std::optional<PerfRegime> regime) {
  const double alpha = spec.alpha();
  if (!regime) {
    if (std::abs(alpha - 1.0) <= 1e-9 && alpha != 1.0) {
      throw UsageError("alpha is within 1e-9 of 1; choose the regime explicitly");
    }
    regime = alpha < 1.0 ? PerfRegime::below_one : alpha == 1.0 ? PerfRegime::one : PerfRegime::above_one;
  }
  const std::size_t n = spec.n();
  const auto m = static_cast<double>(spec.m());
  AsymptoticFormula f;
  std::ostringstream desc;

  switch (*regime) {
    case PerfRegime::above_one: {
      f.constant_C = m;
      f.u_exponent = 0.0;
      f.sigma_star = 1.0;
      f.factors.emplace_back("m", m);
      desc << "m Psi(u), m = " << spec.m();
      break;
    }
    case PerfRegime::one: {
      double h = 1.0;
      if (spec.m() == n + 1) {
        if (hw) h = hw->value;
      } else {
        if (!hw) throw UsageError("alpha = 1 with m < n + 1 needs an H_W estimate");
        h = hw->value;
      }
      const double fact = std::tgamma(m);
      f.constant_C = h / fact;
      f.u_exponent = 2.0 * (m - 1.0);
      f.sigma_star = 1.0;
      f.factors.emplace_back("1/(m-1)!", 1.0 / fact);
      f.factors.emplace_back("H_W", h);
      desc << "(1/(m-1)!) H_W u^(2(m-1)) Psi(u), m = " << spec.m();
      break;
    }
    case PerfRegime::below_one: {
      if (!(alpha < 1.0)) throw UsageError("the alpha < 1 regime needs alpha < 1");
      double h = 0.0;
      if (pickands) {
        h = pickands->value;
      } else if (auto known = lookup_known(ConstantKind::pickands, alpha)) {
        h = *known;
      } else {
        throw UsageError("alpha < 1 needs a Pickands constant estimate for H_{B^alpha}");
      }
      const auto dn = static_cast<double>(n);
      const auto& a = spec.a();
      double total = 0.0;
      for (double w : a) total += std::pow(w, 2.0 / (1.0 - alpha));
      const double sigma = std::pow(total, (1.0 - alpha) / 2.0);

      const double f_h = std::pow(h, dn);
      double f_prod = 1.0;
      for (std::size_t i = 0; i < n; ++i) f_prod *= std::pow(a[i] * a[i] + a[i + 1] * a[i + 1], 1.0 / alpha);
      const double f_two = std::pow(2.0, (1.0 - 1.0 / alpha) * dn);
      const double f_pi = std::pow(std::numbers::pi / (alpha * (1.0 - alpha)), dn / 2.0);
      const double f_sigma = std::pow(sigma, -(alpha - 2.0) * (alpha - 2.0) * dn / ((1.0 - alpha) * alpha));
      double wsum = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        double prod = 1.0;
        for (std::size_t i = 0; i <= n; ++i) {
          if (i != j) prod *= std::pow(a[i], 2.0 / (alpha - 1.0));
        }
        wsum += prod;
      }
      const double f_w = std::pow(wsum, -0.5);

      f.constant_C = f_h * f_prod * f_two * f_pi * f_sigma * f_w;
      f.u_exponent = (2.0 / alpha - 1.0) * dn;
      f.sigma_star = sigma;
      f.factors = {{"H^n", f_h},           {"prod (a_i^2 + a_{i+1}^2)^(1/alpha)", f_prod},
                   {"2^((1-1/alpha)n)", f_two}, {"(pi/(alpha(1-alpha)))^(n/2)", f_pi},
                   {"sigma*^power", f_sigma}, {"(sum_j prod_{i!=j} a_i^(2/(alpha-1)))^(-1/2)", f_w}};
      desc << "C u^((2/alpha-1)n) Psi(u/sigma*)";
      break;
    }
  }
  f.description = desc.str();
  return f;
}

AsymptoticFormula chi_formula(const ChiSpec& spec, const ConstantEstimate& p_est) {
  if (p_est.kind != ConstantKind::piterbarg && p_est.kind != ConstantKind::generalized_piterbarg) {
    throw UsageError("chi formula needs a Piterbarg-type constant");
  }
  const double want = spec.b / spec.a;
  if (std::abs(p_est.drift - want) > 1e-9 * std::max(1.0, want)) {
    std::ostringstream os;
    os << "chi formula needs drift b/a = " << want << ", got " << p_est.drift;
    throw UsageError(os.str());
  }
  const double dn = static_cast<double>(spec.n);
  const double pre = std::pow(2.0, (3.0 - dn) / 2.0) * std::sqrt(std::numbers::pi) / gamma_fn(dn / 2.0);
  AsymptoticFormula f;
  f.constant_C = pre * p_est.value;
  f.u_exponent = dn - 1.0;
  f.sigma_star = 1.0;
  f.factors = {{"2^((3-n)/2) sqrt(pi) / Gamma(n/2)", pre}, {"P_Y^(b/a)", p_est.value}};
  f.description = "chi: C u^(n-1) Psi(u)";
  return f;
}

}  // namespace gaussex
