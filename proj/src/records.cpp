#include "gaussex/records.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "gaussex/error.hpp"

namespace gaussex {

using nlohmann::json;

json to_json(const ConstantEstimate& e) {
  return {{"kind", to_string(e.kind)},
          {"value", e.value},
          {"stderr", e.std_error},
          {"lambda", e.lambda},
          {"mesh", e.mesh},
          {"n_reps", e.n_reps},
          {"extrapolated", e.extrapolated},
          {"alpha", e.alpha},
          {"drift", e.drift},
          {"lambda_power", e.lambda_power},
          {"truncation_sensitivity", e.truncation_sensitivity},
          {"seed", e.seed}};
}

ConstantEstimate constant_from_json(const json& j) {
  ConstantEstimate e;
  e.kind = constant_kind_from_string(j.at("kind").get<std::string>());
  e.value = j.at("value").get<double>();
  e.std_error = j.at("stderr").get<double>();
  e.lambda = j.at("lambda").get<double>();
  e.mesh = j.at("mesh").get<double>();
  e.n_reps = j.at("n_reps").get<std::size_t>();
  e.extrapolated = j.at("extrapolated").get<bool>();
  e.alpha = j.at("alpha").get<double>();
  e.drift = j.at("drift").get<double>();
  e.lambda_power = j.at("lambda_power").get<double>();
  e.truncation_sensitivity = j.at("truncation_sensitivity").get<double>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

json to_json(const AsymptoticFormula& f) {
  json factors = json::array();
  for (const auto& [name, value] : f.factors) factors.push_back({{"name", name}, {"value", value}});
  return {{"constant_C", f.constant_C},
          {"u_exponent", f.u_exponent},
          {"sigma_star", f.sigma_star},
          {"description", f.description},
          {"factors", factors}};
}

AsymptoticFormula formula_from_json(const json& j) {
  AsymptoticFormula f;
  f.constant_C = j.at("constant_C").get<double>();
  f.u_exponent = j.at("u_exponent").get<double>();
  f.sigma_star = j.at("sigma_star").get<double>();
  f.description = j.at("description").get<std::string>();
  for (const auto& x : j.at("factors")) f.factors.emplace_back(x.at("name").get<std::string>(), x.at("value").get<double>());
  return f;
}

json to_json(const ResultRecord& r) {
  json refinement = json::array();
  for (const auto& l : r.refinement) {
    refinement.push_back({{"level", l.level}, {"mesh", l.mesh}, {"radius", l.radius}, {"added", l.added}});
  }
  json constants = json::array();
  for (const auto& c : r.constants) constants.push_back(to_json(c));
  json rows = json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"u", row.u},
                    {"p_hat", row.p_hat},
                    {"ci_lo", row.ci_lo},
                    {"ci_hi", row.ci_hi},
                    {"asymptotic", row.asymptotic},
                    {"ratio", row.ratio},
                    {"ratio_lo", row.ratio_lo},
                    {"ratio_hi", row.ratio_hi},
                    {"mismatch", row.mismatch}});
  }
  return {{"config_hash", r.config_hash},
          {"timestamp", r.timestamp},
          {"software_version", r.software_version},
          {"model", r.model},
          {"grid", r.grid},
          {"refinement", refinement},
          {"n_reps", r.n_reps},
          {"seed", r.seed},
          {"formula", to_json(r.formula)},
          {"constants", constants},
          {"rows", rows},
          {"warnings", r.warnings}};
}

ResultRecord record_from_json(const json& j) {
  ResultRecord r;
  r.config_hash = j.at("config_hash").get<std::string>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.software_version = j.at("software_version").get<std::string>();
  r.model = j.at("model").get<std::string>();
  r.grid = j.at("grid").get<std::string>();
  for (const auto& l : j.at("refinement")) {
    r.refinement.push_back({l.at("level").get<int>(), l.at("mesh").get<double>(), l.at("radius").get<double>(),
                            l.at("added").get<std::size_t>()});
  }
  r.n_reps = j.at("n_reps").get<std::size_t>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.formula = formula_from_json(j.at("formula"));
  for (const auto& c : j.at("constants")) r.constants.push_back(constant_from_json(c));
  for (const auto& x : j.at("rows")) {
    RatioRow row;
    row.u = x.at("u").get<double>();
    row.p_hat = x.at("p_hat").get<double>();
    row.ci_lo = x.at("ci_lo").get<double>();
    row.ci_hi = x.at("ci_hi").get<double>();
    row.asymptotic = x.at("asymptotic").get<double>();
    row.ratio = x.at("ratio").get<double>();
    row.ratio_lo = x.at("ratio_lo").get<double>();
    row.ratio_hi = x.at("ratio_hi").get<double>();
    row.mismatch = x.at("mismatch").get<bool>();
    r.rows.push_back(row);
  }
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  return r;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << text;
  if (!out) throw UsageError("failed writing '" + path + "'");
}

void store_record(const ResultRecord& record, const std::string& path) {
  write_text(path, to_json(record).dump(2) + "\n");
}

ResultRecord load_record(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open record '" + path + "'");
  try {
    return record_from_json(json::parse(in));
  } catch (const json::exception& e) {
    throw ParseError(0, path, e.what());
  }
}

std::string ratio_csv(const ResultRecord& record) {
  std::string out = "u,p_hat,ci_lo,ci_hi,asymptotic,ratio\n";
  char buf[256];
  for (const auto& r : record.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.u, r.p_hat, r.ci_lo, r.ci_hi,
                  r.asymptotic, r.ratio);
    out += buf;
  }
  return out;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace gaussex
