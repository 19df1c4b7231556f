#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "gaussex/constants.hpp"
#include "gaussex/harness.hpp"

namespace gaussex {

nlohmann::json to_json(const ConstantEstimate& e);
ConstantEstimate constant_from_json(const nlohmann::json& j);

nlohmann::json to_json(const AsymptoticFormula& f);
AsymptoticFormula formula_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);

/// Pretty-printed JSON; load_record(path) reproduces the record exactly.
void store_record(const ResultRecord& record, const std::string& path);
ResultRecord load_record(const std::string& path);

/// Flat table with columns u,p_hat,ci_lo,ci_hi,asymptotic,ratio.
std::string ratio_csv(const ResultRecord& record);

/// Writes text to a file, throwing UsageError when the file cannot be opened.
void write_text(const std::string& path, const std::string& text);

/// Current UTC time as ISO 8601.
std::string utc_timestamp();

}  // namespace gaussex
