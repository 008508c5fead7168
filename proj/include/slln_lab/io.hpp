#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "slln_lab/conditions.hpp"
#include "slln_lab/estimators.hpp"
#include "slln_lab/evt_process.hpp"

namespace slln {

using json = nlohmann::json;

/// Shortest representation that parses back to the same double; "inf", "-inf", "nan".
std::string format_double(double x);
double parse_double(std::string_view s);  // throws ParameterError

/// Finite values as JSON numbers, others as the strings above.
json number_to_json(double x);
double number_from_json(const json& j);

std::string read_file(const std::string& path);  // throws IoError
/// Writes to a temporary file next to `path`, then renames. Throws IoError.
void write_file_atomic(const std::string& path, const std::string& content);
/// Throws IoError unless a file can be created in the directory of `path`.
void ensure_writable(const std::string& path);

/// Splits one CSV line on commas (no quoting).
std::vector<std::string> split_csv_line(const std::string& line);

json to_json(const WkPath& path);
WkPath wk_path_from_json(const json& j);
/// seed,scale,k,value (one row per k)
std::string to_csv(const WkPath& path);
WkPath wk_path_from_csv(const std::string& text);

json to_json(const ConditionReport& report);
ConditionReport condition_report_from_json(const json& j);
/// condition_id,criterion,index,value. Loading recomputes the summary fields
/// with the default VerdictRule; parameters and model label live in the JSON form.
std::string to_csv(const std::vector<ConditionReport>& reports);
std::vector<ConditionReport> condition_reports_from_csv(const std::string& text);

json to_json(const std::vector<HillEstimate>& sweep);
std::vector<HillEstimate> hill_sweep_from_json(const json& j);
/// n,k,weight,statistic,ratio (ratio empty when no endpoint was given)
std::string to_csv(const std::vector<HillEstimate>& sweep);
std::vector<HillEstimate> hill_sweep_from_csv(const std::string& text);

json to_json(const MaxVarProbe& probe);
json to_json(const Sigma2Result& result);
json to_json(const MuLimit& limit);

}  // namespace slln
