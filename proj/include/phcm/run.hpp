#pragma once

/**
 * Config-driven analyses. A run configuration is a single JSON object:
 *
 *   {
 *     "system":  {"name": "<zoo name>", "parameters": {...}},
 *     "analysis": "chain" | "dichotomy" | "hyperbolicity" | "homoclinic" | "twist",
 *     "epsilon_schedule": [eps0, eps1, ...],   // optional
 *     "options": {...},                          // optional, per analysis
 *     "output_dir": "path"                       // optional
 *   }
 *
 * Unknown keys are rejected at every level.
 */

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

namespace phcm {

struct RunConfig
{
	std::string system;
	nlohmann::json parameters = nlohmann::json::object();
	std::string analysis;
	std::vector<double> schedule; // empty: analysis default
	nlohmann::json options = nlohmann::json::object();
	std::filesystem::path output_dir = "phcm_out";

	// Throws ConfigError naming the offending key.
	static RunConfig parse(const nlohmann::json& j);
	nlohmann::json to_json() const;
};

// Analysis names accepted in "analysis".
std::vector<std::string> analysis_names();

struct RunResult
{
	int exit_code = 0; // 0 success, 2 analysis error
	nlohmann::json report;
};

// Runs the analysis, writes report.json and data files into output_dir.
// Config problems found while resolving the system or options throw
// ConfigError.
RunResult run_analysis(const RunConfig& config);

// Reads a config file, runs it and maps failures to exit codes
// (1 config error, 2 analysis error).
int run_config_file(const std::filesystem::path& path, std::ostream& out, std::ostream& err);

struct ReportDiff
{
	bool identical = true;
	std::vector<std::string> differences; // JSON pointers
};

// Compares two reports ignoring the timestamp field.
ReportDiff diff_reports(const nlohmann::json& a, const nlohmann::json& b);

} // namespace phcm
