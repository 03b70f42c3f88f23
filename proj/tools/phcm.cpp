// Command-line entry point: zoo catalog, config-driven runs, report diffs.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "phcm/error.hpp"
#include "phcm/run.hpp"
#include "phcm/zoo.hpp"

namespace {

int zoo_list()
{
	for (const auto& name : phcm::zoo_catalog()) {
		const auto entry = phcm::make_zoo(name);
		std::cout << name << "  " << entry.description << "  " << entry.parameters.dump() << '\n';
	}
	return 0;
}

int zoo_check(const std::string& name)
{
	const auto entry = phcm::make_zoo(name);
	bool ok = true;
	for (const auto& r : phcm::verify_facts(entry)) {
		std::cout << (r.check.passed ? "PASS" : "FAIL") << "  [" << phcm::fact_basis_name(r.basis) << "] "
		          << r.statement << "  (" << r.check.detail << ")\n";
		ok = ok && r.check.passed;
	}
	return ok ? 0 : 2;
}

nlohmann::json load(const std::string& path)
{
	std::ifstream in(path);
	if (!in)
		throw phcm::ConfigError("cannot open " + path);
	try {
		return nlohmann::json::parse(in);
	} catch (const nlohmann::json::parse_error& ex) {
		throw phcm::ConfigError(path + ": invalid JSON: " + ex.what());
	}
}

} // namespace

int main(int argc, char** argv)
{
	CLI::App app{"Pseudo-orbit chain recurrence, central models and partially hyperbolic diagnostics"};
	app.require_subcommand(1);

	auto* zoo = app.add_subcommand("zoo", "Example systems");
	zoo->require_subcommand(1);
	zoo->add_subcommand("list", "List the catalog with default parameters");
	std::string check_name;
	auto* check = zoo->add_subcommand("check", "Re-verify the documented facts of one system");
	check->add_option("name", check_name, "System name")->required();

	std::string config_path;
	auto* run = app.add_subcommand("run", "Run an analysis from a JSON config");
	run->add_option("config", config_path, "Config file")->required();

	auto* report = app.add_subcommand("report", "Report utilities");
	report->require_subcommand(1);
	std::string diff_a, diff_b;
	auto* diff = report->add_subcommand("diff", "Compare two reports, ignoring the timestamp");
	diff->add_option("a", diff_a)->required();
	diff->add_option("b", diff_b)->required();

	try {
		app.parse(argc, argv);
	} catch (const CLI::ParseError& e) {
		return app.exit(e);
	}

	try {
		if (zoo->got_subcommand("list"))
			return zoo_list();
		if (*check)
			return zoo_check(check_name);
		if (*run)
			return phcm::run_config_file(config_path, std::cout, std::cerr);
		if (*diff) {
			const auto d = phcm::diff_reports(load(diff_a), load(diff_b));
			if (d.identical) {
				std::cout << "identical\n";
				return 0;
			}
			for (const auto& path : d.differences)
				std::cout << "differs: " << path << '\n';
			return 1;
		}
	} catch (const phcm::ConfigError& e) {
		std::cerr << "config error: " << e.what() << '\n';
		return 1;
	} catch (const std::exception& e) {
		std::cerr << "error: " << e.what() << '\n';
		return 2;
	}
	return 0;
}
