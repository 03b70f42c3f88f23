#include "phcm/run.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "phcm/central_model.hpp"
#include "phcm/chain.hpp"
#include "phcm/error.hpp"
#include "phcm/geometry.hpp"
#include "phcm/zoo.hpp"

namespace phcm {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::map<std::string, json>& option_defaults()
{
	static const std::map<std::string, json> table{
	    {"chain", {{"write_edges", true}}},
	    {"dichotomy", {{"neighborhood_bound", 0.0}}},
	    {"hyperbolicity", {{"iterates", 1}}},
	    {"homoclinic",
	     {{"budget", 30.0},
	      {"mesh", 1e-3},
	      {"angle_tolerance", 1e-3},
	      {"orbit", 0},
	      {"relations", false},
	      {"write_polylines", true}}},
	    {"twist", {{"epsilon", 0.0}}},
	};
	return table;
}

json resolve_options(const std::string& analysis, const json& given)
{
	json out = option_defaults().at(analysis);
	for (const auto& [key, value] : given.items()) {
		if (!out.contains(key))
			throw ConfigError("unknown option '" + key + "' for analysis '" + analysis + "'");
		const bool want_bool = out[key].is_boolean();
		if (want_bool ? !value.is_boolean() : !value.is_number())
			throw ConfigError("option '" + key + "' must be a " + (want_bool ? "boolean" : "number"));
		out[key] = value;
	}
	return out;
}

std::string timestamp()
{
	const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
	std::tm tm{};
	gmtime_r(&now, &tm);
	std::ostringstream out;
	out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
	return out.str();
}

template<typename Writer>
void write_file(const fs::path& path, Writer&& writer)
{
	std::ofstream out(path);
	if (!out)
		throw Error("cannot write " + path.string());
	writer(out);
	if (!out)
		throw Error("failed writing " + path.string());
}

json point_json(const Vec& p)
{
	return std::vector<double>(p.data(), p.data() + p.size());
}

std::vector<double> require_schedule(const RunConfig& config, std::vector<double> fallback)
{
	return config.schedule.empty() ? std::move(fallback) : config.schedule;
}

void reject_schedule(const RunConfig& config)
{
	if (!config.schedule.empty())
		throw ConfigError("epsilon_schedule is not used by analysis '" + config.analysis + "'");
}

// ---------------------------------------------------------------------------

json chain_analysis(const ZooEntry& entry, RunConfig& config, const fs::path& dir)
{
	if (!entry.net || !entry.system)
		throw ConfigError("system '" + entry.name + "' has no sampled phase space for a chain analysis");
	const SampledSpace& net = *entry.net;
	const double spacing = net.min_spacing();
	config.schedule = require_schedule(config, geometric_schedule(16.0 * spacing, 2.0 * spacing));
	const PointMap f = entry.point_map();

	std::vector<NodeId> anchors;
	for (const auto& orbit : entry.orbits)
		for (const auto& p : orbit.points)
			anchors.push_back(net.project(std::span<const double>(p.data(), static_cast<std::size_t>(p.size()))));

	json runs = json::array();
	for (std::size_t i = 0; i < config.schedule.size(); ++i) {
		const double eps = config.schedule[i];
		const auto graph = build_transition_graph(net, f, eps);
		const auto d = chain_decomposition(graph);
		std::vector<std::size_t> sizes;
		for (const auto& c : d.classes)
			sizes.push_back(c.size());
		std::set<int> periodic_classes;
		for (NodeId a : anchors)
			if (d.class_of[a] >= 0)
				periodic_classes.insert(d.class_of[a]);

		const std::string tag = std::to_string(i);
		if (config.options["write_edges"].get<bool>())
			write_file(dir / ("edges_" + tag + ".txt"), [&](std::ostream& o) { graph.write_edge_list(o); });
		write_file(dir / ("classes_" + tag + ".json"), [&](std::ostream& o) { o << d.to_json().dump() << '\n'; });

		runs.push_back({{"epsilon", eps},
		                {"edge_count", graph.edge_count()},
		                {"class_count", d.class_count()},
		                {"class_sizes", sizes},
		                {"recurrent_count", d.recurrent_nodes.size()},
		                {"periodic_orbit_classes", std::vector<int>(periodic_classes.begin(), periodic_classes.end())},
		                {"periodic_orbit_class_count", periodic_classes.size()},
		                {"chain_transitive", d.class_count() == 1 && d.classes[0].size() == net.size()}});
	}
	const json& last = runs.back();
	return {{"net_size", net.size()},
	        {"net_spacing", spacing},
	        {"runs", runs},
	        {"class_count", last["class_count"]},
	        {"periodic_orbit_class_count", last["periodic_orbit_class_count"]}};
}

json strip_summary(const Strip& s)
{
	return {{"max_top", s.max_top()}, {"min_top", s.min_top()}};
}

json dichotomy_analysis(const ZooEntry& entry, RunConfig& config, const fs::path& dir)
{
	if (!entry.model)
		throw ConfigError("system '" + entry.name + "' is not a central model");
	const CentralModel& model = *entry.model;
	DichotomyOptions options;
	options.schedule = require_schedule(config, geometric_schedule(0.25, 2.0 * model.base().min_spacing()));
	config.schedule = options.schedule;
	options.neighborhood_bound = config.options["neighborhood_bound"].get<double>();

	json sets = json::array();
	for (double eps : options.schedule)
		sets.push_back({{"epsilon", eps},
		                {"unstable", strip_summary(pseudo_unstable_set(model, eps))},
		                {"stable", strip_summary(pseudo_stable_set(model, eps))}});

	json result{{"fiber_cells", model.fiber_cells()},
	            {"base_size", model.base_size()},
	            {"neighborhood_bound", options.resolved_bound(model.fiber_cells())},
	            {"pseudo_sets", sets}};
	const auto outcome = dichotomy(model, options);
	result["outcome"] = outcome_name(outcome);
	std::visit(
	    [&](const auto& o) {
		    using T = std::decay_t<decltype(o)>;
		    if constexpr (std::is_same_v<T, ChainRecurrentSegment>) {
			    result["segment"] = {{"base_node", o.segment.base_node}, {"length", o.segment.length}};
		    } else {
			    result["epsilon"] = o.epsilon;
			    result["strip"] = strip_summary(o.strip);
			    write_file(dir / "strip.csv", [&](std::ostream& out) { o.strip.write_csv(out); });
		    }
	    },
	    outcome);
	return result;
}

json hyperbolicity_analysis(const ZooEntry& entry, RunConfig& config, const fs::path&)
{
	reject_schedule(config);
	if (!entry.system || !entry.splitting)
		throw ConfigError("system '" + entry.name + "' has no declared invariant splitting");
	SplittingSample sample = *entry.splitting;
	const double n = config.options["iterates"].get<double>();
	if (!(n >= 1.0) || n != std::floor(n))
		throw ConfigError("option 'iterates' must be a positive integer");
	sample.n = static_cast<int>(n);
	const auto report = check_partial_hyperbolicity(*entry.system, sample);
	json orbits = json::array();
	for (const auto& o : entry.orbits)
		orbits.push_back(o.to_json());
	return {{"sample_size", sample.points.size()},
	        {"iterates", sample.n},
	        {"dimensions",
	         {{"ss", sample.ess.front().cols()}, {"c", sample.ec.front().cols()}, {"uu", sample.euu.front().cols()}}},
	        {"partial_hyperbolicity", report.to_json()},
	        {"periodic_orbits", orbits}};
}

json homoclinic_analysis(const ZooEntry& entry, RunConfig& config, const fs::path& dir)
{
	reject_schedule(config);
	if (!entry.system || entry.orbits.empty())
		throw ConfigError("system '" + entry.name + "' has no known periodic orbits");
	const SmoothSystem& sys = *entry.system;
	const auto& opt = config.options;
	const double index = opt["orbit"].get<double>();
	if (!(index >= 0.0) || index != std::floor(index) || index >= static_cast<double>(entry.orbits.size()))
		throw ConfigError("option 'orbit' must index one of the " + std::to_string(entry.orbits.size()) +
		                  " known orbits");
	HomoclinicOptions hopt;
	hopt.angle_tolerance = opt["angle_tolerance"].get<double>();
	hopt.manifold.mesh = opt["mesh"].get<double>();
	const double budget = opt["budget"].get<double>();
	if (!(budget > 0.0))
		throw ConfigError("option 'budget' must be positive");

	const std::size_t count = entry.orbits.size();
	std::vector<std::optional<ManifoldPolyline>> unstable(count), stable(count);
	auto wu = [&](std::size_t i) -> const ManifoldPolyline& {
		if (!unstable[i])
			unstable[i] = grow_manifold(sys, entry.orbits[i], ManifoldSide::Unstable, budget, hopt.manifold);
		return *unstable[i];
	};
	auto ws = [&](std::size_t i) -> const ManifoldPolyline& {
		if (!stable[i])
			stable[i] = grow_manifold(sys, entry.orbits[i], ManifoldSide::Stable, budget, hopt.manifold);
		return *stable[i];
	};

	const auto p = static_cast<std::size_t>(index);
	const auto& orbit = entry.orbits[p];
	const auto crossings = intersect_polylines(sys, wu(p), ws(p), orbit.points, hopt);
	json list = json::array();
	std::size_t transverse = 0;
	for (const auto& c : crossings) {
		list.push_back(c.to_json());
		transverse += c.transverse ? 1 : 0;
	}
	auto manifold_json = [](const ManifoldPolyline& m) {
		return json{{"arclength", m.arclength},
		            {"points", m.point_count()},
		            {"left_domain", m.left_domain},
		            {"multiplier", m.multiplier},
		            {"direction", point_json(m.direction)}};
	};
	json result{{"orbit", orbit.to_json()},
	            {"budget", budget},
	            {"unstable_manifold", manifold_json(wu(p))},
	            {"stable_manifold", manifold_json(ws(p))},
	            {"crossing_count", crossings.size()},
	            {"transverse_count", transverse},
	            {"crossings", list}};

	if (opt["write_polylines"].get<bool>()) {
		write_file(dir / "unstable.csv", [&](std::ostream& o) { wu(p).write_csv(o); });
		write_file(dir / "stable.csv", [&](std::ostream& o) { ws(p).write_csv(o); });
		write_file(dir / "crossings.csv", [&](std::ostream& o) {
			o.precision(17);
			o << "x,y,angle,transverse\n";
			for (const auto& c : crossings)
				o << c.point[0] << ',' << c.point[1] << ',' << c.angle << ',' << (c.transverse ? 1 : 0) << '\n';
		});
	}

	if (opt["relations"].get<bool>()) {
		// geq[i][j]: W^u(orbit i) crosses W^s(orbit j) transversally.
		std::vector<std::vector<bool>> geq(count, std::vector<bool>(count, false));
		for (std::size_t i = 0; i < count; ++i) {
			for (std::size_t j = 0; j < count; ++j) {
				std::vector<Vec> excluded = entry.orbits[i].points;
				excluded.insert(excluded.end(), entry.orbits[j].points.begin(), entry.orbits[j].points.end());
				for (const auto& c : intersect_polylines(sys, wu(i), ws(j), excluded, hopt))
					geq[i][j] = geq[i][j] || c.transverse;
			}
		}
		json related = json::array();
		for (std::size_t i = 0; i < count; ++i)
			for (std::size_t j = i + 1; j < count; ++j)
				related.push_back({{"orbits", {i, j}}, {"related", geq[i][j] && geq[j][i]}});
		result["smale_geq"] = geq;
		result["homoclinically_related"] = related;
	}
	return result;
}

json twist_analysis(const ZooEntry& entry, RunConfig& config, const fs::path& dir)
{
	if (!entry.twisted)
		throw ConfigError("system '" + entry.name + "' has no orbit with local strong manifolds");
	const TwistedOrbit& orbit = *entry.twisted;
	double eps = config.options["epsilon"].get<double>();
	if (!config.schedule.empty())
		eps = config.schedule.back();
	if (eps == 0.0)
		eps = orbit.epsilon;
	if (!(eps > 0.0))
		throw ConfigError("twist epsilon must be positive");
	config.options["epsilon"] = eps;

	const auto pair = closest_return_pair(orbit.points);
	const auto returns = has_twisted_returns(orbit.cone, orbit.points, orbit.manifolds, eps);

	json pairs = json::array();
	std::ostringstream witnesses;
	witnesses.precision(17);
	witnesses << "i,j,curve,x,y,z\n";
	for (std::size_t i = 0; i < orbit.points.size(); ++i) {
		for (std::size_t j = i + 1; j < orbit.points.size(); ++j) {
			const Vec& p = orbit.points[i];
			const Vec& q = orbit.points[j];
			if (!((p - q).norm() < eps))
				continue;
			OrientedBall ball{0.5 * (p + q), orbit.cone.central(0.5 * (p + q))};
			const auto pq = position(orbit.cone, ball, p, q, orbit.manifolds[i].strong_unstable,
			                         orbit.manifolds[j].strong_stable);
			const auto qp = position(orbit.cone, ball, q, p, orbit.manifolds[j].strong_unstable,
			                         orbit.manifolds[i].strong_stable);
			pairs.push_back({{"pair", {i, j}},
			                 {"distance", (p - q).norm()},
			                 {"p_vs_q", pq.to_json()},
			                 {"q_vs_p", qp.to_json()},
			                 {"twisted", twisted_position(orbit.cone, p, orbit.manifolds[i], q, orbit.manifolds[j])}});
			for (const auto* v : {&pq, &qp})
				for (const auto& w : v->witness)
					witnesses << i << ',' << j << ',' << (v == &pq ? "pq" : "qp") << ',' << w[0] << ',' << w[1] << ','
					          << w[2] << '\n';
		}
	}
	write_file(dir / "witnesses.csv", [&](std::ostream& o) { o << witnesses.str(); });

	json result{{"period", orbit.points.size()},
	            {"epsilon", eps},
	            {"closest_return", {{"index", pair.index}, {"k", pair.k}, {"distance", pair.distance}}},
	            {"twisted_returns", returns.holds},
	            {"close_pairs", returns.close_pairs},
	            {"pairs", pairs}};
	if (returns.violation)
		result["violation"] = {returns.violation->first, returns.violation->second};
	return result;
}

} // namespace

std::vector<std::string> analysis_names()
{
	return {"chain", "dichotomy", "hyperbolicity", "homoclinic", "twist"};
}

RunConfig RunConfig::parse(const json& j)
{
	if (!j.is_object())
		throw ConfigError("config must be a JSON object");
	static const std::set<std::string> known{"system", "analysis", "epsilon_schedule", "options", "output_dir"};
	for (const auto& [key, value] : j.items())
		if (!known.count(key))
			throw ConfigError("unknown key '" + key + "'");
	for (const char* key : {"system", "analysis"})
		if (!j.contains(key))
			throw ConfigError(std::string("missing required key '") + key + "'");

	RunConfig c;
	const json& sys = j["system"];
	if (!sys.is_object())
		throw ConfigError("'system' must be an object");
	for (const auto& [key, value] : sys.items())
		if (key != "name" && key != "parameters")
			throw ConfigError("unknown key 'system." + key + "'");
	if (!sys.contains("name") || !sys["name"].is_string())
		throw ConfigError("missing required key 'system.name'");
	c.system = sys["name"].get<std::string>();
	if (sys.contains("parameters")) {
		if (!sys["parameters"].is_object())
			throw ConfigError("'system.parameters' must be an object");
		c.parameters = sys["parameters"];
	}

	if (!j["analysis"].is_string())
		throw ConfigError("'analysis' must be a string");
	c.analysis = j["analysis"].get<std::string>();
	if (!option_defaults().count(c.analysis)) {
		std::string list;
		for (const auto& n : analysis_names())
			list += (list.empty() ? "" : ", ") + n;
		throw ConfigError("unknown analysis '" + c.analysis + "'; expected one of " + list);
	}

	if (j.contains("epsilon_schedule")) {
		const json& s = j["epsilon_schedule"];
		if (!s.is_array() || s.empty())
			throw ConfigError("'epsilon_schedule' must be a non-empty array of numbers");
		for (const auto& v : s) {
			if (!v.is_number())
				throw ConfigError("'epsilon_schedule' must be a non-empty array of numbers");
			c.schedule.push_back(v.get<double>());
		}
		for (std::size_t i = 0; i < c.schedule.size(); ++i)
			if (!(c.schedule[i] > 0.0) || (i > 0 && !(c.schedule[i] < c.schedule[i - 1])))
				throw ConfigError("'epsilon_schedule' must be positive and strictly decreasing");
	}
	if (j.contains("options")) {
		if (!j["options"].is_object())
			throw ConfigError("'options' must be an object");
		c.options = j["options"];
	}
	c.options = resolve_options(c.analysis, c.options);
	if (j.contains("output_dir")) {
		if (!j["output_dir"].is_string())
			throw ConfigError("'output_dir' must be a string");
		c.output_dir = j["output_dir"].get<std::string>();
	}
	return c;
}

json RunConfig::to_json() const
{
	json j{{"system", {{"name", system}, {"parameters", parameters}}},
	       {"analysis", analysis},
	       {"options", options},
	       {"output_dir", output_dir.string()}};
	if (!schedule.empty())
		j["epsilon_schedule"] = schedule;
	return j;
}

RunResult run_analysis(const RunConfig& given)
{
	RunConfig config = given;
	config.options = resolve_options(config.analysis, config.options);
	const ZooEntry entry = make_zoo(config.system, config.parameters);
	config.parameters = entry.parameters;

	std::error_code ec;
	fs::create_directories(config.output_dir, ec);
	if (ec)
		throw Error("cannot create output directory " + config.output_dir.string() + ": " + ec.message());

	RunResult result;
	json body;
	try {
		if (config.analysis == "chain")
			body = chain_analysis(entry, config, config.output_dir);
		else if (config.analysis == "dichotomy")
			body = dichotomy_analysis(entry, config, config.output_dir);
		else if (config.analysis == "hyperbolicity")
			body = hyperbolicity_analysis(entry, config, config.output_dir);
		else if (config.analysis == "homoclinic")
			body = homoclinic_analysis(entry, config, config.output_dir);
		else
			body = twist_analysis(entry, config, config.output_dir);
		result.report["status"] = "ok";
		result.report["result"] = body;
	} catch (const ConfigError&) {
		throw;
	} catch (const ResolutionInsufficient& ex) {
		write_file(config.output_dir / "unstable_strip.csv", [&](std::ostream& o) { ex.unstable.write_csv(o); });
		write_file(config.output_dir / "stable_strip.csv", [&](std::ostream& o) { ex.stable.write_csv(o); });
		result.exit_code = 2;
		result.report["status"] = "error";
		result.report["error"] = ex.what();
		result.report["result"] = {{"epsilon", ex.epsilon},
		                           {"unstable", strip_summary(ex.unstable)},
		                           {"stable", strip_summary(ex.stable)}};
	} catch (const Error& ex) {
		result.exit_code = 2;
		result.report["status"] = "error";
		result.report["error"] = ex.what();
	}
	result.report["timestamp"] = timestamp();
	result.report["config"] = config.to_json();
	result.report["system"] = {{"name", entry.name}, {"description", entry.description}};
	result.report["analysis"] = config.analysis;
	write_file(config.output_dir / "report.json", [&](std::ostream& o) { o << result.report.dump(2) << '\n'; });
	return result;
}

int run_config_file(const fs::path& path, std::ostream& out, std::ostream& err)
{
	try {
		std::ifstream in(path);
		if (!in)
			throw ConfigError("cannot open config " + path.string());
		json j;
		try {
			j = json::parse(in);
		} catch (const json::parse_error& ex) {
			throw ConfigError(std::string("invalid JSON: ") + ex.what());
		}
		const RunConfig config = RunConfig::parse(j);
		const RunResult result = run_analysis(config);
		const fs::path report = config.output_dir / "report.json";
		if (result.exit_code == 0)
			out << config.analysis << " on " << config.system << ": ok; report " << report.string() << '\n';
		else
			err << config.analysis << " on " << config.system << ": " << result.report["error"].get<std::string>()
			    << "; report " << report.string() << '\n';
		return result.exit_code;
	} catch (const ConfigError& ex) {
		err << "config error: " << ex.what() << '\n';
		return 1;
	} catch (const std::exception& ex) {
		err << "error: " << ex.what() << '\n';
		return 2;
	}
}

ReportDiff diff_reports(const json& a, const json& b)
{
	json x = a, y = b;
	x.erase("timestamp");
	y.erase("timestamp");
	ReportDiff d;
	for (const auto& op : json::diff(x, y))
		d.differences.push_back(op["path"].get<std::string>());
	d.identical = d.differences.empty();
	return d;
}

} // namespace phcm
