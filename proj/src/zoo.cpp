#include "phcm/zoo.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

namespace phcm {

namespace {

using json = nlohmann::json;

constexpr double two_pi = 2.0 * std::numbers::pi;

std::string fmt(double v)
{
	std::ostringstream out;
	out.precision(12);
	out << v;
	return out.str();
}

// Defaults overridden by user values; unknown keys are rejected.
json resolve(const std::string& name, const json& defaults, const json& given)
{
	if (!given.is_null() && !given.is_object())
		throw ConfigError("parameters for '" + name + "' must be a JSON object");
	json out = defaults;
	if (given.is_object()) {
		for (const auto& [key, value] : given.items()) {
			if (!defaults.contains(key))
				throw ConfigError("unknown parameter '" + key + "' for system '" + name + "'");
			if (!value.is_number())
				throw ConfigError("parameter '" + key + "' for system '" + name + "' must be a number");
			out[key] = value;
		}
	}
	return out;
}

std::size_t count_param(const json& p, const char* key)
{
	const double v = p.at(key).get<double>();
	if (!(v >= 1.0) || v != std::floor(v))
		throw ConfigError(std::string("parameter '") + key + "' must be a positive integer");
	return static_cast<std::size_t>(v);
}

Vec vec(std::initializer_list<double> values)
{
	Vec v(static_cast<Eigen::Index>(values.size()));
	Eigen::Index i = 0;
	for (double x : values)
		v[i++] = x;
	return v;
}

FactCheck check(bool ok, std::string detail)
{
	return {ok, std::move(detail)};
}

std::string command(const std::string& name)
{
	return "phcm zoo check " + name;
}

// ---------------------------------------------------------------------------
// Circle maps

ZooEntry north_south_circle(const json& given)
{
	ZooEntry e;
	e.name = "north_south_circle";
	e.description = "theta -> theta + a sin(theta) on [0, 2 pi)";
	e.parameters = resolve(e.name, {{"amplitude", 0.1}, {"net_size", 1000}}, given);
	const double a = e.parameters["amplitude"].get<double>();
	if (!(a > 0.0 && a < 1.0))
		throw ConfigError("amplitude must lie in (0, 1)");
	const std::size_t n = count_param(e.parameters, "net_size");

	SmoothSystem s;
	s.name = e.name;
	s.dimension = 1;
	s.periods = {two_pi};
	s.evaluate = [a](const Vec& x) { return Vec(x.array() + a * x.array().sin()); };
	s.jacobian = [a](const Vec& x) { return Mat::Constant(1, 1, 1.0 + a * std::cos(x[0])); };
	s.inverse = [a](const Vec& y) {
		double t = y[0];
		for (int i = 0; i < 60; ++i) {
			const double step = (t + a * std::sin(t) - y[0]) / (1.0 + a * std::cos(t));
			t -= step;
			if (std::abs(step) < 1e-16)
				break;
		}
		return vec({t});
	};
	e.system = s;
	e.net = SampledSpace::uniform_grid({n}, {0.0}, {two_pi}, metrics::periodic({two_pi}));
	e.orbits = {make_orbit(s, vec({0.0}), 1), make_orbit(s, vec({std::numbers::pi}), 1)};

	e.facts.push_back({"fixed points theta = 0 (f' = 1 + a) and theta = pi (f' = 1 - a)", FactBasis::Analytic,
	                   command(e.name), [s, a] {
		                   const auto p0 = find_periodic_orbit(s, 1, vec({0.05}));
		                   const auto p1 = find_periodic_orbit(s, 1, vec({3.0}));
		                   if (!p0 || !p1)
			                   return check(false, "Newton solve failed");
		                   const double x0 = s.distance(p0->points[0], vec({0.0}));
		                   const double x1 = s.distance(p1->points[0], vec({std::numbers::pi}));
		                   const double d0 = std::abs(p0->multipliers[0].real() - (1.0 + a));
		                   const double d1 = std::abs(p1->multipliers[0].real() - (1.0 - a));
		                   return check(x0 < 1e-8 && x1 < 1e-8 && d0 < 1e-8 && d1 < 1e-8,
		                                "position errors " + fmt(x0) + ", " + fmt(x1) + "; multiplier errors " +
		                                    fmt(d0) + ", " + fmt(d1));
	                   }});
	return e;
}

ZooEntry irrational_rotation(const json& given)
{
	ZooEntry e;
	e.name = "irrational_rotation";
	e.description = "theta -> theta + rotation (mod 1)";
	e.parameters = resolve(e.name, {{"rotation", 0.61803}, {"net_size", 1000}}, given);
	const double r = e.parameters["rotation"].get<double>();
	const std::size_t n = count_param(e.parameters, "net_size");

	SmoothSystem s;
	s.name = e.name;
	s.dimension = 1;
	s.periods = {1.0};
	s.evaluate = [r](const Vec& x) { return Vec(x.array() + r); };
	s.jacobian = [](const Vec&) { return Mat::Identity(1, 1); };
	s.inverse = [r](const Vec& x) { return Vec(x.array() - r); };
	e.system = s;
	e.net = SampledSpace::uniform_grid({n}, {0.0}, {1.0}, metrics::periodic({1.0}));

	e.facts.push_back({"no fixed points", FactBasis::Analytic, command(e.name), [s] {
		                   for (double seed : {0.0, 0.25, 0.5, 0.75})
			                   if (find_periodic_orbit(s, 1, vec({seed})))
				                   return check(false, "Newton converged from seed " + fmt(seed));
		                   return check(true, "no convergence from 4 seeds");
	                   }});
	const SampledSpace net = *e.net;
	e.facts.push_back({"one chain class covering the net at epsilon = 2 x spacing", FactBasis::Computed,
	                   command(e.name), [s, net] {
		                   const auto g = build_transition_graph(net, [&](std::span<const double> x) {
			                   return std::vector<double>{s.evaluate(vec({x[0]}))[0]};
		                   }, 2.0 * net.min_spacing());
		                   const auto d = chain_decomposition(g);
		                   const bool ok = d.class_count() == 1 && d.classes[0].size() == net.size();
		                   return check(ok, std::to_string(d.class_count()) + " classes");
	                   }});
	return e;
}

// ---------------------------------------------------------------------------
// Planar maps

ZooEntry henon(const json& given)
{
	ZooEntry e;
	e.name = "henon";
	e.description = "(x, y) -> (1 - a x^2 + y, b x)";
	e.parameters = resolve(e.name, {{"a", 1.4}, {"b", 0.3}}, given);
	const double a = e.parameters["a"].get<double>();
	const double b = e.parameters["b"].get<double>();
	if (b == 0.0)
		throw ConfigError("parameter 'b' must be non-zero");

	SmoothSystem s;
	s.name = e.name;
	s.dimension = 2;
	s.evaluate = [a, b](const Vec& x) { return vec({1.0 - a * x[0] * x[0] + x[1], b * x[0]}); };
	s.jacobian = [a, b](const Vec& x) {
		Mat j(2, 2);
		j << -2.0 * a * x[0], 1.0, b, 0.0;
		return j;
	};
	s.inverse = [a, b](const Vec& y) {
		const double x = y[1] / b;
		return vec({x, y[0] - 1.0 + a * x * x});
	};
	s.domain = Box{vec({-2.5, -2.5}), vec({2.5, 2.5})};
	e.system = s;

	// a x^2 + (1 - b) x - 1 = 0
	const double disc = (1.0 - b) * (1.0 - b) + 4.0 * a;
	if (disc < 0.0)
		throw ConfigError("no real fixed points at these parameters");
	const double xp = (-(1.0 - b) + std::sqrt(disc)) / (2.0 * a);
	const double xm = (-(1.0 - b) - std::sqrt(disc)) / (2.0 * a);
	e.orbits = {make_orbit(s, vec({xp, b * xp}), 1), make_orbit(s, vec({xm, b * xm}), 1)};

	e.facts.push_back({"fixed points x = (-(1 - b) +- sqrt((1 - b)^2 + 4a)) / 2a, y = b x, both saddles",
	                   FactBasis::Analytic, command(e.name), [s, xp, xm, b] {
		                   std::string detail;
		                   bool ok = true;
		                   for (double x : {xp, xm}) {
			                   const auto orbit = find_periodic_orbit(s, 1, vec({x + 0.01, b * x - 0.01}));
			                   if (!orbit)
				                   return check(false, "Newton solve failed near x = " + fmt(x));
			                   const double err = std::abs(orbit->points[0][0] - x);
			                   ok = ok && err < 1e-10 && orbit->type == OrbitType::Saddle;
			                   detail += "x = " + fmt(orbit->points[0][0]) + " (" + orbit_type_name(orbit->type) + ") ";
		                   }
		                   return check(ok, detail);
	                   }});
	return e;
}

ZooEntry cat_map(const json& given)
{
	ZooEntry e;
	e.name = "cat_map";
	e.description = "(x, y) -> (2x + y, x + y) on the torus [0, 1)^2";
	e.parameters = resolve(e.name, {{"net_size", 64}}, given);
	const std::size_t n = count_param(e.parameters, "net_size");

	Mat a(2, 2);
	a << 2.0, 1.0, 1.0, 1.0;
	SmoothSystem s = make_linear_system(a, {1.0, 1.0}, e.name);
	e.system = s;
	e.net = SampledSpace::uniform_grid({n, n}, {0.0, 0.0}, {1.0, 1.0}, metrics::periodic({1.0, 1.0}));
	e.orbits = {make_orbit(s, vec({0.0, 0.0}), 1)};

	// Constant eigensplitting along an orbit sample, center trivial.
	const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
	SplittingSample sample;
	Vec x = vec({0.1234, 0.5678});
	for (int i = 0; i < 500; ++i) {
		sample.points.push_back(x);
		sample.ess.push_back(vec({-1.0, phi}).normalized());
		sample.ec.push_back(Mat(2, 0));
		sample.euu.push_back(vec({phi, 1.0}).normalized());
		x = s.step(x);
	}
	e.splitting = sample;

	const double lu = (3.0 + std::sqrt(5.0)) / 2.0, ls = (3.0 - std::sqrt(5.0)) / 2.0;
	e.facts.push_back({"fixed point (0, 0) with multipliers (3 +- sqrt 5) / 2", FactBasis::Analytic,
	                   command(e.name), [s, lu, ls] {
		                   const auto orbit = find_periodic_orbit(s, 1, vec({0.0, 0.0}));
		                   if (!orbit)
			                   return check(false, "Newton solve failed");
		                   const double err = std::max(std::abs(orbit->multipliers[0].real() - ls),
		                                               std::abs(orbit->multipliers[1].real() - lu));
		                   return check(err < 1e-12 && orbit->type == OrbitType::Saddle,
		                                "multiplier error " + fmt(err));
	                   }});
	const SampledSpace net = *e.net;
	e.facts.push_back({"one chain class covering the net at epsilon = 2 x spacing", FactBasis::Computed,
	                   command(e.name), [s, net] {
		                   const auto g = build_transition_graph(net, [&](std::span<const double> x) {
			                   const Vec y = s.evaluate(vec({x[0], x[1]}));
			                   return std::vector<double>{y[0], y[1]};
		                   }, 2.0 * net.min_spacing());
		                   const auto d = chain_decomposition(g);
		                   const bool ok = d.class_count() == 1 && d.classes[0].size() == net.size();
		                   return check(ok, std::to_string(d.class_count()) + " classes");
	                   }});
	return e;
}

ZooEntry horseshoe_affine(const json& given)
{
	ZooEntry e;
	e.name = "horseshoe_affine";
	e.description = "two-branch piecewise-affine horseshoe of the unit square";
	e.parameters = resolve(
	    e.name, {{"contraction", 1.0 / 3.0}, {"expansion", 3.0}, {"offset0", 0.1}, {"offset1", 0.6}}, given);
	const double c = e.parameters["contraction"].get<double>();
	const double ex = e.parameters["expansion"].get<double>();
	const double o0 = e.parameters["offset0"].get<double>();
	const double o1 = e.parameters["offset1"].get<double>();
	if (!(c > 0.0 && c < 1.0) || !(ex > 1.0))
		throw ConfigError("horseshoe needs contraction in (0, 1) and expansion > 1");
	if (!(o0 >= 0.0 && o0 + 1.0 / ex < o1 && o1 + 1.0 / ex <= 1.0 && o0 + c < o1 && o1 + c <= 1.0))
		throw ConfigError("horseshoe strips must be disjoint and inside the unit square");

	// Branch 0 on y < y_split: (o0 + c x, ex (y - o0)), orientation kept.
	// Branch 1 on y >= y_split: (o1 + c - c x, 1 - ex (y - o1)), rotated.
	const double y_split = 0.5 * (o0 + 1.0 / ex + o1);
	const double x_split = 0.5 * (o0 + c + o1);
	SmoothSystem s;
	s.name = e.name;
	s.dimension = 2;
	s.evaluate = [=](const Vec& p) {
		if (p[1] < y_split)
			return vec({o0 + c * p[0], ex * (p[1] - o0)});
		return vec({o1 + c - c * p[0], 1.0 - ex * (p[1] - o1)});
	};
	s.jacobian = [=](const Vec& p) {
		Mat j = Mat::Zero(2, 2);
		const double sign = p[1] < y_split ? 1.0 : -1.0;
		j(0, 0) = sign * c;
		j(1, 1) = sign * ex;
		return j;
	};
	s.inverse = [=](const Vec& q) {
		if (q[0] < x_split)
			return vec({(q[0] - o0) / c, q[1] / ex + o0});
		return vec({(o1 + c - q[0]) / c, o1 + (1.0 - q[1]) / ex});
	};
	// The inverse is exact on images of this box.
	const double margin = std::min(0.25, (x_split - o0) / c - 1.0);
	s.domain = Box{vec({-margin, -margin}), vec({1.0 + margin, 1.0 + margin})};
	e.system = s;

	const Vec p0 = vec({o0 / (1.0 - c), ex * o0 / (ex - 1.0)});
	const Vec p1 = vec({(o1 + c) / (1.0 + c), (1.0 + ex * o1) / (1.0 + ex)});
	e.orbits = {make_orbit(s, p0, 1), make_orbit(s, p1, 1)};

	e.facts.push_back({"saddle P0 = (o0 / (1 - c), e o0 / (e - 1)) with multipliers (c, e); saddle P1 = ((o1 + c) / "
	                   "(1 + c), (1 + e o1) / (1 + e)) with multipliers (-c, -e)",
	                   FactBasis::Analytic, command(e.name), [s, p0, p1, c, ex] {
		                   const auto a = find_periodic_orbit(s, 1, p0 + vec({0.01, 0.01}));
		                   const auto b = find_periodic_orbit(s, 1, p1 + vec({0.01, 0.01}));
		                   if (!a || !b)
			                   return check(false, "Newton solve failed");
		                   const double err = std::max((a->points[0] - p0).norm(), (b->points[0] - p1).norm());
		                   const double merr = std::max({std::abs(a->multipliers[0].real() - c),
		                                                 std::abs(a->multipliers[1].real() - ex),
		                                                 std::abs(b->multipliers[0].real() + c),
		                                                 std::abs(b->multipliers[1].real() + ex)});
		                   return check(err < 1e-12 && merr < 1e-12, "position error " + fmt(err) +
		                                                                 ", multiplier error " + fmt(merr));
	                   }});
	const Vec crossing = vec({p0[0], o1 + (1.0 - p0[1]) / ex});
	const PeriodicOrbitRecord orbit0 = e.orbits[0];
	e.facts.push_back({"transverse homoclinic point of P0 at (x(P0), o1 + (1 - y(P0)) / e)", FactBasis::Analytic,
	                   command(e.name), [s, orbit0, crossing] {
		                   const auto found = find_transverse_homoclinic(s, orbit0, 4.0);
		                   double best = std::numeric_limits<double>::infinity();
		                   for (const auto& x : found)
			                   if (x.transverse)
				                   best = std::min(best, (x.point - crossing).norm());
		                   return check(best < 1e-9, std::to_string(found.size()) + " crossings, nearest at " +
		                                                 fmt(best) + " from the affine value");
	                   }});
	return e;
}

// ---------------------------------------------------------------------------
// Partially hyperbolic product

ZooEntry cat_times_rotation(const json& given)
{
	ZooEntry e;
	e.name = "cat_times_rotation";
	e.description = "(x, y, z) -> (2x + y, x + y, z + rotation) on the torus [0, 1)^3";
	e.parameters = resolve(e.name, {{"rotation", 0.61803}, {"sample_size", 500}}, given);
	const double r = e.parameters["rotation"].get<double>();
	const std::size_t n = count_param(e.parameters, "sample_size");

	SmoothSystem s;
	s.name = e.name;
	s.dimension = 3;
	s.periods = {1.0, 1.0, 1.0};
	s.evaluate = [r](const Vec& p) { return vec({2.0 * p[0] + p[1], p[0] + p[1], p[2] + r}); };
	s.jacobian = [](const Vec&) {
		Mat j(3, 3);
		j << 2.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 1.0;
		return j;
	};
	s.inverse = [r](const Vec& p) { return vec({p[0] - p[1], 2.0 * p[1] - p[0], p[2] - r}); };
	e.system = s;

	const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
	// Eigenvectors of [[2, 1], [1, 1]]: (phi, 1) for (3 + sqrt 5) / 2 and
	// (-1, phi) for (3 - sqrt 5) / 2.
	const Vec uu = vec({phi, 1.0, 0.0}).normalized();
	const Vec ss = vec({-1.0, phi, 0.0}).normalized();
	const Vec cc = vec({0.0, 0.0, 1.0});
	SplittingSample sample;
	Vec x = vec({0.1234, 0.5678, 0.9012});
	for (std::size_t i = 0; i < n; ++i) {
		sample.points.push_back(x);
		sample.ess.push_back(ss);
		sample.ec.push_back(cc);
		sample.euu.push_back(uu);
		x = s.step(x);
	}
	sample.n = 1;
	e.splitting = sample;

	e.facts.push_back({"partially hyperbolic with one-dimensional center along an orbit sample", FactBasis::Analytic,
	                   command(e.name), [s, sample] {
		                   const auto report = check_partial_hyperbolicity(s, sample);
		                   return check(report.overall, report.to_json().dump());
	                   }});
	return e;
}

// ---------------------------------------------------------------------------
// Central models over a rotation base

ZooEntry skew(const std::string& name, const json& given)
{
	ZooEntry e;
	e.name = name;
	e.parameters = resolve(name, {{"base_size", 64}, {"rotation", 0.61803}, {"fiber_cells", 256}}, given);
	const std::size_t n = count_param(e.parameters, "base_size");
	const std::size_t m = count_param(e.parameters, "fiber_cells");
	const double r = e.parameters["rotation"].get<double>();

	std::function<double(double, double)> fiber;
	if (name == "skew_contract") {
		e.description = "t -> t / 2 over a circle rotation";
		fiber = [](double, double t) { return t / 2.0; };
	} else if (name == "skew_expand") {
		e.description = "t -> min(2t, 1) over a circle rotation";
		fiber = [](double, double t) { return std::min(2.0 * t, 1.0); };
	} else if (name == "skew_identity") {
		e.description = "t -> t over a circle rotation";
		fiber = [](double, double t) { return t; };
	} else {
		e.description = "t -> t + 0.1 t (1 - t) sin(2 pi x) over a circle rotation";
		fiber = [](double x, double t) { return t + 0.1 * t * (1.0 - t) * std::sin(two_pi * x); };
	}

	SampledSpace base = SampledSpace::uniform_grid({n}, {0.0}, {1.0}, metrics::periodic({1.0}));
	std::vector<NodeId> map(n);
	std::vector<std::vector<double>> samples(n, std::vector<double>(m + 1));
	for (NodeId i = 0; i < n; ++i) {
		const double x = base.point(i)[0];
		const double image[] = {x + r};
		map[i] = base.project(image);
		for (std::size_t k = 0; k <= m; ++k)
			samples[i][k] = fiber(x, static_cast<double>(k) / static_cast<double>(m));
	}
	e.model = CentralModel(std::move(base), std::move(map), std::move(samples));

	const CentralModel model = *e.model;
	const double spacing = 1.0 / static_cast<double>(n);
	std::string expected;
	if (name == "skew_contract")
		expected = "ForwardTrappingStrip";
	else if (name == "skew_expand")
		expected = "BackwardTrappingStrip";
	else if (name == "skew_identity")
		expected = "ChainRecurrentSegment";
	else
		expected = "ChainRecurrentSegment";
	e.facts.push_back({"dichotomy outcome " + expected + " on the default schedule",
	                   name == "skew_mixed" ? FactBasis::Computed : FactBasis::Analytic, command(name),
	                   [model, spacing, expected] {
		                   DichotomyOptions options;
		                   options.schedule = geometric_schedule(0.25, 2.0 * spacing);
		                   const auto outcome = dichotomy(model, options);
		                   return check(expected == outcome_name(outcome), outcome_name(outcome));
	                   }});
	return e;
}

// ---------------------------------------------------------------------------
// Synthetic twisted orbit

ZooEntry twisted_orbit_synthetic(const json& given)
{
	ZooEntry e;
	e.name = "twisted_orbit_synthetic";
	e.description = "periodic orbit of a rotation in the xz-plane with tilted local strong manifolds";
	e.parameters = resolve(e.name,
	                       {{"period", 16},
	                        {"step", 5},
	                        {"radius", 0.1},
	                        {"tilt", 0.5},
	                        {"half_length", 0.1},
	                        {"mesh", 0.01},
	                        {"epsilon", 0.05}},
	                       given);
	const std::size_t period = count_param(e.parameters, "period");
	const std::size_t step = count_param(e.parameters, "step");
	const double radius = e.parameters["radius"].get<double>();
	const double tilt = e.parameters["tilt"].get<double>();
	const double half = e.parameters["half_length"].get<double>();
	const double mesh = e.parameters["mesh"].get<double>();
	if (!(radius > 0.0) || !(half > 0.0) || !(mesh > 0.0))
		throw ConfigError("radius, half_length and mesh must be positive");

	const double angle = two_pi * static_cast<double>(step) / static_cast<double>(period);
	Mat rot = Mat::Identity(3, 3);
	rot(0, 0) = std::cos(angle);
	rot(0, 2) = -std::sin(angle);
	rot(2, 0) = std::sin(angle);
	rot(2, 2) = std::cos(angle);
	e.system = make_linear_system(rot, {}, e.name);

	TwistedOrbit orbit;
	const int samples = static_cast<int>(std::ceil(2.0 * half / mesh));
	for (std::size_t k = 0; k < period; ++k) {
		const double theta = angle * static_cast<double>(k);
		const Vec p = vec({radius * std::cos(theta), 0.0, radius * std::sin(theta)});
		// W^uu along e3, W^ss along e1 + beta e2 with beta alternating in k.
		const double beta = (k % 2 == 0) ? tilt : -tilt;
		const Vec du = vec({0.0, 0.0, 1.0});
		const Vec ds = vec({1.0, beta, 0.0});
		LocalManifolds lm;
		for (int j = 0; j <= samples; ++j) {
			const double t = -half + 2.0 * half * j / samples;
			lm.strong_unstable.push_back(p + t * du);
			lm.strong_stable.push_back(p + t * ds);
		}
		orbit.points.push_back(p);
		orbit.manifolds.push_back(std::move(lm));
	}
	orbit.cone.chi = 0.1;
	orbit.cone.central = [](const Vec&) { return vec({0.0, 1.0, 0.0}); };
	orbit.cone.r0 = radius;
	orbit.cone.length_bound = 5.0 * mesh;
	orbit.epsilon = e.parameters["epsilon"].get<double>();
	e.twisted = orbit;

	e.facts.push_back({"closest return pair is orbit-adjacent at distance 2 r sin(pi / period)", FactBasis::Analytic,
	                   command(e.name), [orbit, radius, period] {
		                   const auto pair = closest_return_pair(orbit.points);
		                   const double want = 2.0 * radius * std::sin(std::numbers::pi / static_cast<double>(period));
		                   return check(std::abs(pair.distance - want) < 1e-12,
		                                "k = " + std::to_string(pair.k) + ", d = " + fmt(pair.distance));
	                   }});
	e.facts.push_back({"twisted returns at the entry's epsilon", FactBasis::Computed, command(e.name), [orbit] {
		                   const auto r = has_twisted_returns(orbit.cone, orbit.points, orbit.manifolds, orbit.epsilon);
		                   return check(r.holds, std::to_string(r.close_pairs) + " close pairs");
	                   }});
	return e;
}

using Builder = ZooEntry (*)(const json&);

const std::map<std::string, Builder>& builders()
{
	static const std::map<std::string, Builder> table{
	    {"north_south_circle", north_south_circle},
	    {"irrational_rotation", irrational_rotation},
	    {"henon", henon},
	    {"cat_map", cat_map},
	    {"horseshoe_affine", horseshoe_affine},
	    {"cat_times_rotation", cat_times_rotation},
	    {"skew_contract", [](const json& p) { return skew("skew_contract", p); }},
	    {"skew_expand", [](const json& p) { return skew("skew_expand", p); }},
	    {"skew_identity", [](const json& p) { return skew("skew_identity", p); }},
	    {"skew_mixed", [](const json& p) { return skew("skew_mixed", p); }},
	    {"twisted_orbit_synthetic", twisted_orbit_synthetic},
	};
	return table;
}

} // namespace

std::vector<std::string> zoo_catalog()
{
	return {"north_south_circle", "irrational_rotation", "henon",         "cat_map",
	        "horseshoe_affine",   "cat_times_rotation",  "skew_contract", "skew_expand",
	        "skew_identity",      "skew_mixed",          "twisted_orbit_synthetic"};
}

ZooEntry make_zoo(const std::string& name, const nlohmann::json& parameters)
{
	const auto& table = builders();
	const auto it = table.find(name);
	if (it == table.end()) {
		std::string list;
		for (const auto& n : zoo_catalog())
			list += (list.empty() ? "" : ", ") + n;
		throw ConfigError("unknown system '" + name + "'; catalog: " + list);
	}
	return it->second(parameters);
}

PointMap ZooEntry::point_map() const
{
	if (!system)
		throw Error("zoo entry '" + name + "' has no point map");
	const SmoothSystem s = *system;
	return [s](std::span<const double> x) {
		const Vec y = s.evaluate(Eigen::Map<const Vec>(x.data(), static_cast<Eigen::Index>(x.size())));
		return std::vector<double>(y.data(), y.data() + y.size());
	};
}

std::vector<FactReport> verify_facts(const ZooEntry& entry)
{
	std::vector<FactReport> out;
	for (const auto& fact : entry.facts) {
		FactReport r{fact.statement, fact.basis, {}};
		try {
			r.check = fact.verify();
		} catch (const std::exception& ex) {
			r.check = {false, std::string("error: ") + ex.what()};
		}
		out.push_back(std::move(r));
	}
	return out;
}

const char* fact_basis_name(FactBasis basis)
{
	return basis == FactBasis::Analytic ? "analytic" : "computed";
}

SmoothSystem make_linear_system(const Mat& a, std::vector<double> periods, std::string name)
{
	if (a.rows() != a.cols() || a.rows() == 0)
		throw Error("linear system needs a non-empty square matrix");
	SmoothSystem s;
	s.name = std::move(name);
	s.dimension = static_cast<int>(a.rows());
	s.periods = std::move(periods);
	s.evaluate = [a](const Vec& x) { return Vec(a * x); };
	s.jacobian = [a](const Vec&) { return a; };
	Eigen::FullPivLU<Mat> lu(a);
	if (lu.isInvertible()) {
		const Mat inv = lu.inverse();
		s.inverse = [inv](const Vec& x) { return Vec(inv * x); };
	}
	return s;
}

} // namespace phcm
