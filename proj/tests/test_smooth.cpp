#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phcm/smooth.hpp"
#include "phcm/zoo.hpp"

using namespace phcm;

namespace {

Vec v2(double a, double b)
{
	Vec x(2);
	x << a, b;
	return x;
}

Mat col(const Vec& v)
{
	return Mat(v);
}

Bundle constant(const Vec& v, std::size_t n)
{
	return Bundle(n, col(v.normalized()));
}

SmoothSystem rotation_plane(double angle)
{
	Mat r(2, 2);
	r << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
	return make_linear_system(r);
}

} // namespace

TEST_CASE("Henon fixed points and a period-two orbit")
{
	const auto e = make_zoo("henon");
	const auto& s = *e.system;
	const double disc = std::sqrt(0.49 + 5.6);
	for (double x : {(-0.7 + disc) / 2.8, (-0.7 - disc) / 2.8}) {
		const auto orbit = find_periodic_orbit(s, 1, v2(x + 0.05, 0.3 * x - 0.02));
		REQUIRE(orbit);
		CHECK(std::abs(orbit->points[0][0] - x) < 1e-10);
		CHECK(orbit->type == OrbitType::Saddle);
		CHECK(orbit->stable_dim == 1);
		CHECK(orbit->minimal_period == 1);
		CHECK(std::abs(orbit->multipliers[0]) < 1.0);
		CHECK(std::abs(orbit->multipliers[1]) > 1.0);
		// det Df = -b
		CHECK((orbit->multipliers[0] * orbit->multipliers[1]).real() == doctest::Approx(-0.3));
	}

	// 1.4 x^2 - 0.7 x - 0.65 = 0 for the two points of the 2-cycle.
	const double d2 = std::sqrt(0.49 + 4 * 1.4 * 0.65);
	const double x1 = (0.7 + d2) / 2.8, x2 = (0.7 - d2) / 2.8;
	const auto two = find_periodic_orbit(s, 2, v2(x1 + 0.02, 0.3 * x2));
	REQUIRE(two);
	CHECK(two->minimal_period == 2);
	CHECK(two->points.size() == 2);
	CHECK(std::abs(two->points[0][0] - x1) < 1e-9);
	CHECK(std::abs(two->points[1][0] - x2) < 1e-9);

	// A fixed point found as a period-2 solution keeps its minimal period.
	const auto fixed = find_periodic_orbit(s, 2, v2(0.63, 0.19));
	REQUIRE(fixed);
	CHECK(fixed->minimal_period == 1);
}

TEST_CASE("orbit classification")
{
	Mat a(2, 2);
	a << 0.5, 0.0, 0.0, 0.25;
	auto sink = make_orbit(make_linear_system(a), v2(0, 0), 1);
	CHECK(sink.type == OrbitType::Sink);
	CHECK(sink.stable_dim == 2);
	a << 2.0, 0.0, 0.0, 3.0;
	CHECK(make_orbit(make_linear_system(a), v2(0, 0), 1).type == OrbitType::Source);
	CHECK(make_orbit(rotation_plane(0.3), v2(0, 0), 1).type == OrbitType::Nonhyperbolic);
	const auto r = make_orbit(rotation_plane(0.3), v2(0, 0), 1);
	CHECK(std::abs(r.multipliers[0].imag()) == doctest::Approx(std::sin(0.3)));
	CHECK(r.multipliers[0].imag() < r.multipliers[1].imag());

	const auto ns = make_zoo("north_south_circle");
	CHECK(ns.orbits[0].type == OrbitType::Source);
	CHECK(ns.orbits[1].type == OrbitType::Sink);
	const auto j = ns.orbits[0].to_json();
	CHECK(j.at("type") == "source");
	CHECK(j.at("period") == 1);
}

TEST_CASE("no fixed point of an irrational rotation")
{
	const auto e = make_zoo("irrational_rotation");
	for (double seed : {0.0, 0.3, 0.7})
		CHECK_FALSE(find_periodic_orbit(*e.system, 1, Vec::Constant(1, seed)));
}

TEST_CASE("declared Jacobians match finite differences")
{
	std::mt19937_64 rng(31);
	std::uniform_real_distribution<double> u(0.05, 0.95);
	for (const char* name : {"north_south_circle", "henon", "cat_map", "horseshoe_affine", "cat_times_rotation",
	                         "twisted_orbit_synthetic"}) {
		const auto e = make_zoo(name);
		const auto& s = *e.system;
		for (int i = 0; i < 20; ++i) {
			Vec x(s.dimension);
			for (int k = 0; k < s.dimension; ++k)
				x[k] = u(rng);
			if (std::string(name) == "horseshoe_affine")
				x = v2(0.2 + 0.05 * u(rng), 0.7 + 0.05 * u(rng)); // away from the branch seam
			CHECK_MESSAGE(jacobian_consistency_error(s, x) < 1e-6, name);
		}
	}
}

TEST_CASE("torus charts")
{
	const auto e = make_zoo("cat_map");
	const auto& s = *e.system;
	CHECK(s.is_periodic());
	CHECK(s.distance(v2(0.05, 0.5), v2(0.95, 0.5)) == doctest::Approx(0.1));
	CHECK(s.wrap(v2(1.25, -0.25)).isApprox(v2(0.25, 0.75)));
	const Vec x = v2(0.3, 0.1);
	CHECK(s.distance(s.step_back(s.step(x)), x) < 1e-12);
	CHECK(s.distance(s.iterate(s.iterate(x, 5), -5), x) < 1e-9);
	Mat a(2, 2);
	a << 2.0, 1.0, 1.0, 1.0;
	CHECK(s.jacobian_product(x, 3).isApprox(a * a * a));
}

TEST_CASE("domination of the cat-map eigensplitting")
{
	const auto e = make_zoo("cat_map");
	const auto& sp = *e.splitting;
	const auto r = check_dominated_splitting(*e.system, sp.points, sp.ess, sp.euu, 1);
	const double expected = 2.0 * (3.0 - std::sqrt(5.0)) / (3.0 + std::sqrt(5.0));
	CHECK(r.passed);
	CHECK(std::abs(r.worst_ratio - expected) < 1e-9);
	CHECK(check_uniform_contraction(*e.system, sp.points, sp.ess, 1).passed);
	CHECK(check_uniform_expansion(*e.system, sp.points, sp.euu, 1).passed);

	// Swapped roles are far from dominated.
	CHECK_FALSE(check_dominated_splitting(*e.system, sp.points, sp.euu, sp.ess, 1).passed);

	// A constant E off the contracting eigendirection by an angle a has
	// |Df v| = sqrt(ls^2 cos^2 a + lu^2 sin^2 a). At 0.1 rad the ratio is
	// still well below 1; at 0.6 rad it is not.
	const double phi = (1.0 + std::sqrt(5.0)) / 2.0, base = std::atan2(phi, -1.0);
	const double ls = (3.0 - std::sqrt(5.0)) / 2.0, lu = (3.0 + std::sqrt(5.0)) / 2.0;
	for (double a : {0.1, 0.6}) {
		const auto tilted = constant(v2(std::cos(base + a), std::sin(base + a)), sp.points.size());
		const auto r1 = check_dominated_splitting(*e.system, sp.points, tilted, sp.euu, 1);
		const double want = 2.0 * std::hypot(ls * std::cos(a), lu * std::sin(a)) / lu;
		CHECK(r1.worst_ratio == doctest::Approx(want).epsilon(1e-9));
		CHECK(r1.passed == (a < 0.5));
	}
}

TEST_CASE("identity and degenerate splittings")
{
	const auto id = make_linear_system(Mat::Identity(2, 2));
	const std::vector<Vec> pts{v2(0, 0), v2(1, 2)};
	const auto e1 = constant(v2(1, 0), 2), e2 = constant(v2(0, 1), 2);
	const auto r = check_dominated_splitting(id, pts, e1, e2, 1);
	CHECK_FALSE(r.passed);
	CHECK(r.worst_ratio == doctest::Approx(2.0));
	CHECK_FALSE(check_uniform_contraction(id, pts, e1, 5).passed);
	CHECK_THROWS_AS(check_dominated_splitting(id, pts, e1, constant(v2(2, 0), 2), 1), Error);
}

TEST_CASE("partial hyperbolicity of the cat map times a rotation")
{
	const auto e = make_zoo("cat_times_rotation");
	const auto& sp = *e.splitting;
	CHECK(sp.points.size() == 500);
	CHECK(sp.ec[0].cols() == 1);
	const auto rep = check_partial_hyperbolicity(*e.system, sp);
	CHECK(rep.overall);
	const double ls = (3.0 - std::sqrt(5.0)) / 2.0;
	CHECK(rep.contraction.worst_ratio == doctest::Approx(ls));
	CHECK(rep.expansion.worst_ratio == doctest::Approx(ls));
	CHECK(rep.stable_domination.worst_ratio == doctest::Approx(2 * ls));
	CHECK(rep.to_json().at("overall") == true);

	// Putting the center into the stable bundle breaks the contraction.
	auto bad = sp;
	for (std::size_t i = 0; i < bad.points.size(); ++i) {
		Mat m(3, 2);
		m.col(0) = sp.ess[i].col(0);
		m.col(1) = sp.ec[i].col(0);
		bad.ess[i] = m;
		bad.ec[i] = Mat(3, 0);
	}
	CHECK_FALSE(check_partial_hyperbolicity(*e.system, bad).overall);
}

TEST_CASE("orientation covers")
{
	const std::vector<Vec> origin{Vec::Zero(1)};
	const std::vector<Vec> up{Vec::Ones(1)};
	SUBCASE("orientation-preserving fixed point")
	{
		const auto c = orientation_cover(make_linear_system(Mat::Constant(1, 1, 0.9)), origin, up);
		CHECK(c.preserved);
		CHECK(c.lifted_cycles() == std::vector<std::size_t>{1, 1});
		CHECK(c.sigma_commutes());
	}
	SUBCASE("orientation-reversing fixed point")
	{
		const auto c = orientation_cover(make_linear_system(Mat::Constant(1, 1, -0.9)), origin, up);
		CHECK_FALSE(c.preserved);
		CHECK(c.lifted_cycles() == std::vector<std::size_t>{2});
		CHECK(c.sigma_commutes());
		CHECK(c.lifted_is_permutation());
	}
	SUBCASE("period two with signs (+, -)")
	{
		SmoothSystem s;
		s.dimension = 2;
		s.evaluate = [](const Vec& p) { return v2(-p[0], p[0] * p[1]); };
		s.jacobian = [](const Vec& p) {
			Mat j(2, 2);
			j << -1.0, 0.0, p[1], p[0];
			return j;
		};
		const auto c = orientation_cover(s, {v2(1, 0), v2(-1, 0)}, {v2(0, 1), v2(0, 1)});
		CHECK(c.signs == std::vector<int>{1, -1});
		CHECK_FALSE(c.preserved);
		CHECK(c.base_is_permutation());
		CHECK(c.lifted_cycles() == std::vector<std::size_t>{4});
		CHECK(c.lifted_graph().edge_count() == 4);
	}
	SUBCASE("degenerate central direction")
	{
		SmoothSystem s = make_linear_system(Mat::Identity(2, 2));
		s.evaluate = [](const Vec& p) { return p; };
		s.jacobian = [](const Vec&) {
			Mat j(2, 2);
			j << 0.0, 1.0, 1.0, 0.0;
			return j;
		};
		CHECK_THROWS_AS(orientation_cover(s, {v2(0, 0)}, {v2(1, 0)}), Error);
	}
}

TEST_CASE("orientation cover properties on random sign patterns")
{
	// Cyclic permutation of n points on a line with random signs: the cover is
	// trivial iff the product of the signs is positive.
	std::mt19937_64 rng(32);
	for (int trial = 0; trial < 50; ++trial) {
		const int n = std::uniform_int_distribution<int>(1, 9)(rng);
		std::vector<double> sign(static_cast<std::size_t>(n));
		int product = 1;
		for (auto& sg : sign) {
			sg = std::bernoulli_distribution(0.5)(rng) ? 1.0 : -1.0;
			product *= sg > 0 ? 1 : -1;
		}
		// Points k at (k, 0); f(k, y) = (k + 1 mod n, sign_k * y * 0.5).
		SmoothSystem s;
		s.dimension = 2;
		s.evaluate = [n, sign](const Vec& p) {
			const int k = static_cast<int>(std::lround(p[0]));
			return v2((k + 1) % n, sign[static_cast<std::size_t>(k)] * 0.5 * p[1]);
		};
		s.jacobian = [sign](const Vec& p) {
			Mat j = Mat::Zero(2, 2);
			j(1, 1) = sign[static_cast<std::size_t>(std::lround(p[0]))] * 0.5;
			return j;
		};
		std::vector<Vec> pts, dirs;
		for (int k = 0; k < n; ++k) {
			pts.push_back(v2(k, 0));
			dirs.push_back(v2(0, 1));
		}
		const auto c = orientation_cover(s, pts, dirs);
		CHECK(c.sigma_commutes());
		CHECK(c.lifted_is_permutation());
		CHECK(c.preserved == (product > 0));
		const auto cycles = c.lifted_cycles();
		if (product > 0)
			CHECK(cycles == std::vector<std::size_t>{static_cast<std::size_t>(n), static_cast<std::size_t>(n)});
		else
			CHECK(cycles == std::vector<std::size_t>{static_cast<std::size_t>(2 * n)});
		CHECK(c.to_json().at("preserved") == c.preserved);
	}
}
