#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phcm/geometry.hpp"
#include "phcm/zoo.hpp"

using namespace phcm;

namespace {

Vec v3(double a, double b, double c)
{
	Vec x(3);
	x << a, b, c;
	return x;
}

Polyline line(const Vec& p, const Vec& dir, double half, int pieces)
{
	Polyline out;
	for (int j = 0; j <= pieces; ++j)
		out.push_back(p + (-half + 2.0 * half * j / pieces) * dir);
	return out;
}

// Straight local manifolds: W^uu along (0, alpha, 1), W^ss along (1, beta, 0).
struct Config
{
	Vec p, q;
	double alpha_p, beta_p, alpha_q, beta_q;
	LocalManifolds mp, mq;
};

Config random_config(std::mt19937_64& rng)
{
	std::uniform_real_distribution<double> c(-0.1, 0.1), slope(-0.5, 0.5);
	Config k{v3(c(rng), c(rng), c(rng)), v3(c(rng), c(rng), c(rng)), slope(rng), slope(rng), slope(rng), slope(rng),
	         {}, {}};
	k.mp = {line(k.p, v3(0, k.alpha_p, 1), 0.5, 25), line(k.p, v3(1, k.beta_p, 0), 0.5, 25)};
	k.mq = {line(k.q, v3(0, k.alpha_q, 1), 0.5, 25), line(k.q, v3(1, k.beta_q, 0), 0.5, 25)};
	return k;
}

// Height of B over A along the central axis for the leaf joining
// W^uu(from) and W^ss(to).
double sigma(const Vec& from, double alpha_from, const Vec& to, double beta_to)
{
	const Vec d = to - from;
	return d[1] - beta_to * d[0] - alpha_from * d[2];
}

ConeField wide_cone()
{
	ConeField cone;
	cone.central = [](const Vec&) { return v3(0, 1, 0); };
	cone.r0 = 1.0;
	cone.length_bound = 1.0;
	return cone;
}

} // namespace

TEST_CASE("cones")
{
	const auto cone = wide_cone();
	const Vec x = v3(0, 0, 0);
	CHECK(in_cone(cone, x, v3(0, 1, 0)));
	CHECK(in_cone(cone, x, v3(0.1, -1, 0)));
	CHECK_FALSE(in_cone(cone, x, v3(1, 0, 0)));
	CHECK_FALSE(in_cone(cone, x, v3(1, 1, 0)));
	CHECK_THROWS_AS(in_cone(cone, x, v3(0, 0, 0)), Error);
	ConeField bad = cone;
	bad.chi = 1.5;
	CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("positions follow the straight-leaf oracle")
{
	const auto cone = wide_cone();
	std::mt19937_64 rng(41);
	for (int trial = 0; trial < 100; ++trial) {
		const auto k = random_config(rng);
		const OrientedBall up{0.5 * (k.p + k.q), v3(0, 1, 0)}, down{0.5 * (k.p + k.q), v3(0, -1, 0)};
		const double s = sigma(k.p, k.alpha_p, k.q, k.beta_q);
		const auto v = position(cone, up, k.p, k.q, k.mp.strong_unstable, k.mq.strong_stable);
		REQUIRE(v.position != Position::Incomparable);
		CHECK(v.signed_length == doctest::Approx(s).epsilon(1e-9));
		CHECK(v.position == (s >= 0 ? Position::Below : Position::Above));
		REQUIRE(v.witness.size() == 2);
		CHECK(v.witness[1][1] - v.witness[0][1] == doctest::Approx(s).epsilon(1e-9));

		const auto w = position(cone, down, k.p, k.q, k.mp.strong_unstable, k.mq.strong_stable);
		CHECK(w.position == (s >= 0 ? Position::Above : Position::Below));
	}
}

TEST_CASE("twisted position is invariant under flipping the orientation")
{
	const auto cone = wide_cone();
	std::mt19937_64 rng(42);
	int twisted = 0;
	for (int trial = 0; trial < 100; ++trial) {
		const auto k = random_config(rng);
		const double pq = sigma(k.p, k.alpha_p, k.q, k.beta_q);
		const double qp = sigma(k.q, k.alpha_q, k.p, k.beta_p);
		const bool expected = (pq >= 0) == (qp >= 0);
		bool got = false;
		REQUIRE_NOTHROW(got = twisted_position(cone, k.p, k.mp, k.q, k.mq));
		CHECK(got == expected);
		CHECK(twisted_position(cone, k.q, k.mq, k.p, k.mp) == got);
		twisted += got;
	}
	CHECK(twisted > 10);
	CHECK(twisted < 90);
}

TEST_CASE("incomparable points")
{
	auto cone = wide_cone();
	std::mt19937_64 rng(43);
	const auto k = random_config(rng);
	cone.length_bound = 1e-9;
	CHECK_THROWS_AS(twisted_position(cone, k.p, k.mp, k.q, k.mq), Error);
	cone = wide_cone();
	const OrientedBall far{v3(5, 5, 5), v3(0, 1, 0)};
	CHECK(position(cone, far, k.p, k.q, k.mp.strong_unstable, k.mq.strong_stable).position ==
	      Position::Incomparable);
}

TEST_CASE("both below and above")
{
	// W^uu(p) bent so two leaves reach W^ss(q) with opposite heights.
	const auto cone = wide_cone();
	const Vec p = v3(0, 0, 0), q = v3(0, 0, 0.02);
	const Polyline wuu{v3(0, 0, -0.2), v3(0, 0.05, 0.03), v3(0, -0.03, 0.01), v3(0, -0.05, 0.2)};
	const Polyline wss = line(q, v3(1, 0, 0), 0.3, 6);
	const auto v = position(cone, OrientedBall{v3(0, 0, 0.01), v3(0, 1, 0)}, p, q, wuu, wss);
	CHECK(v.position == Position::Both);
	CHECK(v.signed_length * v.second_signed_length < 0);
	CHECK(v.to_json().at("position") == "both");
}

TEST_CASE("synthetic periodic orbit has twisted returns")
{
	const auto e = make_zoo("twisted_orbit_synthetic");
	const auto& t = *e.twisted;
	const auto r = has_twisted_returns(t.cone, t.points, t.manifolds, t.epsilon);
	CHECK(r.holds);
	CHECK(r.close_pairs == 16);
	CHECK_FALSE(r.violation);

	// Same tilt at every point: adjacent pairs are untwisted.
	auto same = t;
	for (std::size_t k = 0; k < same.points.size(); ++k)
		same.manifolds[k].strong_stable = line(same.points[k], v3(1, 0.5, 0), 0.1, 20);
	const auto r2 = has_twisted_returns(same.cone, same.points, same.manifolds, same.epsilon);
	CHECK_FALSE(r2.holds);
	REQUIRE(r2.violation);
	CHECK(r2.violation->first == 0);
	CHECK(r2.violation->second == 3);
}

TEST_CASE("closest return pairs")
{
	std::mt19937_64 rng(44);
	std::uniform_real_distribution<double> u(-1.0, 1.0);
	for (int trial = 0; trial < 100; ++trial) {
		const int n = std::uniform_int_distribution<int>(2, 40)(rng);
		std::vector<Vec> orbit;
		for (int i = 0; i < n; ++i)
			orbit.push_back(v3(u(rng), u(rng), u(rng)));
		double best = std::numeric_limits<double>::infinity();
		for (int i = 0; i < n; ++i)
			for (int j = i + 1; j < n; ++j)
				best = std::min(best, (orbit[i] - orbit[j]).norm());
		const auto r = closest_return_pair(orbit);
		CHECK(r.distance == best);
		CHECK(r.k >= 1);
		CHECK(r.k < static_cast<std::size_t>(n));
		CHECK((orbit[r.index] - orbit[(r.index + r.k) % n]).norm() == best);
	}

	const auto e = make_zoo("twisted_orbit_synthetic");
	const auto r = closest_return_pair(e.twisted->points);
	CHECK(r.k == 3);
	CHECK(r.index == 0);
	CHECK(std::abs(r.distance - 0.2 * std::sin(std::numbers::pi / 16)) < 1e-12);
	CHECK_THROWS_AS(closest_return_pair(std::vector<Vec>{v3(0, 0, 0)}), Error);

	// Torus distance wraps around.
	const auto cat = make_zoo("cat_map");
	Vec a(2), b(2);
	a << 0.8, 0.6;
	b << 0.2, 0.4;
	CHECK(closest_return_pair(*cat.system, {a, b}).distance == doctest::Approx(std::hypot(0.4, 0.2)));
}

TEST_CASE("contraction products along periodic orbits")
{
	const auto e = make_zoo("cat_map");
	const double phi = (1.0 + std::sqrt(5.0)) / 2.0, ls = (3.0 - std::sqrt(5.0)) / 2.0;
	Vec es(2), eu(2);
	es << -1.0, phi;
	eu << phi, 1.0;
	const Bundle s1{Mat(es.normalized())}, u1{Mat(eu.normalized())};
	const auto [c, x] = periodic_contraction_products(*e.system, e.orbits[0], s1, u1, 1);
	CHECK(std::abs(c - ls) < 1e-12);
	CHECK(std::abs(x - ls) < 1e-12);

	// Period two through (0.8, 0.6) and (0.2, 0.4).
	Vec p(2);
	p << 0.8, 0.6;
	const auto two = make_orbit(*e.system, p, 2);
	const auto [c2, x2] = periodic_contraction_products(*e.system, two, {s1[0], s1[0]}, {u1[0], u1[0]}, 1);
	CHECK(c2 == doctest::Approx(ls * ls).epsilon(1e-12));
	CHECK(x2 == doctest::Approx(ls * ls).epsilon(1e-12));
	const auto [c3, x3] = periodic_contraction_products(*e.system, two, {s1[0], s1[0]}, {u1[0], u1[0]}, 3);
	CHECK(c3 == doctest::Approx(std::pow(ls, 6)).epsilon(1e-9));
	CHECK(x3 == doctest::Approx(std::pow(ls, 6)).epsilon(1e-9));
}
