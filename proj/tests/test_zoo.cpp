#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phcm/zoo.hpp"

using namespace phcm;

TEST_CASE("every documented fact re-verifies")
{
	for (const auto& name : zoo_catalog()) {
		const auto entry = make_zoo(name);
		CHECK(entry.name == name);
		CHECK_FALSE(entry.facts.empty());
		for (const auto& f : entry.facts)
			CHECK_MESSAGE(f.reproduce.find(name) != std::string::npos, name);
		for (const auto& r : verify_facts(entry))
			CHECK_MESSAGE(r.check.passed, name << ": " << r.statement << " (" << r.check.detail << ")");
	}
}

TEST_CASE("catalog and parameter errors")
{
	CHECK(zoo_catalog().size() == 11);
	try {
		make_zoo("lorenz");
		FAIL("expected ConfigError");
	} catch (const ConfigError& e) {
		CHECK(std::string(e.what()).find("henon") != std::string::npos);
	}
	CHECK_THROWS_AS(make_zoo("henon", {{"c", 1.0}}), ConfigError);
	CHECK_THROWS_AS(make_zoo("henon", {{"a", "big"}}), ConfigError);
	CHECK_THROWS_AS(make_zoo("north_south_circle", {{"amplitude", 2.0}}), ConfigError);
	CHECK_THROWS_AS(make_zoo("horseshoe_affine", {{"offset1", 0.2}}), ConfigError);
	CHECK(make_zoo("henon", {{"a", 1.2}}).parameters.at("b") == 0.3);
}

TEST_CASE("skew products over the rotation base")
{
	const double pi2 = 2 * std::numbers::pi;
	for (const char* name : {"skew_contract", "skew_expand", "skew_identity", "skew_mixed"}) {
		const auto e = make_zoo(name);
		REQUIRE(e.model);
		const auto& m = *e.model;
		CHECK(m.base_size() == 64);
		for (NodeId x = 0; x < 64; x += 7)
			for (int k = 0; k <= m.fiber_cells(); k += 17) {
				const double t = m.level(k), xs = m.base().point(x)[0];
				double want = t;
				if (std::string(name) == "skew_contract")
					want = t / 2;
				else if (std::string(name) == "skew_expand")
					want = std::min(2 * t, 1.0);
				else if (std::string(name) == "skew_mixed")
					want = t + 0.1 * t * (1 - t) * std::sin(pi2 * xs);
				CHECK(m.fiber_sample(x, k) == doctest::Approx(want).epsilon(1e-14));
			}
	}
}

TEST_CASE("Henon and horseshoe closed forms")
{
	const auto h = make_zoo("henon");
	REQUIRE(h.orbits.size() == 2);
	const double disc = std::sqrt(0.49 + 5.6);
	CHECK(h.orbits[0].points[0][0] == doctest::Approx((-0.7 + disc) / 2.8));
	CHECK(h.system->domain);

	const auto s = make_zoo("horseshoe_affine");
	CHECK(s.orbits[0].points[0][0] == doctest::Approx(0.15));
	CHECK(s.orbits[1].points[0][1] == doctest::Approx(0.7));
	// The inverse undoes the map on the domain.
	const auto& sys = *s.system;
	for (double x : {0.1, 0.4, 0.9})
		for (double y : {0.12, 0.4, 0.65, 0.9}) {
			Vec p(2);
			p << x, y;
			CHECK((sys.inverse(sys.evaluate(p)) - p).norm() < 1e-12);
		}
}
