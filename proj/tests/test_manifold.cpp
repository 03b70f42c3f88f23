#include <doctest.h>

#include <cmath>
#include <limits>
#include <sstream>

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

double segment_distance(const Vec& p, const Vec& a, const Vec& b)
{
	const Vec d = b - a;
	const double len2 = d.squaredNorm();
	const double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
	return (p - (a + t * d)).norm();
}

double polyline_distance(const ManifoldPolyline& m, const Vec& p)
{
	double best = std::numeric_limits<double>::infinity();
	for (std::size_t b = 0; b < m.branches.size(); ++b) {
		const auto& pts = m.branches[b];
		for (std::size_t i = 0; i < pts.size(); ++i) {
			best = std::min(best, (pts[i] - p).norm());
			const bool broken = std::find(m.breaks[b].begin(), m.breaks[b].end(), i + 1) != m.breaks[b].end();
			if (i + 1 < pts.size() && !broken)
				best = std::min(best, segment_distance(p, pts[i], pts[i + 1]));
		}
	}
	return best;
}

Crossing nearest(const std::vector<Crossing>& xs, const Vec& target)
{
	REQUIRE_FALSE(xs.empty());
	return *std::min_element(xs.begin(), xs.end(), [&](const Crossing& a, const Crossing& b) {
		return (a.point - target).norm() < (b.point - target).norm();
	});
}

} // namespace

TEST_CASE("affine horseshoe local manifolds are the axis-parallel lines")
{
	const auto e = make_zoo("horseshoe_affine");
	const auto& p0 = e.orbits[0];
	const auto wu = grow_manifold(*e.system, p0, ManifoldSide::Unstable, 0.1);
	const auto ws = grow_manifold(*e.system, p0, ManifoldSide::Stable, 0.1);
	CHECK(std::abs(wu.direction[0]) < 1e-12);
	CHECK(std::abs(ws.direction[1]) < 1e-12);
	CHECK(wu.multiplier == doctest::Approx(3.0));
	CHECK(ws.multiplier == doctest::Approx(1.0 / 3.0));
	for (const auto& branch : wu.branches) {
		CHECK(branch.front().isApprox(p0.points[0]));
		for (const auto& q : branch)
			if (std::abs(q[1] - 0.15) < 0.05)
				CHECK(std::abs(q[0] - 0.15) < 1e-12);
	}
	CHECK(wu.arclength >= 0.1);
}

TEST_CASE("Henon unstable manifold is invariant and finely meshed")
{
	const auto e = make_zoo("henon");
	const auto& s = *e.system;
	ManifoldOptions opt;
	opt.mesh = 2e-3;
	const auto wu = grow_manifold(s, e.orbits[0], ManifoldSide::Unstable, 3.0, opt);
	CHECK((wu.arclength >= 3.0 || wu.left_domain));
	CHECK(wu.point_count() > 100);
	std::size_t checked = 0;
	for (std::size_t b = 0; b < wu.branches.size(); ++b) {
		const auto& pts = wu.branches[b];
		for (std::size_t i = 1; i < pts.size(); ++i) {
			const bool broken = std::find(wu.breaks[b].begin(), wu.breaks[b].end(), i) != wu.breaks[b].end();
			if (!broken)
				CHECK((pts[i] - pts[i - 1]).norm() <= opt.mesh * (1 + 1e-9));
		}
		// f^-1 of a point of W^u is on W^u.
		for (std::size_t i = 0; i < pts.size(); i += 97, ++checked)
			CHECK(polyline_distance(wu, s.inverse(pts[i])) < 1e-5);
	}
	CHECK(checked > 2);

	const auto ws = grow_manifold(s, e.orbits[0], ManifoldSide::Stable, 1.0, opt);
	for (std::size_t i = 0; i < ws.branches[0].size(); i += 53)
		CHECK(polyline_distance(ws, s.step(ws.branches[0][i])) < 1e-5);
}

TEST_CASE("negative multipliers use the second iterate")
{
	const auto e = make_zoo("horseshoe_affine");
	const auto wu = grow_manifold(*e.system, e.orbits[1], ManifoldSide::Unstable, 0.2);
	CHECK(wu.multiplier == doctest::Approx(-3.0));
	// Both branches of the vertical line through P1.
	CHECK(wu.branches[0].back()[1] * wu.branches[1].back()[1] != 0.0);
	CHECK((wu.branches[0].back()[1] - 0.7) * (wu.branches[1].back()[1] - 0.7) < 0.0);
}

TEST_CASE("horseshoe homoclinic points match the affine solve")
{
	const auto e = make_zoo("horseshoe_affine");
	const auto& s = *e.system;
	const auto xs = find_transverse_homoclinic(s, e.orbits[0], 4.0);
	for (const auto& target : {v2(0.15, 53.0 / 60.0), v2(53.0 / 60.0, 0.15), v2(53.0 / 60.0, 53.0 / 60.0)}) {
		const auto c = nearest(xs, target);
		CHECK((c.point - target).norm() < 1e-9);
		CHECK(c.transverse);
		CHECK(c.angle == doctest::Approx(std::numbers::pi / 2));
	}
	for (std::size_t i = 1; i < xs.size(); ++i)
		CHECK_FALSE(std::lexicographical_compare(xs[i].point.begin(), xs[i].point.end(), xs[i - 1].point.begin(),
		                                         xs[i - 1].point.end()));
	CHECK(xs.front().to_json().contains("angle"));
}

TEST_CASE("the two horseshoe saddles are homoclinically related")
{
	const auto e = make_zoo("horseshoe_affine");
	const auto& s = *e.system;
	CHECK(smale_leq(s, e.orbits[0], e.orbits[1], 4.0));
	CHECK(smale_leq(s, e.orbits[1], e.orbits[0], 4.0));
	CHECK(homoclinically_related(s, e.orbits[0], e.orbits[1], 4.0));
}

TEST_CASE("a linear saddle has no homoclinic points")
{
	Mat a(2, 2);
	a << 2.0, 0.0, 0.0, 0.5;
	const auto s = make_linear_system(a);
	const auto o = make_orbit(s, v2(0, 0), 1);
	for (double budget : {1.0, 10.0, 100.0})
		CHECK(find_transverse_homoclinic(s, o, budget).empty());
	Mat b(2, 2);
	b << 1.5, 0.7, 0.2, 0.8;
	const auto sheared = make_linear_system(b);
	CHECK(find_transverse_homoclinic(sheared, make_orbit(sheared, v2(0, 0), 1), 20.0).empty());
}

TEST_CASE("polyline intersection")
{
	const auto s = make_linear_system(Mat::Identity(2, 2));
	ManifoldPolyline u, st;
	u.branches = {{v2(0, 0), v2(1, 1)}, {v2(0, 0)}};
	u.breaks = {{}, {}};
	st.branches = {{v2(0, 1), v2(1, 0)}, {v2(2, 2), v2(3, 2.0005)}};
	st.breaks = {{}, {}};
	HomoclinicOptions opt;
	auto xs = intersect_polylines(s, u, st, {}, opt);
	REQUIRE(xs.size() == 1);
	CHECK(xs[0].point.isApprox(v2(0.5, 0.5)));
	CHECK(xs[0].angle == doctest::Approx(std::numbers::pi / 2));
	CHECK(xs[0].transverse);
	CHECK(intersect_polylines(s, u, st, {v2(0.5, 0.5)}, opt).empty());

	// A near-tangent crossing is found but flagged.
	u.branches[0] = {v2(1.5, 2.0), v2(3.5, 2.0)};
	xs = intersect_polylines(s, u, st, {}, opt);
	REQUIRE(xs.size() == 1);
	CHECK_FALSE(xs[0].transverse);

	// Broken joins carry no segment.
	u.branches[0] = {v2(0, 0), v2(1, 1)};
	u.breaks[0] = {1};
	CHECK(intersect_polylines(s, u, st, {}, opt).empty());
}

TEST_CASE("homoclinic class points inside a window")
{
	const auto e = make_zoo("horseshoe_affine");
	const auto all = homoclinic_class_points(*e.system, e.orbits[0], 4.0);
	CHECK_FALSE(all.empty());
	const Window square = [](const Vec& x) { return x[0] >= 0 && x[0] <= 1 && x[1] >= 0 && x[1] <= 1; };
	const auto inside = homoclinic_class_points(*e.system, e.orbits[0], 4.0, square);
	CHECK(inside.size() <= all.size());
	CHECK_FALSE(inside.empty());
	const Window none = [](const Vec&) { return false; };
	CHECK(homoclinic_class_points(*e.system, e.orbits[0], 4.0, none).empty());
}

TEST_CASE("manifold CSV")
{
	const auto e = make_zoo("horseshoe_affine");
	const auto wu = grow_manifold(*e.system, e.orbits[0], ManifoldSide::Unstable, 0.01);
	std::ostringstream out;
	wu.write_csv(out);
	CHECK(out.str().rfind("branch,x,y\n0,", 0) == 0);
}
