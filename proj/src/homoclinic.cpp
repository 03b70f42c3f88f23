#include "phcm/smooth.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <map>
#include <set>

#include "parallel.hpp"

namespace phcm {

namespace {

struct Segment
{
	Vec start;
	Vec delta;
	std::size_t branch;
	std::size_t index; // segment i joins points i and i + 1
};

std::vector<Segment> segments(const SmoothSystem& sys, const ManifoldPolyline& poly)
{
	std::vector<Segment> out;
	for (std::size_t b = 0; b < poly.branches.size(); ++b) {
		const auto& pts = poly.branches[b];
		const auto& breaks = poly.breaks[b];
		for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
			if (std::binary_search(breaks.begin(), breaks.end(), i + 1))
				continue;
			out.push_back({pts[i], sys.displacement(pts[i], pts[i + 1]), b, i});
		}
	}
	return out;
}

double cross(const Vec& a, const Vec& b)
{
	return a[0] * b[1] - a[1] * b[0];
}

// Uniform bucket grid over segment start points; periodic axes wrap.
class BucketGrid
{
public:
	BucketGrid(const SmoothSystem& sys, double cell) : sys_(sys)
	{
		for (int axis = 0; axis < 2; ++axis) {
			const double p = axis < static_cast<int>(sys.periods.size()) ? sys.periods[static_cast<std::size_t>(axis)] : 0.0;
			if (p > 0.0) {
				count_[axis] = std::max<long>(1, static_cast<long>(std::floor(p / cell)));
				cell_[axis] = p / static_cast<double>(count_[axis]);
			} else {
				count_[axis] = 0;
				cell_[axis] = cell;
			}
		}
	}

	std::pair<long, long> key(const Vec& x) const
	{
		return {index(0, x[0]), index(1, x[1])};
	}

	void insert(const Vec& x, std::size_t id) { cells_[key(x)].push_back(id); }

	// Ids in the 3 x 3 block of cells around x, each cell visited once.
	std::vector<std::size_t> near(const Vec& x) const
	{
		const auto [i0, j0] = key(x);
		std::set<std::pair<long, long>> seen;
		std::vector<std::size_t> ids;
		for (long di = -1; di <= 1; ++di) {
			for (long dj = -1; dj <= 1; ++dj) {
				const std::pair<long, long> k{wrap(0, i0 + di), wrap(1, j0 + dj)};
				if (!seen.insert(k).second)
					continue;
				const auto it = cells_.find(k);
				if (it != cells_.end())
					ids.insert(ids.end(), it->second.begin(), it->second.end());
			}
		}
		return ids;
	}

private:
	long index(int axis, double v) const
	{
		return wrap(axis, static_cast<long>(std::floor(v / cell_[axis])));
	}

	long wrap(int axis, long i) const
	{
		const long n = count_[axis];
		if (n == 0)
			return i;
		return ((i % n) + n) % n;
	}

	const SmoothSystem& sys_;
	long count_[2] = {0, 0};
	double cell_[2] = {1.0, 1.0};
	std::map<std::pair<long, long>, std::vector<std::size_t>> cells_;
};

bool near_any(const SmoothSystem& sys, const Vec& x, const std::vector<Vec>& points, double radius)
{
	for (const auto& p : points)
		if (sys.distance(x, p) < radius)
			return true;
	return false;
}

} // namespace

std::vector<Crossing> intersect_polylines(const SmoothSystem& sys, const ManifoldPolyline& unstable,
                                          const ManifoldPolyline& stable, const std::vector<Vec>& excluded,
                                          const HomoclinicOptions& options)
{
	if (sys.dimension != 2)
		throw Error("crossing search is implemented for planar systems");
	const auto us = segments(sys, unstable);
	const auto ss = segments(sys, stable);
	if (us.empty() || ss.empty())
		return {};

	double longest = 0.0;
	for (const auto* list : {&us, &ss})
		for (const auto& s : *list)
			longest = std::max(longest, s.delta.norm());
	BucketGrid grid(sys, std::max(2.0 * longest, 1e-9));
	for (std::size_t j = 0; j < ss.size(); ++j)
		grid.insert(sys.wrap(ss[j].start), j);

	std::vector<std::vector<Crossing>> found(us.size());
	detail::parallel_for(us.size(), [&](std::size_t i) {
		const Segment& a = us[i];
		const double la = a.delta.norm();
		if (la == 0.0)
			return;
		for (std::size_t j : grid.near(sys.wrap(a.start))) {
			const Segment& b = ss[j];
			const double lb = b.delta.norm();
			if (lb == 0.0)
				continue;
			const Vec offset = sys.displacement(a.start, b.start);
			const double denom = cross(a.delta, b.delta);
			if (std::abs(denom) <= 1e-15 * la * lb)
				continue;
			const double t = cross(offset, b.delta) / denom;
			const double u = cross(offset, a.delta) / denom;
			if (t < 0.0 || t >= 1.0 || u < 0.0 || u >= 1.0)
				continue;
			Crossing c;
			c.point = sys.wrap(a.start + t * a.delta);
			if (near_any(sys, c.point, excluded, options.exclusion_radius))
				continue;
			c.angle = std::asin(std::min(1.0, std::abs(denom) / (la * lb)));
			c.transverse = c.angle > options.angle_tolerance;
			c.unstable_branch = a.branch;
			c.unstable_segment = a.index;
			c.unstable_t = t;
			c.stable_branch = b.branch;
			c.stable_segment = b.index;
			c.stable_t = u;
			found[i].push_back(std::move(c));
		}
	});

	std::vector<Crossing> all;
	for (auto& f : found)
		for (auto& c : f)
			all.push_back(std::move(c));
	std::sort(all.begin(), all.end(), [](const Crossing& x, const Crossing& y) {
		if (x.point[0] != y.point[0])
			return x.point[0] < y.point[0];
		if (x.point[1] != y.point[1])
			return x.point[1] < y.point[1];
		return std::tie(x.unstable_branch, x.unstable_segment, x.stable_branch, x.stable_segment) <
		       std::tie(y.unstable_branch, y.unstable_segment, y.stable_branch, y.stable_segment);
	});
	return all;
}

std::vector<Crossing> find_transverse_homoclinic(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit,
                                                 double budget, const HomoclinicOptions& options)
{
	const auto wu = grow_manifold(sys, orbit, ManifoldSide::Unstable, budget, options.manifold);
	const auto ws = grow_manifold(sys, orbit, ManifoldSide::Stable, budget, options.manifold);
	return intersect_polylines(sys, wu, ws, orbit.points, options);
}

bool smale_leq(const SmoothSystem& sys, const PeriodicOrbitRecord& p, const PeriodicOrbitRecord& q, double budget,
               const HomoclinicOptions& options)
{
	const auto wu = grow_manifold(sys, p, ManifoldSide::Unstable, budget, options.manifold);
	const auto ws = grow_manifold(sys, q, ManifoldSide::Stable, budget, options.manifold);
	std::vector<Vec> excluded = p.points;
	excluded.insert(excluded.end(), q.points.begin(), q.points.end());
	for (const auto& c : intersect_polylines(sys, wu, ws, excluded, options))
		if (c.transverse)
			return true;
	return false;
}

bool homoclinically_related(const SmoothSystem& sys, const PeriodicOrbitRecord& p, const PeriodicOrbitRecord& q,
                            double budget, const HomoclinicOptions& options)
{
	return smale_leq(sys, p, q, budget, options) && smale_leq(sys, q, p, budget, options);
}

namespace {

double distance_to_orbit(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, const Vec& x)
{
	double d = std::numeric_limits<double>::infinity();
	for (const auto& p : orbit.points)
		d = std::min(d, sys.distance(p, x));
	return d;
}

// Iterates are followed until they enter the capture radius of the orbit;
// from there on they lie on a local manifold and shadow the orbit itself, so
// plain iteration (which loses the point at the expansion rate) is not
// needed.
bool stays_in_window(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, const Vec& x, const Window& window,
                     const ClassOptions& options)
{
	for (const auto& p : orbit.points)
		if (!window(p))
			return false;
	if (!window(x))
		return false;
	for (const bool forward : {true, false}) {
		Vec y = x;
		for (int k = 0; k < options.window_iterates; ++k) {
			y = forward ? sys.step(y) : sys.step_back(y);
			if (!y.allFinite() || !window(y))
				return false;
			if (distance_to_orbit(sys, orbit, y) < options.capture_radius)
				break;
		}
	}
	return true;
}

} // namespace

std::vector<Vec> homoclinic_class_points(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, double budget,
                                         const Window& window, const ClassOptions& options)
{
	std::vector<Vec> points;
	for (const auto& c : find_transverse_homoclinic(sys, orbit, budget, options.homoclinic)) {
		if (!c.transverse)
			continue;
		if (window && !stays_in_window(sys, orbit, c.point, window, options))
			continue;
		points.push_back(c.point);
	}
	return points;
}

nlohmann::json Crossing::to_json() const
{
	return {{"point", std::vector<double>(point.data(), point.data() + point.size())},
	        {"angle", angle},
	        {"transverse", transverse},
	        {"unstable", {{"branch", unstable_branch}, {"segment", unstable_segment}, {"t", unstable_t}}},
	        {"stable", {{"branch", stable_branch}, {"segment", stable_segment}, {"t", stable_t}}}};
}

} // namespace phcm
