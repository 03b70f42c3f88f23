#include "phcm/smooth.hpp"

#include <cmath>
#include <ostream>

namespace phcm {

namespace {

struct Direction
{
	Vec vector;
	double multiplier;
};

Direction strong_direction(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, ManifoldSide side)
{
	const Mat m = orbit_jacobian(sys, orbit, 0);
	Eigen::EigenSolver<Mat> solver(m);
	if (solver.info() != Eigen::Success)
		throw Error("eigenvalue computation failed");
	const auto& values = solver.eigenvalues();

	Eigen::Index pick = 0;
	for (Eigen::Index i = 1; i < values.size(); ++i) {
		const bool better = side == ManifoldSide::Unstable ? std::abs(values[i]) > std::abs(values[pick])
		                                                   : std::abs(values[i]) < std::abs(values[pick]);
		if (better)
			pick = i;
	}
	const auto lambda = values[pick];
	const double r = std::abs(lambda);
	const bool hyperbolic = side == ManifoldSide::Unstable ? r > 1.0 + 1e-9 : r < 1.0 - 1e-9;
	bool isolated = std::abs(lambda.imag()) <= 1e-12 * r;
	for (Eigen::Index i = 0; i < values.size(); ++i) {
		if (i == pick)
			continue;
		const double other = std::abs(values[i]);
		if (side == ManifoldSide::Unstable ? !(r > other * (1.0 + 1e-9)) : !(r * (1.0 + 1e-9) < other))
			isolated = false;
	}
	if (!hyperbolic || !isolated)
		throw Error(std::string("no one-dimensional strong ") +
		            (side == ManifoldSide::Unstable ? "unstable" : "stable") + " direction at the orbit");

	Vec v = solver.eigenvectors().col(pick).real();
	v.normalize();
	for (Eigen::Index i = 0; i < v.size(); ++i) {
		if (std::abs(v[i]) > 1e-12) {
			if (v[i] < 0.0)
				v = -v;
			break;
		}
	}
	return {v, lambda.real()};
}

struct Sample
{
	double s;
	Vec point;
	bool inside;
};

class BranchGrower
{
public:
	BranchGrower(const SmoothSystem& sys, const Vec& anchor, const Vec& direction, int steps_per_level,
	             const ManifoldOptions& options)
	    : sys_(sys), anchor_(anchor), direction_(direction), steps_(steps_per_level), options_(options)
	{
	}

	Vec image(const Vec& x) const { return sys_.iterate(x, steps_); }

	Sample evaluate(double s, int level) const
	{
		Vec x = sys_.wrap(anchor_ + s * direction_);
		for (int k = 0; k < level; ++k) {
			x = image(x);
			if (!x.allFinite())
				break;
		}
		return {s, x, admissible(x)};
	}

	bool admissible(const Vec& x) const { return x.allFinite() && (!sys_.domain || sys_.domain->contains(x)); }

	// Inserts samples between a and b until consecutive inside points are
	// within mesh; `joined` gets one flag per appended point telling whether
	// it connects to its predecessor.
	void refine(const Sample& a, const Sample& b, int level, std::vector<Sample>& out, std::vector<bool>& joined)
	{
		struct Gap
		{
			Sample a, b;
		};
		std::vector<Gap> stack{{a, b}};
		while (!stack.empty()) {
			Gap gap = std::move(stack.back());
			stack.pop_back();
			const bool close = gap.a.inside && gap.b.inside && sys_.distance(gap.a.point, gap.b.point) <= options_.mesh;
			const bool tiny = std::abs(gap.b.s - gap.a.s) <= 1e-13 * std::max(std::abs(gap.a.s), std::abs(gap.b.s));
			if (close || tiny || (!gap.a.inside && !gap.b.inside) || budget_exhausted()) {
				if (gap.b.inside) {
					out.push_back(gap.b);
					joined.push_back(close);
				}
				continue;
			}
			Sample mid = evaluate(0.5 * (gap.a.s + gap.b.s), level);
			++evaluations_;
			saw_outside_ = saw_outside_ || !mid.inside;
			// Right half is processed after the left half.
			stack.push_back({mid, gap.b});
			stack.push_back({gap.a, std::move(mid)});
		}
	}

	bool budget_exhausted() const { return evaluations_ > options_.max_points; }
	bool saw_outside() const { return saw_outside_; }

private:
	const SmoothSystem& sys_;
	Vec anchor_;
	Vec direction_;
	int steps_;
	const ManifoldOptions& options_;
	std::size_t evaluations_ = 0;
	bool saw_outside_ = false;
};

} // namespace

std::size_t ManifoldPolyline::point_count() const
{
	std::size_t n = 0;
	for (const auto& b : branches)
		n += b.size();
	return n;
}

void ManifoldPolyline::write_csv(std::ostream& out) const
{
	const auto old = out.precision(17);
	const auto dim = anchor.size();
	out << (dim == 3 ? "branch,x,y,z\n" : "branch,x,y\n");
	for (std::size_t b = 0; b < branches.size(); ++b) {
		for (const auto& p : branches[b]) {
			out << b;
			for (Eigen::Index i = 0; i < dim; ++i)
				out << ',' << p[i];
			out << '\n';
		}
	}
	out.precision(old);
}

ManifoldPolyline grow_manifold(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, ManifoldSide side,
                               double target_arclength, const ManifoldOptions& options)
{
	if (orbit.points.empty())
		throw Error("orbit has no points");
	if (side == ManifoldSide::Stable && !sys.has_inverse())
		throw Error("stable manifold needs the inverse map");
	if (!(options.mesh > 0.0) || !(options.seed_offset > 0.0))
		throw Error("manifold mesh and seed offset must be positive");

	const Direction dir = strong_direction(sys, orbit, side);
	// Negative multipliers flip the branches; iterate twice per level.
	const int repeats = dir.multiplier < 0.0 ? 2 : 1;
	const int steps = repeats * orbit.period * (side == ManifoldSide::Unstable ? 1 : -1);
	double factor = std::pow(std::abs(dir.multiplier), repeats);
	if (side == ManifoldSide::Stable)
		factor = 1.0 / factor;

	ManifoldPolyline poly;
	poly.anchor = orbit.points.front();
	poly.side = side;
	poly.direction = dir.vector;
	poly.multiplier = dir.multiplier;

	const double delta = options.seed_offset;
	constexpr int initial = 16;
	for (double sign : {1.0, -1.0}) {
		BranchGrower grower(sys, poly.anchor, sign * dir.vector, steps, options);
		std::vector<Vec> points{poly.anchor};
		std::vector<std::size_t> breaks;
		double length = 0.0;
		bool done = false;

		auto append = [&](const Sample& sample, bool joined) {
			if (joined) {
				length += sys.distance(points.back(), sample.point);
			} else {
				breaks.push_back(points.size());
			}
			points.push_back(sample.point);
			if (length >= target_arclength)
				done = true;
		};

		// Level 0: the fundamental domain [delta, delta * factor] on the
		// eigendirection.
		std::vector<Sample> level;
		for (int j = 0; j <= initial; ++j)
			level.push_back(grower.evaluate(delta * std::pow(factor, static_cast<double>(j) / initial), 0));

		for (int k = 0; k <= options.max_levels && !done; ++k) {
			if (k > 0) {
				std::vector<Sample> next;
				next.reserve(level.size());
				for (const auto& sample : level) {
					if (!sample.inside)
						continue;
					Vec x = grower.image(sample.point);
					const bool inside = grower.admissible(x);
					next.push_back({sample.s, std::move(x), inside});
				}
				level = std::move(next);
			}
			if (level.empty() || grower.budget_exhausted()) {
				poly.left_domain = poly.left_domain || level.empty();
				break;
			}

			std::vector<Sample> refined;
			std::vector<bool> joined;
			if (level.front().inside) {
				refined.push_back(level.front());
				joined.push_back(true);
			}
			for (std::size_t i = 1; i < level.size(); ++i)
				grower.refine(level[i - 1], level[i], k, refined, joined);
			for (const auto& sample : level)
				poly.left_domain = poly.left_domain || !sample.inside;
			poly.left_domain = poly.left_domain || grower.saw_outside();

			// The first sample of each level repeats the last of the
			// previous one up to the linearization error.
			for (std::size_t i = 0; i < refined.size() && !done; ++i) {
				const bool connected =
				    i == 0 ? sys.distance(points.back(), refined[i].point) <= options.mesh : static_cast<bool>(joined[i]);
				append(refined[i], connected);
			}
			level = std::move(refined);
		}
		poly.arclength += length;
		poly.branches.push_back(std::move(points));
		poly.breaks.push_back(std::move(breaks));
	}
	return poly;
}

} // namespace phcm
