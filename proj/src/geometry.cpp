#include "phcm/geometry.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <Eigen/SVD>

#include "parallel.hpp"

namespace phcm {

void ConeField::validate() const
{
	if (!(chi > 0.0 && chi < 1.0))
		throw Error("cone aperture chi must lie in (0, 1)");
	if (!(r0 > 0.0) || !(length_bound > 0.0))
		throw Error("cone radius r0 and length bound L must be positive");
	if (!central)
		throw Error("cone field has no central direction");
	if (tangency_samples < 2)
		throw Error("tangency test needs at least two samples");
}

bool in_cone(const ConeField& cone, const Vec& x, const Vec& v)
{
	const double norm = v.norm();
	if (!(norm > 0.0))
		throw Error("cone membership of the zero vector is undefined");
	const Vec u = cone.central(x).normalized();
	return std::abs(v.dot(u)) > (1.0 - cone.chi) * norm;
}

const char* position_name(Position p)
{
	switch (p) {
	case Position::Below:
		return "below";
	case Position::Above:
		return "above";
	case Position::Both:
		return "both";
	case Position::Incomparable:
		break;
	}
	return "incomparable";
}

namespace {

struct Candidate
{
	double leaf_offset; // distance of the leaf from the target leaf
	double sigma;       // h(B) - h(A)
	Vec a;
	Vec b;
};

// Coordinates of the straight-leaf foliation: a unit leaf direction d and an
// orthonormal basis of its complement.
struct Foliation
{
	Vec origin;
	Vec d;
	Mat transversal;

	Foliation(const Vec& center, Vec direction) : origin(center), d(std::move(direction))
	{
		const auto n = d.size();
		const Eigen::HouseholderQR<Mat> qr{Mat(d)};
		const Mat q = qr.householderQ();
		transversal = q.rightCols(n - 1);
	}

	Vec project(const Vec& x) const { return transversal.transpose() * (x - origin); }
	double height(const Vec& x) const { return d.dot(x - origin); }
};

Vec nearest_on_segment(const Vec& a0, const Vec& a1, const Vec& x)
{
	const Vec e = a1 - a0;
	const double len2 = e.squaredNorm();
	if (len2 == 0.0)
		return a0;
	const double t = std::clamp((x - a0).dot(e) / len2, 0.0, 1.0);
	return a0 + t * e;
}

std::vector<std::pair<Vec, Vec>> segments_of(const Polyline& line)
{
	std::vector<std::pair<Vec, Vec>> out;
	if (line.size() == 1)
		out.emplace_back(line[0], line[0]);
	for (std::size_t i = 0; i + 1 < line.size(); ++i)
		out.emplace_back(line[i], line[i + 1]);
	return out;
}

// Point of segment [a0, a1] on the leaf through transversal coordinate s;
// a segment lying inside one leaf returns its point nearest `fallback`.
Vec on_leaf(const Foliation& fol, const Vec& a0, const Vec& a1, const Vec& s, const Vec& fallback)
{
	const Vec pa = fol.project(a0);
	const Vec pb = fol.project(a1);
	const Vec e = pb - pa;
	const double len2 = e.squaredNorm();
	if (len2 <= 1e-28 * std::max(1.0, (a1 - a0).squaredNorm()))
		return nearest_on_segment(a0, a1, fallback);
	const double t = std::clamp((s - pa).dot(e) / len2, 0.0, 1.0);
	return a0 + t * (a1 - a0);
}

// Transversal coordinates of the leaves meeting both projected segments.
std::optional<Vec> common_leaf(const Foliation& fol, const std::pair<Vec, Vec>& a, const std::pair<Vec, Vec>& b,
                               const Vec& target)
{
	const Vec a0 = fol.project(a.first), a1 = fol.project(a.second);
	const Vec b0 = fol.project(b.first), b1 = fol.project(b.second);
	constexpr double tol = 1e-12;
	if (a0.size() == 1) {
		const double lo = std::max(std::min(a0[0], a1[0]), std::min(b0[0], b1[0]));
		const double hi = std::min(std::max(a0[0], a1[0]), std::max(b0[0], b1[0]));
		if (lo > hi + tol)
			return std::nullopt;
		Vec s(1);
		s[0] = std::clamp(target[0], lo, std::max(lo, hi));
		return s;
	}
	// Two-dimensional transversal: crossing of the projected segments.
	const Vec da = a1 - a0, db = b1 - b0;
	const double la = da.norm(), lb = db.norm();
	if (la <= tol && lb <= tol) {
		if ((a0 - b0).norm() <= tol)
			return a0;
		return std::nullopt;
	}
	if (la <= tol || lb <= tol) {
		const Vec point = la <= tol ? a0 : b0;
		const Vec s0 = la <= tol ? b0 : a0;
		const Vec e = la <= tol ? db : da;
		const double t = std::clamp((point - s0).dot(e) / e.squaredNorm(), 0.0, 1.0);
		if ((s0 + t * e - point).norm() <= tol)
			return point;
		return std::nullopt;
	}
	const double denom = da[0] * db[1] - da[1] * db[0];
	if (std::abs(denom) <= 1e-14 * la * lb)
		return std::nullopt;
	const Vec off = b0 - a0;
	const double t = (off[0] * db[1] - off[1] * db[0]) / denom;
	const double u = (off[0] * da[1] - off[1] * da[0]) / denom;
	if (t < -tol || t > 1.0 + tol || u < -tol || u > 1.0 + tol)
		return std::nullopt;
	return Vec(a0 + std::clamp(t, 0.0, 1.0) * da);
}

bool cone_tangent(const ConeField& cone, const Vec& a, const Vec& b, const Vec& d)
{
	if ((b - a).norm() == 0.0)
		return in_cone(cone, a, d);
	for (int j = 0; j < cone.tangency_samples; ++j) {
		const double t = static_cast<double>(j) / (cone.tangency_samples - 1);
		if (!in_cone(cone, a + t * (b - a), d))
			return false;
	}
	return true;
}

} // namespace

PositionVerdict position(const ConeField& cone, const OrientedBall& ball, const Vec& p, const Vec& q,
                         const Polyline& wuu_p, const Polyline& wss_q)
{
	cone.validate();
	if (p.size() < 2)
		throw Error("relative position needs dimension at least 2");
	if (wuu_p.empty() || wss_q.empty())
		throw Error("local manifolds must be non-empty polylines");

	Vec d = cone.central(ball.center).normalized();
	const double align = d.dot(ball.orientation);
	if (align == 0.0)
		throw Error("orientation form vanishes on the central direction");
	if (align < 0.0)
		d = -d;
	const Foliation fol(ball.center, d);
	const Vec target = fol.project(p);

	PositionVerdict verdict;
	if ((p - ball.center).norm() > cone.r0 || (q - ball.center).norm() > cone.r0)
		return verdict;

	std::vector<Candidate> candidates;
	const auto as = segments_of(wuu_p);
	const auto bs = segments_of(wss_q);
	for (const auto& a : as) {
		for (const auto& b : bs) {
			const auto leaf = common_leaf(fol, a, b, target);
			if (!leaf)
				continue;
			Vec pa = on_leaf(fol, a.first, a.second, *leaf, p);
			Vec pb = on_leaf(fol, b.first, b.second, *leaf, q);
			// Snap both ends onto one leaf through A.
			const Vec onto = pa + (fol.height(pb) - fol.height(pa)) * d;
			if ((onto - pb).norm() > 1e-9 * std::max(1.0, pb.norm()))
				continue;
			pb = onto;
			if ((pa - ball.center).norm() > cone.r0 || (pb - ball.center).norm() > cone.r0)
				continue;
			const double sigma = fol.height(pb) - fol.height(pa);
			if (!(std::abs(sigma) < cone.length_bound))
				continue;
			if (!cone_tangent(cone, pa, pb, d))
				continue;
			candidates.push_back({(*leaf - target).norm(), sigma, std::move(pa), std::move(pb)});
		}
	}
	if (candidates.empty())
		return verdict;

	const Candidate* primary = &candidates.front();
	for (const auto& c : candidates) {
		if (c.leaf_offset < primary->leaf_offset ||
		    (c.leaf_offset == primary->leaf_offset && std::abs(c.sigma) < std::abs(primary->sigma)))
			primary = &c;
	}
	verdict.position = primary->sigma >= 0.0 ? Position::Below : Position::Above;
	verdict.witness = {primary->a, primary->b};
	verdict.signed_length = primary->sigma;
	if (primary->sigma != 0.0) {
		for (const auto& c : candidates) {
			if (c.sigma * primary->sigma < 0.0) {
				verdict.position = Position::Both;
				verdict.second_witness = {c.a, c.b};
				verdict.second_signed_length = c.sigma;
				break;
			}
		}
	}
	return verdict;
}

namespace {

bool twisted(Position pq, Position qp)
{
	const auto below = [](Position x) { return x == Position::Below || x == Position::Both; };
	const auto above = [](Position x) { return x == Position::Above || x == Position::Both; };
	return (below(pq) && below(qp)) || (above(pq) && above(qp));
}

bool twisted_in(const ConeField& cone, const OrientedBall& ball, const Vec& p, const LocalManifolds& mp,
                const Vec& q, const LocalManifolds& mq)
{
	const auto pq = position(cone, ball, p, q, mp.strong_unstable, mq.strong_stable);
	const auto qp = position(cone, ball, q, p, mq.strong_unstable, mp.strong_stable);
	if (pq.position == Position::Incomparable || qp.position == Position::Incomparable)
		throw Error("points not comparable at r₀");
	return twisted(pq.position, qp.position);
}

} // namespace

bool twisted_position(const ConeField& cone, const Vec& p, const LocalManifolds& mp, const Vec& q,
                      const LocalManifolds& mq)
{
	OrientedBall ball{0.5 * (p + q), Vec()};
	ball.orientation = cone.central(ball.center);
	const bool verdict = twisted_in(cone, ball, p, mp, q, mq);
	ball.orientation = -ball.orientation;
	if (twisted_in(cone, ball, p, mp, q, mq) != verdict)
		throw Error("twisted position depends on the ball orientation");
	return verdict;
}

TwistedReturns has_twisted_returns(const ConeField& cone, const std::vector<Vec>& orbit,
                                   const std::vector<LocalManifolds>& manifolds, double epsilon)
{
	if (orbit.size() != manifolds.size())
		throw Error("every orbit point needs its local manifolds");
	const std::size_t n = orbit.size();
	std::vector<std::optional<std::size_t>> first(n);
	std::vector<std::size_t> close(n, 0);
	std::vector<std::exception_ptr> failure(n);
	detail::parallel_for(
	    n,
	    [&](std::size_t i) {
		    try {
			    for (std::size_t j = i + 1; j < n; ++j) {
				    if (!((orbit[i] - orbit[j]).norm() < epsilon))
					    continue;
				    ++close[i];
				    if (!twisted_position(cone, orbit[i], manifolds[i], orbit[j], manifolds[j])) {
					    first[i] = j;
					    return;
				    }
			    }
		    } catch (...) {
			    failure[i] = std::current_exception();
		    }
	    },
	    8);

	TwistedReturns result;
	for (std::size_t i = 0; i < n; ++i) {
		if (failure[i])
			std::rethrow_exception(failure[i]);
		result.close_pairs += close[i];
		if (first[i]) {
			result.holds = false;
			result.violation = std::make_pair(i, *first[i]);
			return result;
		}
	}
	return result;
}

namespace {

template<typename Distance>
ReturnPair closest_pair(std::size_t period, Distance&& distance)
{
	if (period < 2)
		throw Error("period ≥ 2 required");
	ReturnPair best{0, 0, std::numeric_limits<double>::infinity()};
	for (std::size_t k = 1; k < period; ++k) {
		for (std::size_t i = 0; i < period; ++i) {
			const double d = distance(i, (i + k) % period);
			if (d < best.distance * (1.0 - 1e-12))
				best = {i, k, d};
		}
	}
	return best;
}

} // namespace

ReturnPair closest_return_pair(const std::vector<Vec>& orbit)
{
	return closest_pair(orbit.size(), [&](std::size_t a, std::size_t b) { return (orbit[a] - orbit[b]).norm(); });
}

ReturnPair closest_return_pair(const SmoothSystem& sys, const std::vector<Vec>& orbit)
{
	return closest_pair(orbit.size(), [&](std::size_t a, std::size_t b) { return sys.distance(orbit[a], orbit[b]); });
}

std::pair<double, double> periodic_contraction_products(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit,
                                                        const Bundle& e, const Bundle& f, int n)
{
	const std::size_t tau = orbit.points.size();
	if (tau == 0 || e.size() != tau || f.size() != tau)
		throw Error("contraction products need one subspace per orbit point");
	if (n < 1)
		throw Error("iterate count must be positive");

	const auto restricted_norm = [](const Mat& m, const Mat& basis) {
		const Mat q = Eigen::HouseholderQR<Mat>(basis).householderQ() * Mat::Identity(basis.rows(), basis.cols());
		return Eigen::JacobiSVD<Mat>(m * q).singularValues().maxCoeff();
	};

	double forward = 1.0, backward = 1.0;
	const auto t = static_cast<long>(tau);
	for (std::size_t k = 1; k <= tau; ++k) {
		const std::size_t at = k % tau;
		forward *= restricted_norm(sys.jacobian_product(orbit.points[at], n), e[at]);
		// Df^-N at x is the inverse of Df^N at f^-N(x).
		const auto from = static_cast<std::size_t>(((static_cast<long>(at) - n) % t + t) % t);
		const Mat back = sys.jacobian_product(orbit.points[from], n).inverse();
		backward *= restricted_norm(back, f[at]);
	}
	return {forward, backward};
}

nlohmann::json PositionVerdict::to_json() const
{
	auto line = [](const Polyline& poly) {
		auto j = nlohmann::json::array();
		for (const auto& p : poly)
			j.push_back(std::vector<double>(p.data(), p.data() + p.size()));
		return j;
	};
	nlohmann::json j{{"position", position_name(position)}, {"signed_length", signed_length}, {"witness", line(witness)}};
	if (position == Position::Both) {
		j["second_witness"] = line(second_witness);
		j["second_signed_length"] = second_signed_length;
	}
	return j;
}

} // namespace phcm
