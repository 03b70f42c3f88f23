#include "phcm/smooth.hpp"

#include <Eigen/SVD>

namespace phcm {

namespace {

Mat orthonormal(const Mat& basis)
{
	if (basis.cols() == 0)
		return basis;
	Eigen::HouseholderQR<Mat> qr(basis);
	const Mat q = qr.householderQ() * Mat::Identity(basis.rows(), basis.cols());
	Eigen::JacobiSVD<Mat> svd(basis);
	if (svd.singularValues().minCoeff() < 1e-12 * std::max(1.0, svd.singularValues().maxCoeff()))
		throw Error("bundle basis is rank deficient");
	return q;
}

void check_bundle(const SmoothSystem& sys, const std::vector<Vec>& points, const Bundle& e)
{
	if (e.size() != points.size())
		throw Error("bundle needs one subspace per sample point");
	for (const auto& b : e) {
		if (b.rows() != sys.dimension)
			throw Error("bundle basis has the wrong ambient dimension");
		if (b.cols() != e.front().cols())
			throw Error("bundle rank varies across the sample");
	}
}

Eigen::VectorXd singular_values(const Mat& m)
{
	return Eigen::JacobiSVD<Mat>(m).singularValues();
}

template<typename Ratio>
RatioCheck worst(std::size_t count, double threshold, Ratio&& ratio)
{
	RatioCheck check;
	for (std::size_t i = 0; i < count; ++i) {
		const double r = ratio(i);
		if (i == 0 || r > check.worst_ratio) {
			check.worst_ratio = r;
			check.worst_index = i;
		}
	}
	check.passed = check.worst_ratio <= threshold;
	return check;
}

Mat stack(const Mat& a, const Mat& b)
{
	Mat m(a.rows(), a.cols() + b.cols());
	m << a, b;
	return m;
}

} // namespace

RatioCheck check_uniform_contraction(const SmoothSystem& sys, const std::vector<Vec>& points, const Bundle& e,
                                     int n)
{
	check_bundle(sys, points, e);
	if (points.empty() || e.front().cols() == 0)
		return {true, 0.0, 0};
	return worst(points.size(), 0.5, [&](std::size_t i) {
		const Mat image = sys.jacobian_product(points[i], n) * orthonormal(e[i]);
		return singular_values(image).maxCoeff();
	});
}

RatioCheck check_uniform_expansion(const SmoothSystem& sys, const std::vector<Vec>& points, const Bundle& e, int n)
{
	check_bundle(sys, points, e);
	if (points.empty() || e.front().cols() == 0)
		return {true, 0.0, 0};
	return worst(points.size(), 0.5, [&](std::size_t i) {
		const Mat image = sys.jacobian_product(points[i], n) * orthonormal(e[i]);
		return 1.0 / singular_values(image).minCoeff();
	});
}

RatioCheck check_dominated_splitting(const SmoothSystem& sys, const std::vector<Vec>& points, const Bundle& e,
                                     const Bundle& f, int n)
{
	check_bundle(sys, points, e);
	check_bundle(sys, points, f);
	for (std::size_t i = 0; i < points.size(); ++i) {
		const Mat both = stack(orthonormal(e[i]), orthonormal(f[i]));
		if (both.cols() != sys.dimension || singular_values(both).minCoeff() < 1e-10)
			throw Error("splitting degenerate");
	}
	return worst(points.size(), 1.0, [&](std::size_t i) {
		const Mat d = sys.jacobian_product(points[i], n);
		const double top = singular_values(d * orthonormal(e[i])).maxCoeff();
		const double bottom = singular_values(d * orthonormal(f[i])).minCoeff();
		return 2.0 * top / bottom;
	});
}

PartialHyperbolicityReport check_partial_hyperbolicity(const SmoothSystem& sys, const SplittingSample& sample)
{
	const auto& pts = sample.points;
	check_bundle(sys, pts, sample.ess);
	check_bundle(sys, pts, sample.ec);
	check_bundle(sys, pts, sample.euu);
	if (pts.empty())
		throw Error("splitting sample is empty");
	const auto ss = sample.ess.front().cols();
	const auto uu = sample.euu.front().cols();
	if (ss + sample.ec.front().cols() + uu != sys.dimension)
		throw Error("splitting dimensions do not add up to the ambient dimension");
	if (ss == 0 && uu == 0)
		throw Error("partial hyperbolicity needs a non-trivial extremal bundle");

	PartialHyperbolicityReport report;
	report.stable_domination = {true, 0.0, 0};
	report.unstable_domination = {true, 0.0, 0};
	if (ss > 0) {
		Bundle rest(pts.size());
		for (std::size_t i = 0; i < pts.size(); ++i)
			rest[i] = stack(sample.ec[i], sample.euu[i]);
		report.stable_domination = check_dominated_splitting(sys, pts, sample.ess, rest, sample.n);
	}
	if (uu > 0) {
		Bundle rest(pts.size());
		for (std::size_t i = 0; i < pts.size(); ++i)
			rest[i] = stack(sample.ess[i], sample.ec[i]);
		report.unstable_domination = check_dominated_splitting(sys, pts, rest, sample.euu, sample.n);
	}
	report.contraction = check_uniform_contraction(sys, pts, sample.ess, sample.n);
	report.expansion = check_uniform_expansion(sys, pts, sample.euu, sample.n);
	report.overall = report.stable_domination.passed && report.unstable_domination.passed &&
	                 report.contraction.passed && report.expansion.passed;
	return report;
}

nlohmann::json PartialHyperbolicityReport::to_json() const
{
	auto entry = [](const RatioCheck& c) {
		return nlohmann::json{{"passed", c.passed}, {"worst_ratio", c.worst_ratio}, {"worst_index", c.worst_index}};
	};
	return {{"stable_domination", entry(stable_domination)},
	        {"unstable_domination", entry(unstable_domination)},
	        {"contraction", entry(contraction)},
	        {"expansion", entry(expansion)},
	        {"overall", overall}};
}

} // namespace phcm
