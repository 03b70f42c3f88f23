#include "phcm/smooth.hpp"

#include <cmath>

namespace phcm {

bool Box::contains(const Vec& x) const
{
	for (Eigen::Index i = 0; i < x.size(); ++i)
		if (!(x[i] >= lower[i] && x[i] <= upper[i]))
			return false;
	return true;
}

bool SmoothSystem::is_periodic() const
{
	for (double p : periods)
		if (p > 0.0)
			return true;
	return false;
}

Vec SmoothSystem::wrap(const Vec& x) const
{
	Vec y = x;
	for (std::size_t i = 0; i < periods.size(); ++i) {
		const double p = periods[i];
		if (p <= 0.0)
			continue;
		double v = x[static_cast<Eigen::Index>(i)];
		v -= p * std::floor(v / p);
		if (v >= p)
			v = 0.0;
		y[static_cast<Eigen::Index>(i)] = v;
	}
	return y;
}

Vec SmoothSystem::displacement(const Vec& a, const Vec& b) const
{
	Vec d = b - a;
	for (std::size_t i = 0; i < periods.size(); ++i) {
		const double p = periods[i];
		if (p > 0.0) {
			auto& v = d[static_cast<Eigen::Index>(i)];
			v -= p * std::round(v / p);
		}
	}
	return d;
}

double SmoothSystem::distance(const Vec& a, const Vec& b) const
{
	return displacement(a, b).norm();
}

Vec SmoothSystem::step_back(const Vec& x) const
{
	if (!inverse)
		throw Error("system '" + name + "' has no inverse");
	return wrap(inverse(x));
}

Vec SmoothSystem::iterate(Vec x, int n) const
{
	for (int k = 0; k < n; ++k)
		x = step(x);
	for (int k = 0; k > n; --k)
		x = step_back(x);
	return x;
}

Mat SmoothSystem::jacobian_product(const Vec& x0, int n) const
{
	Mat m = Mat::Identity(dimension, dimension);
	Vec x = x0;
	for (int k = 0; k < n; ++k) {
		m = jacobian(x) * m;
		x = step(x);
	}
	return m;
}

Metric SmoothSystem::metric() const
{
	if (!is_periodic())
		return metrics::euclidean();
	std::vector<double> p = periods;
	p.resize(static_cast<std::size_t>(dimension), 0.0);
	return metrics::periodic(std::move(p));
}

double jacobian_consistency_error(const SmoothSystem& sys, const Vec& x, double h)
{
	const Mat j = sys.jacobian(x);
	Mat fd(sys.dimension, sys.dimension);
	for (int c = 0; c < sys.dimension; ++c) {
		Vec xp = x, xm = x;
		xp[c] += h;
		xm[c] -= h;
		fd.col(c) = (sys.evaluate(xp) - sys.evaluate(xm)) / (2.0 * h);
	}
	return (j - fd).norm() / std::max(j.norm(), 1e-12);
}

} // namespace phcm
