#include "phcm/smooth.hpp"

#include <algorithm>
#include <cmath>

namespace phcm {

namespace {

constexpr double band = 1e-9;

// f^tau(x) - x on the chart, with Df^tau along the orbit.
std::pair<Vec, Mat> residual(const SmoothSystem& sys, const Vec& x, int period)
{
	Vec y = x;
	Mat m = Mat::Identity(sys.dimension, sys.dimension);
	for (int k = 0; k < period; ++k) {
		m = sys.jacobian(y) * m;
		y = sys.step(y);
	}
	return {sys.displacement(x, y), m};
}

bool finite(const Vec& v)
{
	return v.allFinite();
}

} // namespace

const char* orbit_type_name(OrbitType type)
{
	switch (type) {
	case OrbitType::Saddle:
		return "saddle";
	case OrbitType::Sink:
		return "sink";
	case OrbitType::Source:
		return "source";
	case OrbitType::Nonhyperbolic:
		break;
	}
	return "nonhyperbolic";
}

Mat orbit_jacobian(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, std::size_t anchor)
{
	Mat m = Mat::Identity(sys.dimension, sys.dimension);
	const std::size_t tau = orbit.points.size();
	for (std::size_t k = 0; k < tau; ++k)
		m = sys.jacobian(orbit.points[(anchor + k) % tau]) * m;
	return m;
}

void classify_orbit(const SmoothSystem& sys, PeriodicOrbitRecord& orbit)
{
	const Mat m = orbit_jacobian(sys, orbit);
	Eigen::EigenSolver<Mat> solver(m, false);
	if (solver.info() != Eigen::Success)
		throw Error("eigenvalue computation failed");
	orbit.multipliers.clear();
	for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i)
		orbit.multipliers.push_back(solver.eigenvalues()[i]);
	std::sort(orbit.multipliers.begin(), orbit.multipliers.end(), [](auto a, auto b) {
		if (std::abs(a) != std::abs(b))
			return std::abs(a) < std::abs(b);
		return std::arg(a) < std::arg(b);
	});

	int stable = 0, unstable = 0;
	bool central = false;
	for (auto lambda : orbit.multipliers) {
		const double r = std::abs(lambda);
		if (r < 1.0 - band)
			++stable;
		else if (r > 1.0 + band)
			++unstable;
		else
			central = true;
	}
	orbit.stable_dim = stable;
	if (central)
		orbit.type = OrbitType::Nonhyperbolic;
	else if (unstable == 0)
		orbit.type = OrbitType::Sink;
	else if (stable == 0)
		orbit.type = OrbitType::Source;
	else
		orbit.type = OrbitType::Saddle;
}

PeriodicOrbitRecord make_orbit(const SmoothSystem& sys, const Vec& point, int period)
{
	if (period < 1)
		throw Error("period must be at least 1");
	PeriodicOrbitRecord orbit;
	orbit.period = period;
	Vec x = sys.wrap(point);
	for (int k = 0; k < period; ++k) {
		orbit.points.push_back(x);
		x = sys.step(x);
	}
	orbit.residual = sys.distance(orbit.points.front(), x);
	orbit.minimal_period = period;
	for (int d = 1; d < period; ++d) {
		if (period % d == 0 && sys.distance(orbit.points[static_cast<std::size_t>(d)], orbit.points.front()) < 1e-8) {
			orbit.minimal_period = d;
			break;
		}
	}
	classify_orbit(sys, orbit);
	return orbit;
}

std::optional<PeriodicOrbitRecord> find_periodic_orbit(const SmoothSystem& sys, int period, const Vec& seed,
                                                       const NewtonOptions& options)
{
	if (period < 1)
		throw Error("period must be at least 1");
	if (seed.size() != sys.dimension)
		throw Error("seed has the wrong dimension");

	const Mat id = Mat::Identity(sys.dimension, sys.dimension);
	Vec x = sys.wrap(seed);
	auto [r, m] = residual(sys, x, period);
	double norm = r.norm();
	double mu = 1e-6;

	for (int it = 0; it < options.max_steps && norm >= options.tolerance; ++it) {
		const Mat j = m - id;
		Vec dx;
		Eigen::ColPivHouseholderQR<Mat> qr(j);
		if (qr.rank() == sys.dimension)
			dx = qr.solve(-r);
		if (!dx.size() || !finite(dx)) {
			// Levenberg-Marquardt step on a singular Newton matrix.
			dx = (j.transpose() * j + mu * id).ldlt().solve(-j.transpose() * r);
			mu *= 10.0;
		}
		if (!finite(dx) || dx.norm() == 0.0)
			return std::nullopt;

		// Backtracking: halve until the residual decreases.
		bool accepted = false;
		double scale = 1.0;
		for (int half = 0; half < 30; ++half, scale *= 0.5) {
			const Vec trial = sys.wrap(x + scale * dx);
			auto [tr, tm] = residual(sys, trial, period);
			const double tn = tr.norm();
			if (std::isfinite(tn) && tn < norm) {
				x = trial;
				r = std::move(tr);
				m = std::move(tm);
				norm = tn;
				accepted = true;
				break;
			}
		}
		if (!accepted)
			return std::nullopt;
	}
	if (!(norm < options.tolerance))
		return std::nullopt;

	PeriodicOrbitRecord orbit = make_orbit(sys, x, period);
	orbit.residual = norm;
	return orbit;
}

nlohmann::json PeriodicOrbitRecord::to_json() const
{
	nlohmann::json j;
	j["period"] = period;
	j["minimal_period"] = minimal_period;
	j["type"] = orbit_type_name(type);
	j["stable_dim"] = stable_dim;
	j["residual"] = residual;
	auto& pts = j["points"] = nlohmann::json::array();
	for (const auto& p : points)
		pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
	auto& mult = j["multipliers"] = nlohmann::json::array();
	for (auto lambda : multipliers)
		mult.push_back({lambda.real(), lambda.imag()});
	return j;
}

} // namespace phcm
