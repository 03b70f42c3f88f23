#pragma once

/**
 * Explicit smooth maps on R^n or on charts with periodic coordinates
 * (torus / annulus), with periodic orbits, the domination and contraction
 * inequalities, one-dimensional invariant manifolds, homoclinic crossings
 * and orientation covers of one-dimensional bundles.
 */

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "phcm/chain.hpp"
#include "phcm/error.hpp"

namespace phcm {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct Box
{
	Vec lower;
	Vec upper;

	bool contains(const Vec& x) const;
};

struct SmoothSystem
{
	std::string name;
	int dimension = 0;
	// Map on the lift; wrap() reduces into the chart.
	std::function<Vec(const Vec&)> evaluate;
	std::function<Mat(const Vec&)> jacobian;
	std::function<Vec(const Vec&)> inverse; // optional
	// Per-coordinate period, 0 for a Euclidean coordinate.
	std::vector<double> periods;
	// Region outside of which manifold growth stops (optional).
	std::optional<Box> domain;

	bool has_inverse() const { return static_cast<bool>(inverse); }
	bool is_periodic() const;

	Vec wrap(const Vec& x) const;
	// Shortest-representative b - a.
	Vec displacement(const Vec& a, const Vec& b) const;
	double distance(const Vec& a, const Vec& b) const;

	Vec step(const Vec& x) const { return wrap(evaluate(x)); }
	Vec step_back(const Vec& x) const;
	Vec iterate(Vec x, int n) const;

	// Df^n at x along the true orbit.
	Mat jacobian_product(const Vec& x, int n) const;

	Metric metric() const;
};

// Relative error between the declared Jacobian and a central difference.
double jacobian_consistency_error(const SmoothSystem& sys, const Vec& x, double h = 1e-6);

// ---------------------------------------------------------------------------
// Periodic orbits

enum class OrbitType { Saddle, Sink, Source, Nonhyperbolic };

const char* orbit_type_name(OrbitType type);

struct PeriodicOrbitRecord
{
	std::vector<Vec> points;
	int period = 0;
	// Eigenvalues of Df^tau at points[0], sorted by modulus then argument.
	std::vector<std::complex<double>> multipliers;
	int stable_dim = 0;
	OrbitType type = OrbitType::Nonhyperbolic;
	// Smallest d dividing tau with f^d(points[0]) = points[0].
	int minimal_period = 0;
	double residual = 0.0;

	nlohmann::json to_json() const;
};

struct NewtonOptions
{
	double tolerance = 1e-10;
	int max_steps = 100;
};

std::optional<PeriodicOrbitRecord> find_periodic_orbit(const SmoothSystem& sys, int period, const Vec& seed,
                                                       const NewtonOptions& options = {});

// Fills multipliers, stable_dim and type from the orbit points.
void classify_orbit(const SmoothSystem& sys, PeriodicOrbitRecord& orbit);

// Df^tau anchored at points[anchor].
Mat orbit_jacobian(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, std::size_t anchor = 0);

// Orbit record for a known periodic point, without a Newton solve.
PeriodicOrbitRecord make_orbit(const SmoothSystem& sys, const Vec& point, int period);

// ---------------------------------------------------------------------------
// Hyperbolicity inequalities. Bundles are given per sample point as
// matrices whose columns span the subspace (orthonormalized internally).

using Bundle = std::vector<Mat>;

struct RatioCheck
{
	bool passed = false;
	double worst_ratio = 0.0;
	std::size_t worst_index = 0;
};

// max over points of max_{|v|=1, v in E} |Df^N v|; passes iff <= 1/2.
RatioCheck check_uniform_contraction(const SmoothSystem& sys, const std::vector<Vec>& points,
                                     const Bundle& e, int n);

// max over points of 1 / min_{|v|=1, v in E} |Df^N v|; passes iff <= 1/2.
RatioCheck check_uniform_expansion(const SmoothSystem& sys, const std::vector<Vec>& points,
                                   const Bundle& e, int n);

// max over points of 2 max_{u in E} |Df^N u| / min_{v in F} |Df^N v|;
// passes iff <= 1.
RatioCheck check_dominated_splitting(const SmoothSystem& sys, const std::vector<Vec>& points,
                                     const Bundle& e, const Bundle& f, int n);

struct SplittingSample
{
	std::vector<Vec> points;
	Bundle ess;
	Bundle ec;
	Bundle euu;
	int n = 1;
};

struct PartialHyperbolicityReport
{
	RatioCheck stable_domination;   // E^ss vs E^c + E^uu
	RatioCheck unstable_domination; // E^ss + E^c vs E^uu
	RatioCheck contraction;         // E^ss
	RatioCheck expansion;           // E^uu
	bool overall = false;

	nlohmann::json to_json() const;
};

PartialHyperbolicityReport check_partial_hyperbolicity(const SmoothSystem& sys, const SplittingSample& sample);

// ---------------------------------------------------------------------------
// Invariant manifolds

enum class ManifoldSide { Stable, Unstable };

struct ManifoldOptions
{
	double mesh = 1e-3;
	// Distance from the periodic point to the first fundamental domain.
	double seed_offset = 1e-6;
	int max_levels = 400;
	std::size_t max_points = 4'000'000;
};

struct ManifoldPolyline
{
	Vec anchor;
	ManifoldSide side = ManifoldSide::Unstable;
	// Unit eigenvector at the anchor.
	Vec direction;
	double multiplier = 0.0;
	// Both branches, each starting at the anchor. Consecutive points are
	// joined unless the index of the second one is listed in `breaks`.
	std::vector<std::vector<Vec>> branches;
	std::vector<std::vector<std::size_t>> breaks;
	double arclength = 0.0;
	bool left_domain = false;

	std::size_t point_count() const;
	void write_csv(std::ostream& out) const;
};

ManifoldPolyline grow_manifold(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, ManifoldSide side,
                               double target_arclength, const ManifoldOptions& options = {});

// ---------------------------------------------------------------------------
// Homoclinic machinery (planar systems)

struct Crossing
{
	Vec point;
	double angle = 0.0; // acute angle between the two curves, radians
	bool transverse = false;
	// Segment indices and parameters on the unstable / stable polylines.
	std::size_t unstable_branch = 0;
	std::size_t unstable_segment = 0;
	double unstable_t = 0.0;
	std::size_t stable_branch = 0;
	std::size_t stable_segment = 0;
	double stable_t = 0.0;

	nlohmann::json to_json() const;
};

struct HomoclinicOptions
{
	double angle_tolerance = 1e-3;
	// Crossings this close to an orbit point are the orbit point itself.
	double exclusion_radius = 1e-7;
	ManifoldOptions manifold;
};

// All crossings between an unstable and a stable polyline, sorted
// lexicographically by position; `excluded` points are dropped.
std::vector<Crossing> intersect_polylines(const SmoothSystem& sys, const ManifoldPolyline& unstable,
                                          const ManifoldPolyline& stable, const std::vector<Vec>& excluded,
                                          const HomoclinicOptions& options);

std::vector<Crossing> find_transverse_homoclinic(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit,
                                                 double budget, const HomoclinicOptions& options = {});

// True iff a transverse crossing of W^u(p) and W^s(q) is found within the
// budget (Smale's p >= q). False means "not found at this budget".
bool smale_leq(const SmoothSystem& sys, const PeriodicOrbitRecord& p, const PeriodicOrbitRecord& q,
               double budget, const HomoclinicOptions& options = {});

bool homoclinically_related(const SmoothSystem& sys, const PeriodicOrbitRecord& p, const PeriodicOrbitRecord& q,
                            double budget, const HomoclinicOptions& options = {});

using Window = std::function<bool(const Vec&)>;

struct ClassOptions
{
	HomoclinicOptions homoclinic;
	int window_iterates = 50;
	// Orbit samples closer than this to P are taken to follow its local
	// manifolds and stop the iteration.
	double capture_radius = 1e-4;
};

// Transverse homoclinic points of P; with a window U, only points whose
// +-window_iterates orbit samples stay in U (together with P) are kept.
std::vector<Vec> homoclinic_class_points(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit, double budget,
                                         const Window& window = {}, const ClassOptions& options = {});

// ---------------------------------------------------------------------------
// Orientation double cover of a one-dimensional bundle over a finite
// invariant sample. Lift 2i is (x_i, +u(x_i)), lift 2i+1 is (x_i, -u(x_i)).

struct OrientationCover
{
	std::vector<Vec> base;
	std::vector<Vec> directions;
	std::vector<NodeId> base_map;
	std::vector<int> signs;
	std::vector<NodeId> lifted_map;
	bool preserved = false;

	static NodeId sigma(NodeId lift) { return lift ^ 1u; }
	NodeId lift(NodeId node, bool positive) const { return 2 * node + (positive ? 0 : 1); }

	bool sigma_commutes() const;
	bool base_is_permutation() const;
	bool lifted_is_permutation() const;
	// Cycle lengths of the lifted map; requires a permutation.
	std::vector<std::size_t> lifted_cycles() const;
	// Transitions lift -> lifted_map(lift).
	TransitionGraph lifted_graph() const;

	nlohmann::json to_json() const;
};

OrientationCover orientation_cover(const SmoothSystem& sys, const std::vector<Vec>& sample,
                                   const std::vector<Vec>& central);

} // namespace phcm
