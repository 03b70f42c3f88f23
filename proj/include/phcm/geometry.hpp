#pragma once

/**
 * Central cone fields and the relative position of nearby points of a
 * partially hyperbolic set with one-dimensional center: below / above via a
 * straight-leaf foliation along the central direction, twisted positions,
 * twisted returns of periodic orbits, and contraction products along
 * periodic orbits.
 */

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include <json.hpp>

#include "phcm/smooth.hpp"

namespace phcm {

using Polyline = std::vector<Vec>;

struct ConeField
{
	double chi = 0.1;
	// Extended central direction; need not be normalized.
	std::function<Vec(const Vec&)> central;
	double r0 = 0.05;
	double length_bound = 5e-3; // L
	// Points sampled along a connecting curve for the tangency test.
	int tangency_samples = 8;

	void validate() const;
};

// ||v^c|| > (1 - chi) ||v||, v^c the orthogonal projection on u(x).
bool in_cone(const ConeField& cone, const Vec& x, const Vec& v);

enum class Position { Below, Above, Both, Incomparable };

const char* position_name(Position p);

// A ball of radius r0 with an orientation of the central cones, given by the
// linear form v -> <v, orientation>.
struct OrientedBall
{
	Vec center;
	Vec orientation;
};

struct PositionVerdict
{
	Position position = Position::Incomparable;
	// Connecting leaf segment [A, B], A on W^uu_loc(p), B on W^ss_loc(q).
	Polyline witness;
	// Oriented length of the witness.
	double signed_length = 0.0;
	// Opposite-sign witness when position is Both.
	Polyline second_witness;
	double second_signed_length = 0.0;

	nlohmann::json to_json() const;
};

// Local strong manifolds of one point.
struct LocalManifolds
{
	Polyline strong_unstable;
	Polyline strong_stable;
};

PositionVerdict position(const ConeField& cone, const OrientedBall& ball, const Vec& p, const Vec& q,
                         const Polyline& wuu_p, const Polyline& wss_q);

// Both points in one ball centred at their midpoint, oriented by the central
// direction there; the verdict is recomputed with the opposite orientation.
bool twisted_position(const ConeField& cone, const Vec& p, const LocalManifolds& mp, const Vec& q,
                      const LocalManifolds& mq);

struct TwistedReturns
{
	bool holds = true;
	std::optional<std::pair<std::size_t, std::size_t>> violation;
	std::size_t close_pairs = 0;
};

// All pairs of orbit points closer than epsilon must be in twisted position;
// the first violating pair in index order is reported.
TwistedReturns has_twisted_returns(const ConeField& cone, const std::vector<Vec>& orbit,
                                   const std::vector<LocalManifolds>& manifolds, double epsilon);

struct ReturnPair
{
	std::size_t index = 0; // p = orbit[index]
	std::size_t k = 0;     // q = f^k(p) = orbit[(index + k) % period]
	double distance = 0.0;
};

// Distinct orbit points at minimal distance; ties (to relative 1e-12) go to
// the smallest k, then the smallest index.
ReturnPair closest_return_pair(const std::vector<Vec>& orbit);
ReturnPair closest_return_pair(const SmoothSystem& sys, const std::vector<Vec>& orbit);

// (prod_k ||Df^N|E(f^k P)||, prod_k ||Df^-N|F(f^k P)||), k = 1..tau, with
// bundles given per orbit point.
std::pair<double, double> periodic_contraction_products(const SmoothSystem& sys, const PeriodicOrbitRecord& orbit,
                                                        const Bundle& e, const Bundle& f, int n);

} // namespace phcm
