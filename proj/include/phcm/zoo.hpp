#pragma once

/**
 * Example systems: Morse-Smale and minimal circle maps, the Hénon map, the
 * cat map, an affine horseshoe, a partially hyperbolic cat map times a
 * rotation, skew-product central models, and a synthetic periodic orbit
 * with prescribed local strong manifolds.
 */

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "phcm/central_model.hpp"
#include "phcm/chain.hpp"
#include "phcm/geometry.hpp"
#include "phcm/smooth.hpp"

namespace phcm {

// How a documented value is known: closed-form algebra, or computed by an
// independent routine at construction.
enum class FactBasis { Analytic, Computed };

struct FactCheck
{
	bool passed = false;
	std::string detail;
};

struct Fact
{
	std::string statement;
	FactBasis basis = FactBasis::Analytic;
	std::string reproduce;
	std::function<FactCheck()> verify;
};

struct TwistedOrbit
{
	std::vector<Vec> points; // in orbit order
	std::vector<LocalManifolds> manifolds;
	ConeField cone;
	double epsilon = 0.0;
};

struct ZooEntry
{
	std::string name;
	std::string description;
	nlohmann::json parameters; // resolved, defaults included

	std::optional<SmoothSystem> system;
	std::optional<CentralModel> model;
	std::optional<TwistedOrbit> twisted;

	// Net for chain computations on the system's phase space.
	std::optional<SampledSpace> net;
	// Periodic orbits known in closed form.
	std::vector<PeriodicOrbitRecord> orbits;
	// Invariant splitting along an orbit sample.
	std::optional<SplittingSample> splitting;

	std::vector<Fact> facts;

	PointMap point_map() const;
};

std::vector<std::string> zoo_catalog();

// Throws ConfigError for unknown names (listing the catalog) and unknown or
// non-numeric parameters.
ZooEntry make_zoo(const std::string& name, const nlohmann::json& parameters = nlohmann::json::object());

struct FactReport
{
	std::string statement;
	FactBasis basis;
	FactCheck check;
};

std::vector<FactReport> verify_facts(const ZooEntry& entry);

const char* fact_basis_name(FactBasis basis);

// x -> A x on R^n, or on a torus when periods are given.
SmoothSystem make_linear_system(const Mat& a, std::vector<double> periods = {}, std::string name = "linear");

} // namespace phcm
