#pragma once

/**
 * Finite-resolution chain recurrence.
 *
 * A compact metric space is represented by a finite net of sample points
 * (a SampledSpace). For a map f and a slack epsilon the TransitionGraph has an
 * edge a -> b whenever d(f(a), b) < epsilon, so its directed paths of length
 * at least one are exactly the epsilon-pseudo-orbits through net points.
 * Chain-recurrence classes at that resolution are the strongly connected
 * components carrying a cycle.
 *
 * A pseudo-orbit on a net of resolution delta shadows an
 * (epsilon + 2 delta)-pseudo-orbit of the true map; results are reported per
 * epsilon rather than extrapolated.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <json.hpp>

namespace phcm {

using NodeId = std::uint32_t;
using Point = std::vector<double>;
using Metric = std::function<double(std::span<const double>, std::span<const double>)>;
using PointMap = std::function<Point(std::span<const double>)>;

namespace metrics {

Metric euclidean();

// Shortest-representative Euclidean distance; a period of 0 marks a
// non-periodic coordinate.
Metric periodic(std::vector<double> periods);

} // namespace metrics

class SampledSpace
{
public:
	SampledSpace(std::vector<Point> points, Metric metric);

	// Handles are abstract; only the pairwise table is known. Ambient
	// queries are restricted to handle coordinates {i}.
	static SampledSpace from_distance_matrix(std::vector<std::vector<double>> table);

	// Tensor grid of counts[i] points per axis on [lower, upper) (left cell
	// corners), row-major with the last axis fastest.
	static SampledSpace uniform_grid(const std::vector<std::size_t>& counts,
	                                 const std::vector<double>& lower,
	                                 const std::vector<double>& upper,
	                                 Metric metric);

	std::size_t size() const { return points_.size(); }
	std::size_t dimension() const { return points_.empty() ? 0 : points_.front().size(); }
	const Point& point(NodeId i) const { return points_[i]; }
	const std::vector<Point>& points() const { return points_; }
	const Metric& metric() const { return metric_; }

	double distance(NodeId a, NodeId b) const;
	double distance_to(std::span<const double> ambient, NodeId b) const;

	// Nearest handle; ties go to the lowest index.
	NodeId project(std::span<const double> ambient) const;

	// Smallest distance between two distinct handles.
	double min_spacing() const;

private:
	std::vector<Point> points_;
	Metric metric_;
	mutable double spacing_ = -1.0;
};

class TransitionGraph
{
public:
	TransitionGraph() = default;
	// Successor lists need not be sorted or unique.
	TransitionGraph(double epsilon, std::vector<std::vector<NodeId>> successors);

	std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
	double epsilon() const { return epsilon_; }
	std::size_t edge_count() const { return targets_.size(); }

	std::span<const NodeId> successors(NodeId a) const
	{
		return {targets_.data() + offsets_[a], targets_.data() + offsets_[a + 1]};
	}
	bool has_edge(NodeId a, NodeId b) const;

	// "src dst" per line, sources ascending, targets ascending.
	void write_edge_list(std::ostream& out) const;

	TransitionGraph reversed() const;
	TransitionGraph induced(std::span<const NodeId> subset) const;

private:
	double epsilon_ = 0.0;
	std::vector<std::size_t> offsets_{0};
	std::vector<NodeId> targets_;
};

// Edge a -> b iff d(f(a), b) < epsilon (strict).
TransitionGraph build_transition_graph(const SampledSpace& space, const PointMap& f, double epsilon);

// Same rule with the images f(a) already evaluated.
TransitionGraph build_transition_graph(const SampledSpace& space, std::span<const Point> images,
                                       double epsilon);

// Same rule when the map sends handles to handles.
TransitionGraph build_transition_graph(const SampledSpace& space, std::span<const NodeId> node_map,
                                       double epsilon);

// a ⊣ b : b is the endpoint of a path of length >= 1 starting at a.
bool chain_reaches(const TransitionGraph& graph, NodeId a, NodeId b);

// Nodes reachable from `sources` by paths of length >= 0.
std::vector<bool> reachable_set(const TransitionGraph& graph, std::span<const NodeId> sources);

struct ChainDecomposition
{
	double epsilon = 0.0;
	std::vector<std::vector<NodeId>> classes; // each sorted, ordered by smallest member
	std::vector<int> class_of;                // -1 for non-recurrent nodes
	std::vector<NodeId> recurrent_nodes;      // sorted

	std::size_t class_count() const { return classes.size(); }
	nlohmann::json to_json() const;
};

ChainDecomposition chain_decomposition(const TransitionGraph& graph);

// Strong connectivity of the subgraph induced on `subset` (pseudo-orbits kept
// inside the subset), with at least one cycle.
bool is_chain_transitive(const TransitionGraph& graph, std::span<const NodeId> subset);
bool is_chain_transitive(const SampledSpace& space, const PointMap& f, std::span<const NodeId> subset,
                         double epsilon);

double hausdorff_distance(std::span<const Point> a, std::span<const Point> b, const Metric& metric);

// start, start*factor, ... (at most `steps` values), never below `floor`;
// the floor itself closes the schedule when the geometric sequence
// overshoots it.
std::vector<double> geometric_schedule(double start, double floor, double factor = 0.5, int steps = 8);

} // namespace phcm
