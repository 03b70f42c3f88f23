#pragma once

/**
 * Abstract central models: skew products (x, t) -> (f1(x), f2(x, t)) over a
 * sampled compact base, acting on fibers [0, 1] and fixing the zero section.
 *
 * Fiber maps are sampled on the uniform grid t_k = k / m, k = 0..m, and must be
 * nondecreasing with f2(x, 0) = 0 and f2(x, t_1) > 0.
 *
 * A Strip stores, per base node, the highest fiber level it contains. The
 * pseudo-stable / pseudo-unstable sets of the zero section are computed by
 * propagating these tops along the base epsilon-graph: the image of the
 * segment {x} x [0, top(x)] is {f1(x)} x [0, f2(x, top(x))], and its
 * epsilon-neighbourhood meets the fiber of every base successor y in the
 * levels t_j with t_j - f2(x, top(x)) < epsilon. When consecutive fiber
 * samples differ by less than 2 epsilon and 1/m < 2 epsilon, the result is
 * cell-for-cell the reachable set of the explicit (node x level) graph with
 * edges (x, k) -> (y, j) iff d(f1(x), y) < epsilon and |f2(x, t_k) - t_j| < epsilon.
 */

#include <iosfwd>
#include <optional>
#include <variant>
#include <vector>

#include "phcm/chain.hpp"
#include "phcm/error.hpp"

namespace phcm {

class CentralModel
{
public:
	// fiber_samples[x][k] = f2(x, k / m); all rows share the same length m + 1.
	CentralModel(SampledSpace base, std::vector<NodeId> base_map,
	             std::vector<std::vector<double>> fiber_samples);

	static CentralModel from_json(const nlohmann::json& j);
	nlohmann::json to_json() const;

	const SampledSpace& base() const { return base_; }
	std::size_t base_size() const { return base_.size(); }
	const std::vector<NodeId>& base_map() const { return base_map_; }

	int fiber_cells() const { return cells_; }
	double level(int k) const { return static_cast<double>(k) / static_cast<double>(cells_); }

	const std::vector<double>& fiber_samples(NodeId x) const { return fiber_[x]; }
	double fiber_sample(NodeId x, int k) const { return fiber_[x][static_cast<std::size_t>(k)]; }

	// Piecewise-linear fiber map on [0, 1].
	double fiber_image(NodeId x, double t) const;

	// sup { t in [0, 1] : f2(x, t) <= s }, or -1 when f2(x, 0) > s.
	double fiber_preimage(NodeId x, double s) const;

	// Samples of the local inverse g(x, .) = inf { t : f2(x, t) >= s } on the
	// grid s = t_j; +inf where t_j exceeds f2(x, 1).
	const std::vector<double>& fiber_inverse(NodeId x) const { return inverse_[x]; }

	// Largest difference between consecutive fiber samples.
	double max_fiber_step() const;

	// Base epsilon-graph: x -> y iff d(f1(x), y) < epsilon.
	TransitionGraph base_graph(double epsilon) const;

private:
	SampledSpace base_;
	std::vector<NodeId> base_map_;
	std::vector<std::vector<double>> fiber_;
	std::vector<std::vector<double>> inverse_;
	int cells_ = 0;
};

struct Strip
{
	std::vector<double> top;

	std::size_t size() const { return top.size(); }
	double max_top() const;
	double min_top() const;

	// Fiber level index of top(x) on a grid of m cells.
	int level_index(NodeId x, int cells) const;

	// "node_index,top" with a header line.
	void write_csv(std::ostream& out) const;
};

struct CentralSegment
{
	NodeId base_node = 0;
	double length = 0.0;
};

// max(d_base(x, y), |t - s|) on the product base x [0, +inf).
double product_distance(const CentralModel& model, NodeId x, double t, NodeId y, double s);

enum class StripSide { Stable, Unstable };

Strip pseudo_unstable_set(const CentralModel& model, double epsilon);
Strip pseudo_stable_set(const CentralModel& model, double epsilon);

// Pointwise minimum over a strictly decreasing schedule. Throws when the
// computed sets fail to shrink with epsilon.
Strip limit_strip(const CentralModel& model, const std::vector<double>& schedule, StripSide side);

enum class TrapDirection { Forward, Backward };

// Forward: f(Cl S) in Int S, i.e. f2(x, top(x)) < top(f1(x)) for every x.
// Backward: the local inverse maps Cl S into Int S.
bool is_trapping_strip(const CentralModel& model, const Strip& strip,
                       TrapDirection direction = TrapDirection::Forward);

struct DichotomyOptions
{
	// Strictly decreasing, positive; the last entry is the floor.
	std::vector<double> schedule;
	// Height below which a strip counts as a small neighbourhood of the zero
	// section. Zero selects max(4 * floor, 2 / m).
	double neighborhood_bound = 0.0;

	double resolved_bound(int cells) const;
};

std::optional<CentralSegment> detect_chain_recurrent_segment(const CentralModel& model,
                                                             const DichotomyOptions& options);

struct ForwardTrappingStrip
{
	Strip strip;
	double epsilon;
};
struct BackwardTrappingStrip
{
	Strip strip;
	double epsilon;
};
struct ChainRecurrentSegment
{
	CentralSegment segment;
};

using DichotomyOutcome = std::variant<ForwardTrappingStrip, BackwardTrappingStrip, ChainRecurrentSegment>;

const char* outcome_name(const DichotomyOutcome& outcome);

// Neither branch certifiable at the floor epsilon.
class ResolutionInsufficient : public Error
{
public:
	ResolutionInsufficient(Strip unstable, Strip stable, double epsilon);
	Strip unstable;
	Strip stable;
	double epsilon;
};

DichotomyOutcome dichotomy(const CentralModel& model, const DichotomyOptions& options);

} // namespace phcm
