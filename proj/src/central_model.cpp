#include "phcm/central_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>

namespace phcm {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double interpolate(const std::vector<double>& samples, double t)
{
	const int m = static_cast<int>(samples.size()) - 1;
	if (t <= 0.0)
		return samples.front();
	if (t >= 1.0)
		return samples.back();
	const double u = t * m;
	const int k = std::min(m - 1, static_cast<int>(std::floor(u)));
	const double w = u - k;
	if (w == 0.0)
		return samples[k];
	return samples[k] + w * (samples[k + 1] - samples[k]);
}

} // namespace

CentralModel::CentralModel(SampledSpace base, std::vector<NodeId> base_map,
                           std::vector<std::vector<double>> fiber_samples)
    : base_(std::move(base)), base_map_(std::move(base_map)), fiber_(std::move(fiber_samples))
{
	const std::size_t n = base_.size();
	if (base_map_.size() != n || fiber_.size() != n)
		throw Error("central model needs one base image and one fiber map per base node");
	for (NodeId img : base_map_)
		if (img >= n)
			throw Error("base map points outside the base");
	cells_ = static_cast<int>(fiber_.front().size()) - 1;
	if (cells_ < 1)
		throw Error("fiber grid needs at least one cell");

	inverse_.resize(n);
	for (NodeId x = 0; x < n; ++x) {
		const auto& f = fiber_[x];
		if (static_cast<int>(f.size()) != cells_ + 1)
			throw Error("fiber maps must share one grid");
		if (f[0] != 0.0)
			throw Error("fiber map must fix the zero section");
		for (int k = 1; k <= cells_; ++k) {
			if (!std::isfinite(f[k]) || f[k] < f[k - 1])
				throw Error("fiber map must be finite and nondecreasing");
		}
		if (!(f[1] > 0.0))
			throw Error("degenerate fiber map: f2(x, t) = 0 on the first cell");

		auto& g = inverse_[x];
		g.resize(cells_ + 1);
		for (int j = 0; j <= cells_; ++j) {
			const double s = level(j);
			if (s > f.back()) {
				g[j] = inf;
				continue;
			}
			const auto it = std::lower_bound(f.begin(), f.end(), s);
			const auto k = static_cast<int>(it - f.begin());
			if (k == 0) {
				g[j] = 0.0;
				continue;
			}
			const double w = (s - f[k - 1]) / (f[k] - f[k - 1]);
			g[j] = (static_cast<double>(k - 1) + w) / cells_;
		}

		// Local inverse composed with the fiber map is the identity on the
		// strictly increasing part of the grid, up to one cell.
		for (int k = 0; k <= cells_; ++k) {
			if (k > 0 && !(f[k] > f[k - 1]))
				continue;
			if (f[k] > 1.0)
				break;
			const double back = interpolate(g, f[k]);
			if (!std::isfinite(back))
				continue; // last cell before the image ends
			if (std::abs(back - level(k)) > 1.0 / cells_ + 1e-12)
				throw Error("fiber inverse does not invert the fiber map to one grid cell");
		}
	}
}

CentralModel CentralModel::from_json(const nlohmann::json& j)
{
	for (const char* key : {"base_distance", "base_map", "fiber_samples"})
		if (!j.contains(key))
			throw Error(std::string("central model JSON is missing '") + key + "'");
	auto table = j.at("base_distance").get<std::vector<std::vector<double>>>();
	auto map = j.at("base_map").get<std::vector<NodeId>>();
	auto fibers = j.at("fiber_samples").get<std::vector<std::vector<double>>>();
	return CentralModel(SampledSpace::from_distance_matrix(std::move(table)), std::move(map), std::move(fibers));
}

nlohmann::json CentralModel::to_json() const
{
	const std::size_t n = base_.size();
	std::vector<std::vector<double>> table(n, std::vector<double>(n));
	for (NodeId a = 0; a < n; ++a)
		for (NodeId b = 0; b < n; ++b)
			table[a][b] = base_.distance(a, b);
	nlohmann::json j;
	j["base_distance"] = table;
	j["base_map"] = base_map_;
	j["fiber_samples"] = fiber_;
	return j;
}

double CentralModel::fiber_image(NodeId x, double t) const
{
	return interpolate(fiber_[x], t);
}

double CentralModel::fiber_preimage(NodeId x, double s) const
{
	const auto& f = fiber_[x];
	if (f[0] > s)
		return -1.0;
	if (f.back() <= s)
		return 1.0;
	// First sample strictly above s; the crossing lies in the cell before it.
	const auto it = std::upper_bound(f.begin(), f.end(), s);
	const auto k = static_cast<int>(it - f.begin());
	const double w = (s - f[k - 1]) / (f[k] - f[k - 1]);
	return (static_cast<double>(k - 1) + w) / cells_;
}

double CentralModel::max_fiber_step() const
{
	double step = 0.0;
	for (const auto& f : fiber_)
		for (std::size_t k = 1; k < f.size(); ++k)
			step = std::max(step, f[k] - f[k - 1]);
	return step;
}

TransitionGraph CentralModel::base_graph(double epsilon) const
{
	return build_transition_graph(base_, base_map_, epsilon);
}

double product_distance(const CentralModel& model, NodeId x, double t, NodeId y, double s)
{
	if (t < 0.0 || s < 0.0)
		throw Error("fiber coordinates must be nonnegative");
	return std::max(model.base().distance(x, y), std::abs(t - s));
}

// ---------------------------------------------------------------------------
// Strips

double Strip::max_top() const
{
	return top.empty() ? 0.0 : *std::max_element(top.begin(), top.end());
}

double Strip::min_top() const
{
	return top.empty() ? 0.0 : *std::min_element(top.begin(), top.end());
}

int Strip::level_index(NodeId x, int cells) const
{
	return static_cast<int>(std::lround(top[x] * cells));
}

void Strip::write_csv(std::ostream& out) const
{
	const auto old = out.precision(17);
	out << "node_index,top\n";
	for (std::size_t x = 0; x < top.size(); ++x)
		out << x << ',' << top[x] << '\n';
	out.precision(old);
}

namespace {

// Highest level j in [0, m] with t_j - value < eps.
int highest_level_below(const CentralModel& model, double value, double eps)
{
	const int m = model.fiber_cells();
	int j = std::clamp(static_cast<int>(std::ceil((value + eps) * m)), 0, m);
	while (j > 0 && !(model.level(j) - value < eps))
		--j;
	while (j < m && model.level(j + 1) - value < eps)
		++j;
	return j;
}

// Highest level k in [0, m] with f2(x, t_k) - target < eps.
int highest_preimage_level(const CentralModel& model, NodeId x, double target, double eps)
{
	const auto& f = model.fiber_samples(x);
	const auto it = std::partition_point(f.begin(), f.end(), [&](double v) { return v - target < eps; });
	return static_cast<int>(it - f.begin()) - 1;
}

Strip to_strip(const CentralModel& model, const std::vector<int>& levels)
{
	Strip s;
	s.top.resize(levels.size());
	for (std::size_t x = 0; x < levels.size(); ++x)
		s.top[x] = model.level(levels[x]);
	return s;
}

void check_positive(double epsilon)
{
	if (!(epsilon > 0.0))
		throw Error("epsilon must be positive");
}

// Least fixed point of the monotone top-propagation operator above the zero
// section, by worklist. Every level only increases, so more than m * n
// increases means the fiber data is corrupt.
template<typename Push>
std::vector<int> propagate(const CentralModel& model, const TransitionGraph& graph, Push&& push)
{
	const std::size_t n = model.base_size();
	std::vector<int> level(n, 0);
	std::deque<NodeId> work;
	std::vector<bool> queued(n, true);
	for (NodeId x = 0; x < n; ++x)
		work.push_back(x);
	const std::size_t budget = static_cast<std::size_t>(model.fiber_cells()) * n + n;
	std::size_t raises = 0;
	while (!work.empty()) {
		const NodeId x = work.front();
		work.pop_front();
		queued[x] = false;
		for (NodeId y : graph.successors(x)) {
			const auto [target, value] = push(x, y, level);
			if (value > level[target]) {
				level[target] = value;
				if (++raises > budget)
					throw Error("propagation failed to stabilize");
				if (!queued[target]) {
					queued[target] = true;
					work.push_back(target);
				}
			}
		}
	}
	return level;
}

} // namespace

Strip pseudo_unstable_set(const CentralModel& model, double epsilon)
{
	check_positive(epsilon);
	const TransitionGraph graph = model.base_graph(epsilon);
	const auto levels = propagate(model, graph, [&](NodeId x, NodeId y, const std::vector<int>& lv) {
		const double image = model.fiber_sample(x, lv[x]);
		return std::pair<NodeId, int>{y, highest_level_below(model, image, epsilon)};
	});
	return to_strip(model, levels);
}

Strip pseudo_stable_set(const CentralModel& model, double epsilon)
{
	check_positive(epsilon);
	// Walk the base graph backwards: a segment over y that reaches the zero
	// section pulls back to every x with an edge x -> y.
	const TransitionGraph graph = model.base_graph(epsilon).reversed();
	const auto levels = propagate(model, graph, [&](NodeId y, NodeId x, const std::vector<int>& lv) {
		return std::pair<NodeId, int>{x, highest_preimage_level(model, x, model.level(lv[y]), epsilon)};
	});
	return to_strip(model, levels);
}

namespace {

void check_schedule(const std::vector<double>& schedule)
{
	if (schedule.empty())
		throw Error("epsilon schedule is empty");
	for (std::size_t i = 0; i < schedule.size(); ++i) {
		check_positive(schedule[i]);
		if (i > 0 && !(schedule[i] < schedule[i - 1]))
			throw Error("epsilon schedule must be strictly decreasing");
	}
}

Strip side_set(const CentralModel& model, double eps, StripSide side)
{
	return side == StripSide::Unstable ? pseudo_unstable_set(model, eps) : pseudo_stable_set(model, eps);
}

} // namespace

Strip limit_strip(const CentralModel& model, const std::vector<double>& schedule, StripSide side)
{
	check_schedule(schedule);
	Strip acc = side_set(model, schedule.front(), side);
	for (std::size_t i = 1; i < schedule.size(); ++i) {
		const Strip next = side_set(model, schedule[i], side);
		for (std::size_t x = 0; x < acc.size(); ++x) {
			if (next.top[x] > acc.top[x])
				throw Error("pseudo-orbit set grew as epsilon decreased");
			acc.top[x] = std::min(acc.top[x], next.top[x]);
		}
	}
	return acc;
}

bool is_trapping_strip(const CentralModel& model, const Strip& strip, TrapDirection direction)
{
	if (strip.size() != model.base_size())
		throw Error("strip does not match the base");
	for (double t : strip.top)
		if (!(t >= 0.0 && t <= 1.0))
			throw Error("strip fibers must lie in [0, 1]");
	for (NodeId x = 0; x < model.base_size(); ++x) {
		const NodeId y = model.base_map()[x];
		if (direction == TrapDirection::Forward) {
			if (!(model.fiber_image(x, strip.top[x]) < strip.top[y]))
				return false;
		} else {
			if (!(model.fiber_preimage(x, strip.top[y]) < strip.top[x]))
				return false;
		}
	}
	return true;
}

// ---------------------------------------------------------------------------
// Dichotomy

double DichotomyOptions::resolved_bound(int cells) const
{
	if (neighborhood_bound > 0.0)
		return neighborhood_bound;
	if (schedule.empty())
		throw Error("epsilon schedule is empty");
	return std::max(4.0 * schedule.back(), 2.0 / cells);
}

namespace {

void require_transitive_base(const CentralModel& model, double eps)
{
	std::vector<NodeId> all(model.base_size());
	for (NodeId x = 0; x < all.size(); ++x)
		all[x] = x;
	if (!is_chain_transitive(model.base_graph(eps), all))
		throw Error("dichotomy requires chain-transitive base");
}

} // namespace

std::optional<CentralSegment> detect_chain_recurrent_segment(const CentralModel& model,
                                                             const DichotomyOptions& options)
{
	check_schedule(options.schedule);
	const double bound = options.resolved_bound(model.fiber_cells());
	const std::size_t n = model.base_size();

	// The chain class of the zero section at a given epsilon is the
	// intersection of its pseudo-unstable and pseudo-stable sets.
	std::vector<double> length(n, 1.0);
	for (double eps : options.schedule) {
		require_transitive_base(model, eps);
		const Strip u = pseudo_unstable_set(model, eps);
		const Strip s = pseudo_stable_set(model, eps);
		if (u.max_top() <= bound || s.max_top() <= bound)
			return std::nullopt;
		for (NodeId x = 0; x < n; ++x)
			length[x] = std::min(length[x], std::min(u.top[x], s.top[x]));
	}
	const auto best = std::max_element(length.begin(), length.end());
	if (!(*best > bound))
		return std::nullopt;
	return CentralSegment{static_cast<NodeId>(best - length.begin()), *best};
}

ResolutionInsufficient::ResolutionInsufficient(Strip unstable_, Strip stable_, double epsilon_)
    : Error("resolution insufficient"), unstable(std::move(unstable_)), stable(std::move(stable_)),
      epsilon(epsilon_)
{
}

const char* outcome_name(const DichotomyOutcome& outcome)
{
	switch (outcome.index()) {
	case 0:
		return "ForwardTrappingStrip";
	case 1:
		return "BackwardTrappingStrip";
	default:
		return "ChainRecurrentSegment";
	}
}

DichotomyOutcome dichotomy(const CentralModel& model, const DichotomyOptions& options)
{
	if (auto segment = detect_chain_recurrent_segment(model, options))
		return ChainRecurrentSegment{*segment};

	const double bound = options.resolved_bound(model.fiber_cells());
	// Smallest epsilon first: the tightest certifiable neighbourhood wins.
	for (auto it = options.schedule.rbegin(); it != options.schedule.rend(); ++it) {
		Strip u = pseudo_unstable_set(model, *it);
		if (u.max_top() <= bound && is_trapping_strip(model, u, TrapDirection::Forward))
			return ForwardTrappingStrip{std::move(u), *it};
	}
	for (auto it = options.schedule.rbegin(); it != options.schedule.rend(); ++it) {
		Strip s = pseudo_stable_set(model, *it);
		if (s.max_top() <= bound && is_trapping_strip(model, s, TrapDirection::Backward))
			return BackwardTrappingStrip{std::move(s), *it};
	}
	const double floor = options.schedule.back();
	throw ResolutionInsufficient(pseudo_unstable_set(model, floor), pseudo_stable_set(model, floor), floor);
}

} // namespace phcm
