#include "phcm/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stack>

#include "parallel.hpp"
#include "phcm/error.hpp"

namespace phcm {

namespace metrics {

Metric euclidean()
{
	return [](std::span<const double> a, std::span<const double> b) {
		double s = 0.0;
		for (std::size_t i = 0; i < a.size(); ++i) {
			const double d = a[i] - b[i];
			s += d * d;
		}
		return std::sqrt(s);
	};
}

Metric periodic(std::vector<double> periods)
{
	return [periods = std::move(periods)](std::span<const double> a, std::span<const double> b) {
		double s = 0.0;
		for (std::size_t i = 0; i < a.size(); ++i) {
			double d = std::abs(a[i] - b[i]);
			const double p = i < periods.size() ? periods[i] : 0.0;
			if (p > 0.0) {
				d = std::fmod(d, p);
				d = std::min(d, p - d);
			}
			s += d * d;
		}
		return std::sqrt(s);
	};
}

} // namespace metrics

// ---------------------------------------------------------------------------
// SampledSpace

SampledSpace::SampledSpace(std::vector<Point> points, Metric metric)
    : points_(std::move(points)), metric_(std::move(metric))
{
	if (points_.empty())
		throw Error("sampled space needs at least one point");
	const std::size_t dim = points_.front().size();
	for (const auto& p : points_)
		if (p.size() != dim)
			throw Error("sampled space points have inconsistent dimension");
}

SampledSpace SampledSpace::from_distance_matrix(std::vector<std::vector<double>> table)
{
	const std::size_t n = table.size();
	for (std::size_t i = 0; i < n; ++i) {
		if (table[i].size() != n)
			throw Error("distance table must be square");
		if (table[i][i] != 0.0)
			throw Error("distance table must have a zero diagonal");
		for (std::size_t j = 0; j < i; ++j) {
			if (table[i][j] != table[j][i])
				throw Error("distance table must be symmetric");
			if (table[i][j] < 0.0)
				throw Error("distance table must be nonnegative");
		}
	}
	std::vector<Point> handles(n);
	for (std::size_t i = 0; i < n; ++i)
		handles[i] = {static_cast<double>(i)};
	auto shared = std::make_shared<const std::vector<std::vector<double>>>(std::move(table));
	Metric m = [shared](std::span<const double> a, std::span<const double> b) {
		const auto i = static_cast<std::size_t>(std::lround(a[0]));
		const auto j = static_cast<std::size_t>(std::lround(b[0]));
		return (*shared)[i][j];
	};
	return SampledSpace(std::move(handles), std::move(m));
}

SampledSpace SampledSpace::uniform_grid(const std::vector<std::size_t>& counts,
                                        const std::vector<double>& lower,
                                        const std::vector<double>& upper,
                                        Metric metric)
{
	const std::size_t dim = counts.size();
	if (dim == 0 || lower.size() != dim || upper.size() != dim)
		throw Error("grid bounds do not match grid dimension");
	std::size_t total = 1;
	for (auto c : counts) {
		if (c == 0)
			throw Error("grid axis with zero points");
		total *= c;
	}
	std::vector<Point> pts(total, Point(dim));
	for (std::size_t flat = 0; flat < total; ++flat) {
		std::size_t rest = flat;
		for (std::size_t ax = dim; ax-- > 0;) {
			const std::size_t k = rest % counts[ax];
			rest /= counts[ax];
			pts[flat][ax] = lower[ax] + (upper[ax] - lower[ax]) * static_cast<double>(k) /
			                                static_cast<double>(counts[ax]);
		}
	}
	return SampledSpace(std::move(pts), std::move(metric));
}

double SampledSpace::distance(NodeId a, NodeId b) const
{
	return metric_(points_[a], points_[b]);
}

double SampledSpace::distance_to(std::span<const double> ambient, NodeId b) const
{
	return metric_(ambient, points_[b]);
}

NodeId SampledSpace::project(std::span<const double> ambient) const
{
	NodeId best = 0;
	double best_d = std::numeric_limits<double>::infinity();
	for (NodeId i = 0; i < points_.size(); ++i) {
		const double d = metric_(ambient, points_[i]);
		if (d < best_d) {
			best_d = d;
			best = i;
		}
	}
	return best;
}

double SampledSpace::min_spacing() const
{
	if (spacing_ >= 0.0)
		return spacing_;
	double best = std::numeric_limits<double>::infinity();
	for (NodeId i = 0; i < points_.size(); ++i)
		for (NodeId j = i + 1; j < points_.size(); ++j)
			best = std::min(best, distance(i, j));
	spacing_ = std::isfinite(best) ? best : 0.0;
	return spacing_;
}

// ---------------------------------------------------------------------------
// TransitionGraph

TransitionGraph::TransitionGraph(double epsilon, std::vector<std::vector<NodeId>> successors)
    : epsilon_(epsilon)
{
	offsets_.assign(1, 0);
	offsets_.reserve(successors.size() + 1);
	for (auto& s : successors) {
		std::sort(s.begin(), s.end());
		s.erase(std::unique(s.begin(), s.end()), s.end());
		for (NodeId b : s)
			if (b >= successors.size())
				throw Error("transition graph edge points outside the node set");
		targets_.insert(targets_.end(), s.begin(), s.end());
		offsets_.push_back(targets_.size());
	}
}

bool TransitionGraph::has_edge(NodeId a, NodeId b) const
{
	const auto s = successors(a);
	return std::binary_search(s.begin(), s.end(), b);
}

void TransitionGraph::write_edge_list(std::ostream& out) const
{
	for (NodeId a = 0; a < size(); ++a)
		for (NodeId b : successors(a))
			out << a << ' ' << b << '\n';
}

TransitionGraph TransitionGraph::reversed() const
{
	std::vector<std::vector<NodeId>> pred(size());
	for (NodeId a = 0; a < size(); ++a)
		for (NodeId b : successors(a))
			pred[b].push_back(a);
	return TransitionGraph(epsilon_, std::move(pred));
}

TransitionGraph TransitionGraph::induced(std::span<const NodeId> subset) const
{
	std::vector<int> local(size(), -1);
	for (std::size_t i = 0; i < subset.size(); ++i) {
		if (subset[i] >= size())
			throw Error("subset node outside the graph");
		local[subset[i]] = static_cast<int>(i);
	}
	std::vector<std::vector<NodeId>> succ(subset.size());
	for (std::size_t i = 0; i < subset.size(); ++i)
		for (NodeId b : successors(subset[i]))
			if (local[b] >= 0)
				succ[i].push_back(static_cast<NodeId>(local[b]));
	return TransitionGraph(epsilon_, std::move(succ));
}

// ---------------------------------------------------------------------------
// Graph construction

namespace {

// Candidate pruning by two pivots: |d(y,p) - d(b,p)| <= d(y,b) < eps.
struct PivotIndex
{
	std::vector<double> to_first;  // d(node, pivot0)
	std::vector<double> to_second; // d(node, pivot1)
	std::vector<NodeId> order;     // nodes sorted by to_first
	std::vector<double> sorted_first;
	NodeId pivot0 = 0, pivot1 = 0;

	explicit PivotIndex(const SampledSpace& space)
	{
		const std::size_t n = space.size();
		to_first.resize(n);
		for (NodeId i = 0; i < n; ++i)
			to_first[i] = space.distance(pivot0, i);
		pivot1 = static_cast<NodeId>(std::max_element(to_first.begin(), to_first.end()) - to_first.begin());
		to_second.resize(n);
		for (NodeId i = 0; i < n; ++i)
			to_second[i] = space.distance(pivot1, i);
		order.resize(n);
		std::iota(order.begin(), order.end(), 0);
		std::stable_sort(order.begin(), order.end(),
		                 [&](NodeId a, NodeId b) { return to_first[a] < to_first[b]; });
		sorted_first.resize(n);
		for (std::size_t k = 0; k < n; ++k)
			sorted_first[k] = to_first[order[k]];
	}
};

void check_epsilon(double epsilon)
{
	if (!(epsilon > 0.0))
		throw Error("epsilon must be positive");
}

} // namespace

TransitionGraph build_transition_graph(const SampledSpace& space, std::span<const Point> images,
                                       double epsilon)
{
	check_epsilon(epsilon);
	if (images.size() != space.size())
		throw Error("one image per sample point is required");
	const PivotIndex index(space);
	const auto& pts = space.points();
	const auto& metric = space.metric();
	std::vector<std::vector<NodeId>> succ(space.size());

	detail::parallel_for(space.size(), [&](std::size_t a) {
		const Point& y = images[a];
		const double r0 = metric(y, pts[index.pivot0]);
		const double r1 = metric(y, pts[index.pivot1]);
		// Rounding slack on the pruning bounds; the final test below is exact.
		const double slack = 1e-9 * (1.0 + r0 + epsilon);
		const auto lo = std::lower_bound(index.sorted_first.begin(), index.sorted_first.end(),
		                                 r0 - epsilon - slack);
		const auto hi = std::upper_bound(lo, index.sorted_first.end(), r0 + epsilon + slack);
		auto& out = succ[a];
		for (auto it = lo; it != hi; ++it) {
			const NodeId b = index.order[static_cast<std::size_t>(it - index.sorted_first.begin())];
			if (std::abs(index.to_second[b] - r1) > epsilon + slack)
				continue;
			if (metric(y, pts[b]) < epsilon)
				out.push_back(b);
		}
	}, 64);
	return TransitionGraph(epsilon, std::move(succ));
}

TransitionGraph build_transition_graph(const SampledSpace& space, const PointMap& f, double epsilon)
{
	check_epsilon(epsilon);
	std::vector<Point> images(space.size());
	for (NodeId a = 0; a < space.size(); ++a)
		images[a] = f(space.point(a));
	return build_transition_graph(space, images, epsilon);
}

TransitionGraph build_transition_graph(const SampledSpace& space, std::span<const NodeId> node_map,
                                       double epsilon)
{
	check_epsilon(epsilon);
	if (node_map.size() != space.size())
		throw Error("node map must have one entry per node");
	std::vector<std::vector<NodeId>> succ(space.size());
	for (NodeId a = 0; a < space.size(); ++a) {
		if (node_map[a] >= space.size())
			throw Error("node map points outside the node set");
		for (NodeId b = 0; b < space.size(); ++b)
			if (space.distance(node_map[a], b) < epsilon)
				succ[a].push_back(b);
	}
	return TransitionGraph(epsilon, std::move(succ));
}

// ---------------------------------------------------------------------------
// Reachability and classes

std::vector<bool> reachable_set(const TransitionGraph& graph, std::span<const NodeId> sources)
{
	std::vector<bool> seen(graph.size(), false);
	std::vector<NodeId> stack;
	for (NodeId s : sources) {
		if (!seen[s]) {
			seen[s] = true;
			stack.push_back(s);
		}
	}
	while (!stack.empty()) {
		const NodeId a = stack.back();
		stack.pop_back();
		for (NodeId b : graph.successors(a)) {
			if (!seen[b]) {
				seen[b] = true;
				stack.push_back(b);
			}
		}
	}
	return seen;
}

bool chain_reaches(const TransitionGraph& graph, NodeId a, NodeId b)
{
	if (a >= graph.size() || b >= graph.size())
		throw Error("chain_reaches: node outside the graph");
	const auto succ = graph.successors(a);
	const std::vector<NodeId> first(succ.begin(), succ.end());
	return reachable_set(graph, first)[b];
}

namespace {

// Iterative Tarjan. Components are emitted in reverse topological order.
std::vector<std::vector<NodeId>> strongly_connected_components(const TransitionGraph& g)
{
	const std::size_t n = g.size();
	constexpr int unvisited = -1;
	std::vector<int> index(n, unvisited), low(n, 0);
	std::vector<bool> on_stack(n, false);
	std::vector<NodeId> stack;
	std::vector<std::vector<NodeId>> out;
	int counter = 0;

	struct Frame
	{
		NodeId node;
		std::size_t next;
	};
	std::vector<Frame> call;

	for (NodeId root = 0; root < n; ++root) {
		if (index[root] != unvisited)
			continue;
		call.push_back({root, 0});
		index[root] = low[root] = counter++;
		stack.push_back(root);
		on_stack[root] = true;
		while (!call.empty()) {
			Frame& fr = call.back();
			const auto succ = g.successors(fr.node);
			if (fr.next < succ.size()) {
				const NodeId w = succ[fr.next++];
				if (index[w] == unvisited) {
					index[w] = low[w] = counter++;
					stack.push_back(w);
					on_stack[w] = true;
					call.push_back({w, 0});
				} else if (on_stack[w]) {
					low[fr.node] = std::min(low[fr.node], index[w]);
				}
				continue;
			}
			const NodeId v = fr.node;
			call.pop_back();
			if (!call.empty())
				low[call.back().node] = std::min(low[call.back().node], low[v]);
			if (low[v] == index[v]) {
				std::vector<NodeId> comp;
				NodeId w;
				do {
					w = stack.back();
					stack.pop_back();
					on_stack[w] = false;
					comp.push_back(w);
				} while (w != v);
				out.push_back(std::move(comp));
			}
		}
	}
	return out;
}

} // namespace

ChainDecomposition chain_decomposition(const TransitionGraph& graph)
{
	ChainDecomposition dec;
	dec.epsilon = graph.epsilon();
	dec.class_of.assign(graph.size(), -1);
	for (auto& comp : strongly_connected_components(graph)) {
		if (comp.size() == 1 && !graph.has_edge(comp[0], comp[0]))
			continue;
		std::sort(comp.begin(), comp.end());
		dec.classes.push_back(std::move(comp));
	}
	std::sort(dec.classes.begin(), dec.classes.end(),
	          [](const auto& a, const auto& b) { return a.front() < b.front(); });
	for (std::size_t c = 0; c < dec.classes.size(); ++c) {
		for (NodeId v : dec.classes[c]) {
			dec.class_of[v] = static_cast<int>(c);
			dec.recurrent_nodes.push_back(v);
		}
	}
	std::sort(dec.recurrent_nodes.begin(), dec.recurrent_nodes.end());
	return dec;
}

nlohmann::json ChainDecomposition::to_json() const
{
	nlohmann::json j;
	j["epsilon"] = epsilon;
	j["class_count"] = classes.size();
	j["class_of"] = class_of;
	j["classes"] = classes;
	return j;
}

bool is_chain_transitive(const TransitionGraph& graph, std::span<const NodeId> subset)
{
	if (subset.empty())
		throw Error("chain transitivity needs a non-empty subset");
	const TransitionGraph sub = graph.induced(subset);
	const auto dec = chain_decomposition(sub);
	return dec.classes.size() == 1 && dec.classes.front().size() == sub.size();
}

bool is_chain_transitive(const SampledSpace& space, const PointMap& f, std::span<const NodeId> subset,
                         double epsilon)
{
	return is_chain_transitive(build_transition_graph(space, f, epsilon), subset);
}

double hausdorff_distance(std::span<const Point> a, std::span<const Point> b, const Metric& metric)
{
	if (a.empty() || b.empty())
		throw Error("empty set has no Hausdorff distance");
	auto one_sided = [&](std::span<const Point> from, std::span<const Point> to) {
		double worst = 0.0;
		for (const auto& x : from) {
			double nearest = std::numeric_limits<double>::infinity();
			for (const auto& y : to)
				nearest = std::min(nearest, metric(x, y));
			worst = std::max(worst, nearest);
		}
		return worst;
	};
	return std::max(one_sided(a, b), one_sided(b, a));
}

std::vector<double> geometric_schedule(double start, double floor, double factor, int steps)
{
	if (!(start > 0.0) || !(floor > 0.0) || !(factor > 0.0 && factor < 1.0) || steps < 1)
		throw Error("invalid epsilon schedule parameters");
	std::vector<double> out;
	double eps = start;
	for (int k = 0; k < steps; ++k, eps *= factor) {
		if (eps <= floor) {
			out.push_back(floor);
			break;
		}
		out.push_back(eps);
	}
	return out;
}

} // namespace phcm
