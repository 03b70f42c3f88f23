#include "phcm/smooth.hpp"

#include <deque>
#include <limits>

namespace phcm {

namespace {

NodeId nearest(const SmoothSystem& sys, const std::vector<Vec>& sample, const Vec& x)
{
	NodeId best = 0;
	double best_d = std::numeric_limits<double>::infinity();
	for (NodeId i = 0; i < sample.size(); ++i) {
		const double d = sys.distance(sample[i], x);
		if (d < best_d) {
			best_d = d;
			best = i;
		}
	}
	return best;
}

// An orientation is a choice of sign o(i) per sample point with
// o(f(i)) = sign(i) * o(i). Solvable iff every cycle of constraints has
// product +1.
bool has_invariant_orientation(const std::vector<NodeId>& map, const std::vector<int>& signs)
{
	const std::size_t n = map.size();
	std::vector<std::vector<std::pair<NodeId, int>>> adjacent(n);
	for (NodeId i = 0; i < n; ++i) {
		adjacent[i].push_back({map[i], signs[i]});
		adjacent[map[i]].push_back({i, signs[i]});
	}
	std::vector<int> orientation(n, 0);
	for (NodeId root = 0; root < n; ++root) {
		if (orientation[root] != 0)
			continue;
		orientation[root] = 1;
		std::deque<NodeId> queue{root};
		while (!queue.empty()) {
			const NodeId a = queue.front();
			queue.pop_front();
			for (auto [b, s] : adjacent[a]) {
				const int want = orientation[a] * s;
				if (orientation[b] == 0) {
					orientation[b] = want;
					queue.push_back(b);
				} else if (orientation[b] != want) {
					return false;
				}
			}
		}
	}
	return true;
}

bool is_permutation(const std::vector<NodeId>& map)
{
	std::vector<bool> hit(map.size(), false);
	for (NodeId y : map) {
		if (hit[y])
			return false;
		hit[y] = true;
	}
	return true;
}

} // namespace

OrientationCover orientation_cover(const SmoothSystem& sys, const std::vector<Vec>& sample,
                                   const std::vector<Vec>& central)
{
	if (sample.empty() || sample.size() != central.size())
		throw Error("orientation cover needs one central direction per sample point");
	OrientationCover cover;
	cover.base = sample;
	cover.directions.reserve(central.size());
	for (const auto& u : central) {
		if (!(u.norm() > 0.0))
			throw Error("central direction must be non-zero");
		cover.directions.push_back(u.normalized());
	}

	const std::size_t n = sample.size();
	cover.base_map.resize(n);
	cover.signs.resize(n);
	cover.lifted_map.resize(2 * n);
	for (NodeId i = 0; i < n; ++i) {
		const NodeId j = nearest(sys, sample, sys.step(sample[i]));
		const double dot = (sys.jacobian(sample[i]) * cover.directions[i]).dot(cover.directions[j]);
		if (dot == 0.0)
			throw Error("central direction not equivariant at sample resolution");
		const int sign = dot > 0.0 ? 1 : -1;
		cover.base_map[i] = j;
		cover.signs[i] = sign;
		cover.lifted_map[2 * i] = 2 * j + (sign > 0 ? 0 : 1);
		cover.lifted_map[2 * i + 1] = 2 * j + (sign > 0 ? 1 : 0);
	}
	cover.preserved = has_invariant_orientation(cover.base_map, cover.signs);
	return cover;
}

bool OrientationCover::sigma_commutes() const
{
	for (NodeId l = 0; l < lifted_map.size(); ++l)
		if (sigma(lifted_map[l]) != lifted_map[sigma(l)])
			return false;
	return true;
}

bool OrientationCover::base_is_permutation() const
{
	return is_permutation(base_map);
}

bool OrientationCover::lifted_is_permutation() const
{
	return is_permutation(lifted_map);
}

std::vector<std::size_t> OrientationCover::lifted_cycles() const
{
	if (!lifted_is_permutation())
		throw Error("lifted map is not a permutation");
	std::vector<bool> seen(lifted_map.size(), false);
	std::vector<std::size_t> cycles;
	for (NodeId start = 0; start < lifted_map.size(); ++start) {
		if (seen[start])
			continue;
		std::size_t length = 0;
		for (NodeId l = start; !seen[l]; l = lifted_map[l]) {
			seen[l] = true;
			++length;
		}
		cycles.push_back(length);
	}
	return cycles;
}

TransitionGraph OrientationCover::lifted_graph() const
{
	std::vector<std::vector<NodeId>> successors(lifted_map.size());
	for (NodeId l = 0; l < lifted_map.size(); ++l)
		successors[l].push_back(lifted_map[l]);
	return TransitionGraph(std::numeric_limits<double>::min(), std::move(successors));
}

nlohmann::json OrientationCover::to_json() const
{
	nlohmann::json j;
	j["preserved"] = preserved;
	j["base_map"] = base_map;
	j["signs"] = signs;
	j["lifted_map"] = lifted_map;
	if (lifted_is_permutation())
		j["lifted_cycles"] = lifted_cycles();
	return j;
}

} // namespace phcm
