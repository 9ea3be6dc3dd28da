#pragma once

// Reference implementations used to cross-check the library: slow, direct
// transcriptions of each definition with no shared code or shortcuts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <stdexcept>
#include <vector>

#include "counterscope/cluster.hpp"

namespace oracle {

// Percentile by linear interpolation on the sorted sample: rank h = p(n-1)
// splits between floor(h) and ceil(h).
inline double percentile(std::vector<double> sorted, double p) {
	const double h = p * static_cast<double>(sorted.size() - 1);
	const std::size_t lo = static_cast<std::size_t>(std::floor(h));
	const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
	return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

// Mean of the sample restricted to [P10, P90]; boundary values stay in. If
// the trim removes everything, fall back to the plain mean. Summation runs
// over the ascending sorted values, matching the library exactly.
inline double trimmed_mean(std::vector<double> values) {
	if (values.empty())
		throw std::invalid_argument("empty sample");
	std::sort(values.begin(), values.end());
	const double p10 = percentile(values, 0.10);
	const double p90 = percentile(values, 0.90);
	double sum = 0.0;
	std::size_t kept = 0;
	for (double v : values)
		if (v >= p10 && v <= p90) {
			sum += v;
			++kept;
		}
	if (kept == 0) {
		for (double v : values)
			sum += v;
		kept = values.size();
	}
	return sum / static_cast<double>(kept);
}

// Fractional ranks (ties get the average of the ranks they straddle), then
// Pearson correlation of the two rank vectors.
inline std::vector<double> fractional_ranks(const std::vector<double>& x) {
	const std::size_t n = x.size();
	std::vector<std::size_t> order(n);
	std::iota(order.begin(), order.end(), 0);
	std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
	std::vector<double> ranks(n, 0.0);
	std::size_t i = 0;
	while (i < n) {
		std::size_t j = i;
		while (j + 1 < n && x[order[j + 1]] == x[order[i]])
			++j;
		const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
		for (std::size_t t = i; t <= j; ++t)
			ranks[order[t]] = avg;
		i = j + 1;
	}
	return ranks;
}

inline double spearman_distance(const std::vector<double>& x, const std::vector<double>& y) {
	const auto rx = fractional_ranks(x);
	const auto ry = fractional_ranks(y);
	const std::size_t n = rx.size();
	double mx = 0.0, my = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		mx += rx[i];
		my += ry[i];
	}
	mx /= static_cast<double>(n);
	my /= static_cast<double>(n);
	double sxy = 0.0, sxx = 0.0, syy = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		sxy += (rx[i] - mx) * (ry[i] - my);
		sxx += (rx[i] - mx) * (rx[i] - mx);
		syy += (ry[i] - my) * (ry[i] - my);
	}
	if (sxx == 0.0 || syy == 0.0)
		throw std::invalid_argument("constant vector has no rank order");
	const double rho = sxy / std::sqrt(sxx * syy);
	return std::clamp(1.0 - rho, 0.0, 2.0);
}

// Silhouette straight from the definition: a(i) mean distance within the own
// cluster, b(i) smallest mean distance to another cluster.
inline double silhouette(const std::vector<std::vector<double>>& X, const std::vector<int>& labels) {
	const std::size_t n = X.size();
	auto dist = [&](std::size_t a, std::size_t b) {
		double s = 0.0;
		for (std::size_t t = 0; t < X[a].size(); ++t)
			s += (X[a][t] - X[b][t]) * (X[a][t] - X[b][t]);
		return std::sqrt(s);
	};
	std::map<int, std::size_t> sizes;
	for (int l : labels)
		++sizes[l];
	double total = 0.0;
	for (std::size_t i = 0; i < n; ++i) {
		if (sizes.at(labels[i]) == 1)
			continue; // singleton contributes 0
		double a = 0.0;
		std::map<int, double> to_cluster;
		for (std::size_t j = 0; j < n; ++j) {
			if (j == i)
				continue;
			if (labels[j] == labels[i])
				a += dist(i, j);
			else
				to_cluster[labels[j]] += dist(i, j);
		}
		a /= static_cast<double>(sizes.at(labels[i]) - 1);
		double b = std::numeric_limits<double>::infinity();
		for (const auto& [l, s] : to_cluster)
			b = std::min(b, s / static_cast<double>(sizes.at(l)));
		const double denom = std::max(a, b);
		if (denom > 0.0)
			total += (b - a) / denom;
	}
	return total / static_cast<double>(n);
}

// Ward clustering by full scan: every step examines all active pairs and
// merges the closest, ties to the lexicographically smallest slot pair. The
// working quantity is the squared dissimilarity, updated by Lance-Williams.
inline counterscope::Dendrogram ward(const std::vector<std::vector<double>>& D) {
	const std::size_t n = D.size();
	std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j)
			s[i][j] = D[i][j] * D[i][j];
	std::vector<bool> active(n, true);
	std::vector<double> size(n, 1.0);
	std::vector<int> node(n);
	for (std::size_t i = 0; i < n; ++i)
		node[i] = static_cast<int>(i);
	counterscope::Dendrogram out;
	out.n_leaves = static_cast<int>(n);
	for (std::size_t step = 0; n >= 2 && step + 1 < n; ++step) {
		std::size_t bi = n, bj = n;
		double best = std::numeric_limits<double>::infinity();
		for (std::size_t i = 0; i < n; ++i)
			for (std::size_t j = i + 1; j < n; ++j)
				if (active[i] && active[j] && s[i][j] < best) {
					best = s[i][j];
					bi = i;
					bj = j;
				}
		out.merges.push_back(
		    {node[bi], node[bj], std::sqrt(best), static_cast<int>(size[bi] + size[bj])});
		const double ni = size[bi], nj = size[bj], sij = s[bi][bj];
		for (std::size_t a = 0; a < n; ++a) {
			if (!active[a] || a == bi || a == bj)
				continue;
			const double na = size[a];
			const double updated =
			    ((ni + na) * s[bi][a] + (nj + na) * s[bj][a] - na * sij) / (ni + nj + na);
			s[bi][a] = s[a][bi] = updated;
		}
		active[bj] = false;
		size[bi] = ni + nj;
		node[bi] = static_cast<int>(n + step);
	}
	return out;
}

// Best possible within-cluster sum of squares over every partition of the
// points into exactly k nonempty clusters, enumerated as restricted growth
// strings. Feasible for n up to ~12.
inline double best_wcss(const std::vector<std::vector<double>>& X, int k) {
	const std::size_t n = X.size();
	const std::size_t dim = X[0].size();
	std::vector<int> assign(n, 0);
	double best = std::numeric_limits<double>::infinity();
	auto wcss_of = [&]() {
		std::vector<std::vector<double>> centroid(k, std::vector<double>(dim, 0.0));
		std::vector<int> count(k, 0);
		for (std::size_t i = 0; i < n; ++i) {
			++count[assign[i]];
			for (std::size_t t = 0; t < dim; ++t)
				centroid[assign[i]][t] += X[i][t];
		}
		for (int c = 0; c < k; ++c)
			if (count[c] == 0)
				return std::numeric_limits<double>::infinity();
			else
				for (std::size_t t = 0; t < dim; ++t)
					centroid[c][t] /= static_cast<double>(count[c]);
		double w = 0.0;
		for (std::size_t i = 0; i < n; ++i)
			for (std::size_t t = 0; t < dim; ++t)
				w += (X[i][t] - centroid[assign[i]][t]) * (X[i][t] - centroid[assign[i]][t]);
		return w;
	};
	// restricted growth: assign[i] <= 1 + max(assign[0..i-1]) keeps one
	// canonical labeling per partition
	auto recurse = [&](auto&& self, std::size_t i, int max_used) -> void {
		if (i == n) {
			if (max_used == k - 1)
				best = std::min(best, wcss_of());
			return;
		}
		for (int c = 0; c <= std::min(max_used + 1, k - 1); ++c) {
			assign[i] = c;
			self(self, i + 1, std::max(max_used, c));
		}
	};
	recurse(recurse, 1, 0); // assign[0] stays 0
	return best;
}

// Adjusted Rand index of two labelings; 1 means identical partitions.
inline double adjusted_rand_index(const std::vector<int>& a, const std::vector<int>& b) {
	const std::size_t n = a.size();
	std::map<std::pair<int, int>, double> joint;
	std::map<int, double> ca, cb;
	for (std::size_t i = 0; i < n; ++i) {
		++joint[{a[i], b[i]}];
		++ca[a[i]];
		++cb[b[i]];
	}
	auto ch2 = [](double m) { return m * (m - 1.0) / 2.0; };
	double sum_joint = 0.0, sum_a = 0.0, sum_b = 0.0;
	for (const auto& [key, m] : joint)
		sum_joint += ch2(m);
	for (const auto& [key, m] : ca)
		sum_a += ch2(m);
	for (const auto& [key, m] : cb)
		sum_b += ch2(m);
	const double expected = sum_a * sum_b / ch2(static_cast<double>(n));
	const double max_index = (sum_a + sum_b) / 2.0;
	if (max_index == expected)
		return 1.0; // both partitions trivial
	return (sum_joint - expected) / (max_index - expected);
}

} // namespace oracle
