#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "counterscope/profile.hpp"
#include "counterscope/rng.hpp"

namespace counterscope {

struct FeatureRow {
	std::string counter_id;
	Direction direction = Direction::Dir1;
	DayType daytype = DayType::Workday;
	int month = 0; // 1..12
	std::array<double, 24> values{};
};

// Normalized (percent-of-day) profile vectors ready for clustering, one row
// per (counter, direction, daytype, month). Profiles that are all zero have
// no shape to speak of and are skipped, with a note.
struct FeatureMatrix {
	std::vector<FeatureRow> rows;
	std::vector<std::string> skipped;

	std::vector<std::vector<double>> as_vectors() const {
		std::vector<std::vector<double>> out;
		out.reserve(rows.size());
		for (const auto& r : rows)
			out.emplace_back(r.values.begin(), r.values.end());
		return out;
	}

	std::string row_label(std::size_t i) const {
		const auto& r = rows[i];
		return r.counter_id + "/" + std::to_string(to_int(r.direction)) + "/" +
		       to_string(r.daytype) + "/m" + std::to_string(r.month);
	}
};

// month = 1..12 selects one month per key; month = 0 keeps all of them.
inline FeatureMatrix build_feature_matrix(const ProfileSet& set, int month = 5,
                                          std::optional<Direction> direction = std::nullopt,
                                          std::optional<DayType> daytype = std::nullopt) {
	if (set.mode != ProfileMode::Monthly)
		throw std::invalid_argument("feature matrix requires monthly profiles");
	if (month < 0 || month > 12)
		throw std::invalid_argument("month out of range: " + std::to_string(month));
	FeatureMatrix out;
	for (const auto& [key, periods] : set.profiles) {
		if (direction && key.direction != *direction)
			continue;
		if (daytype && key.daytype != *daytype)
			continue;
		for (int m = 1; m <= 12; ++m) {
			if (month != 0 && m != month)
				continue;
			FeatureRow row;
			row.counter_id = key.counter_id;
			row.direction = key.direction;
			row.daytype = key.daytype;
			row.month = m;
			try {
				row.values = normalize_profile(periods[m - 1]);
			} catch (const DataError&) {
				out.skipped.push_back(key.counter_id + "/" + std::to_string(to_int(key.direction)) +
				                      "/" + to_string(key.daytype) + "/m" + std::to_string(m));
				continue;
			}
			out.rows.push_back(std::move(row));
		}
	}
	return out;
}

namespace detail {

inline double dist2(const std::vector<double>& a, const std::vector<double>& b) {
	double s = 0.0;
	for (std::size_t i = 0; i < a.size(); ++i) {
		const double d = a[i] - b[i];
		s += d * d;
	}
	return s;
}

} // namespace detail

struct KMeansParams {
	int k = 2;
	std::uint64_t seed = 42;
	int restarts = 10;
	int max_iterations = 300;
};

struct KMeansResult {
	int k = 0;
	std::vector<int> assignments;
	std::vector<std::vector<double>> centroids;
	double wcss = 0.0;
	int iterations = 0;
	int best_restart = 0;
	std::vector<double> wcss_history; // per-iteration objective of the winning run
};

namespace detail {

struct LloydRun {
	std::vector<int> assignments;
	std::vector<std::vector<double>> centroids;
	double wcss = 0.0;
	int iterations = 0;
	std::vector<double> wcss_history;
};

inline LloydRun lloyd_once(const std::vector<std::vector<double>>& X, int k, std::uint64_t seed,
                           int max_iterations) {
	const std::size_t n = X.size();
	std::mt19937_64 g(seed);

	// k-means++ seeding
	std::vector<std::vector<double>> centroids;
	centroids.reserve(k);
	centroids.push_back(X[rng::index(g, n)]);
	std::vector<double> d2(n);
	for (int c = 1; c < k; ++c) {
		double total = 0.0;
		for (std::size_t i = 0; i < n; ++i) {
			double best = std::numeric_limits<double>::infinity();
			for (const auto& ctr : centroids)
				best = std::min(best, dist2(X[i], ctr));
			d2[i] = best;
			total += best;
		}
		centroids.push_back(total > 0.0 ? X[rng::weighted_index(g, d2, total)]
		                                : X[rng::index(g, n)]);
	}

	LloydRun run;
	run.centroids = std::move(centroids);
	run.assignments.assign(n, -1);
	std::vector<int> counts(k);
	for (int iter = 0; iter < max_iterations; ++iter) {
		// assignment step; ties go to the lower cluster index
		bool changed = false;
		std::fill(counts.begin(), counts.end(), 0);
		for (std::size_t i = 0; i < n; ++i) {
			int best_c = 0;
			double best_d = dist2(X[i], run.centroids[0]);
			for (int c = 1; c < k; ++c) {
				const double d = dist2(X[i], run.centroids[c]);
				if (d < best_d) {
					best_d = d;
					best_c = c;
				}
			}
			if (run.assignments[i] != best_c) {
				run.assignments[i] = best_c;
				changed = true;
			}
			++counts[best_c];
		}

		// an emptied cluster is re-seeded at the point that fits worst
		for (int c = 0; c < k; ++c) {
			if (counts[c] != 0)
				continue;
			std::size_t worst = 0;
			double worst_d = -1.0;
			for (std::size_t i = 0; i < n; ++i) {
				if (counts[run.assignments[i]] <= 1)
					continue; // do not empty another cluster
				const double d = dist2(X[i], run.centroids[run.assignments[i]]);
				if (d > worst_d) {
					worst_d = d;
					worst = i;
				}
			}
			if (worst_d < 0.0)
				continue; // fewer distinct points than clusters; leave empty
			--counts[run.assignments[worst]];
			run.centroids[c] = X[worst];
			run.assignments[worst] = c;
			++counts[c];
			changed = true;
		}

		// update step
		for (int c = 0; c < k; ++c)
			if (counts[c] > 0)
				std::fill(run.centroids[c].begin(), run.centroids[c].end(), 0.0);
		for (std::size_t i = 0; i < n; ++i) {
			auto& ctr = run.centroids[run.assignments[i]];
			for (std::size_t d = 0; d < X[i].size(); ++d)
				ctr[d] += X[i][d];
		}
		for (int c = 0; c < k; ++c)
			if (counts[c] > 0)
				for (auto& v : run.centroids[c])
					v /= counts[c];

		double wcss = 0.0;
		for (std::size_t i = 0; i < n; ++i)
			wcss += dist2(X[i], run.centroids[run.assignments[i]]);
		run.wcss_history.push_back(wcss);
		run.wcss = wcss;
		run.iterations = iter + 1;
		if (!changed)
			break;
	}
	return run;
}

} // namespace detail

// Lloyd's algorithm with k-means++ seeding and deterministic restarts. Every
// restart derives its own stream from the master seed; the run with the
// lowest within-cluster sum of squares wins, earlier restart on ties.
inline KMeansResult kmeans(const std::vector<std::vector<double>>& X, const KMeansParams& params) {
	if (X.empty())
		throw std::invalid_argument("kmeans on empty matrix");
	if (params.k < 1)
		throw std::invalid_argument("k must be >= 1");
	if (static_cast<std::size_t>(params.k) > X.size())
		throw std::invalid_argument("k (" + std::to_string(params.k) + ") exceeds number of rows (" +
		                            std::to_string(X.size()) + ")");
	if (params.restarts < 1)
		throw std::invalid_argument("restarts must be >= 1");
	for (const auto& row : X)
		if (row.size() != X[0].size())
			throw std::invalid_argument("ragged feature matrix");

	std::mt19937_64 master(params.seed);
	std::vector<std::uint64_t> run_seeds(params.restarts);
	for (auto& s : run_seeds)
		s = master();

	KMeansResult best;
	best.k = params.k;
	double best_wcss = std::numeric_limits<double>::infinity();
	for (int r = 0; r < params.restarts; ++r) {
		auto run = detail::lloyd_once(X, params.k, run_seeds[r], params.max_iterations);
		if (run.wcss < best_wcss) {
			best_wcss = run.wcss;
			best.assignments = std::move(run.assignments);
			best.centroids = std::move(run.centroids);
			best.wcss = run.wcss;
			best.iterations = run.iterations;
			best.wcss_history = std::move(run.wcss_history);
			best.best_restart = r;
		}
	}
	return best;
}

// Mean silhouette over all points, Euclidean distances. Singleton clusters
// score 0, as do coincident points (a = b = 0).
inline double silhouette(const std::vector<std::vector<double>>& X, const std::vector<int>& assignments) {
	const std::size_t n = X.size();
	if (assignments.size() != n)
		throw std::invalid_argument("assignments size mismatch");
	int k = 0;
	for (int a : assignments) {
		if (a < 0)
			throw std::invalid_argument("negative cluster label");
		k = std::max(k, a + 1);
	}
	std::vector<std::size_t> sizes(k, 0);
	for (int a : assignments)
		++sizes[a];
	int nonempty = 0;
	for (auto s : sizes)
		nonempty += s > 0;
	if (nonempty < 2)
		throw std::invalid_argument("silhouette needs at least 2 clusters");

	double total = 0.0;
	std::vector<double> mean_dist(k);
	for (std::size_t i = 0; i < n; ++i) {
		if (sizes[assignments[i]] == 1) {
			continue; // singleton contributes 0
		}
		std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
		for (std::size_t j = 0; j < n; ++j) {
			if (j == i)
				continue;
			mean_dist[assignments[j]] += std::sqrt(detail::dist2(X[i], X[j]));
		}
		const int own = assignments[i];
		const double a = mean_dist[own] / static_cast<double>(sizes[own] - 1);
		double b = std::numeric_limits<double>::infinity();
		for (int c = 0; c < k; ++c) {
			if (c == own || sizes[c] == 0)
				continue;
			b = std::min(b, mean_dist[c] / static_cast<double>(sizes[c]));
		}
		const double denom = std::max(a, b);
		total += denom > 0.0 ? (b - a) / denom : 0.0;
	}
	return total / static_cast<double>(n);
}

struct SelectKResult {
	int best_k = 0;
	KMeansResult best;
	std::vector<std::pair<int, double>> table; // (k, silhouette), ascending k
};

// Scans k over a range and keeps the best mean silhouette; ties prefer the
// smaller (simpler) k. The range is clipped to feasible k <= n.
inline SelectKResult select_k(const std::vector<std::vector<double>>& X, int k_min = 2, int k_max = 10,
                              std::uint64_t seed = 42, int restarts = 10) {
	if (k_min < 2)
		throw std::invalid_argument("k must be >= 2 for silhouette");
	if (k_max < k_min)
		throw std::invalid_argument("empty k range");
	const int k_cap = static_cast<int>(std::min<std::size_t>(k_max, X.size()));
	if (k_min > k_cap)
		throw std::invalid_argument("k range infeasible for " + std::to_string(X.size()) + " rows");
	SelectKResult out;
	double best_sil = -2.0;
	for (int k = k_min; k <= k_cap; ++k) {
		KMeansParams params;
		params.k = k;
		params.seed = seed;
		params.restarts = restarts;
		auto model = kmeans(X, params);
		const double sil = silhouette(X, model.assignments);
		out.table.emplace_back(k, sil);
		if (sil > best_sil) {
			best_sil = sil;
			out.best_k = k;
			out.best = std::move(model);
		}
	}
	return out;
}

namespace detail {

// Fractional (average-tie) ranks, 1-based.
inline std::vector<double> rank_vector(const std::vector<double>& values) {
	const std::size_t n = values.size();
	std::vector<std::size_t> order(n);
	for (std::size_t i = 0; i < n; ++i)
		order[i] = i;
	std::sort(order.begin(), order.end(),
	          [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
	std::vector<double> ranks(n);
	std::size_t i = 0;
	while (i < n) {
		std::size_t j = i;
		while (j + 1 < n && values[order[j + 1]] == values[order[i]])
			++j;
		const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
		for (std::size_t t = i; t <= j; ++t)
			ranks[order[t]] = avg;
		i = j + 1;
	}
	return ranks;
}

} // namespace detail

// Pairwise Spearman rank-correlation distance, d = 1 - rho, in [0, 2].
// A constant row has no rank order at all and is reported as an error;
// row_labels (if given) make that report actionable.
inline std::vector<std::vector<double>> spearman_distance_matrix(
    const std::vector<std::vector<double>>& rows,
    const std::vector<std::string>& row_labels = {}) {
	const std::size_t n = rows.size();
	std::vector<std::vector<double>> units(n);
	for (std::size_t i = 0; i < n; ++i) {
		auto ranks = detail::rank_vector(rows[i]);
		double mean = 0.0;
		for (double r : ranks)
			mean += r;
		mean /= static_cast<double>(ranks.size());
		double norm = 0.0;
		for (auto& r : ranks) {
			r -= mean;
			norm += r * r;
		}
		if (norm == 0.0) {
			const std::string label = i < row_labels.size() ? row_labels[i] : std::to_string(i);
			throw DataError("constant profile row '" + label + "' has no rank order");
		}
		norm = std::sqrt(norm);
		for (auto& r : ranks)
			r /= norm;
		units[i] = std::move(ranks);
	}
	std::vector<std::vector<double>> D(n, std::vector<double>(n, 0.0));
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = i + 1; j < n; ++j) {
			double rho = 0.0;
			for (std::size_t t = 0; t < units[i].size(); ++t)
				rho += units[i][t] * units[j][t];
			const double d = std::clamp(1.0 - rho, 0.0, 2.0);
			D[i][j] = d;
			D[j][i] = d;
		}
	return D;
}

struct Merge {
	int left = 0;   // node ids: leaves 0..n-1, merge t creates node n+t
	int right = 0;
	double height = 0.0;
	int size = 0; // members of the merged cluster
};

struct Dendrogram {
	int n_leaves = 0;
	std::vector<Merge> merges; // n_leaves - 1 entries
};

// Agglomerative clustering with Ward's criterion via the Lance-Williams
// update on squared dissimilarities. Deterministic: among equally close
// pairs the one with the smallest row indices merges first. Reported heights
// are the square roots of the merge cost, so they are monotone along any
// root path.
inline Dendrogram ward_hclust(const std::vector<std::vector<double>>& D) {
	const std::size_t n = D.size();
	for (std::size_t i = 0; i < n; ++i) {
		if (D[i].size() != n)
			throw std::invalid_argument("distance matrix not square");
		if (D[i][i] != 0.0)
			throw DataError("distance matrix has nonzero diagonal at " + std::to_string(i));
		for (std::size_t j = i + 1; j < n; ++j) {
			if (D[i][j] != D[j][i])
				throw DataError("distance matrix not symmetric at (" + std::to_string(i) + "," +
				                std::to_string(j) + ")");
			if (D[i][j] < 0.0)
				throw DataError("negative distance at (" + std::to_string(i) + "," + std::to_string(j) + ")");
		}
	}

	Dendrogram out;
	out.n_leaves = static_cast<int>(n);
	if (n < 2)
		return out;

	// working matrix of squared dissimilarities; slot i always holds the
	// cluster whose smallest leaf index is i
	std::vector<std::vector<double>> s(n, std::vector<double>(n, 0.0));
	for (std::size_t i = 0; i < n; ++i)
		for (std::size_t j = 0; j < n; ++j)
			s[i][j] = D[i][j] * D[i][j];
	std::vector<bool> active(n, true);
	std::vector<double> size(n, 1.0);
	std::vector<int> node_id(n);
	for (std::size_t i = 0; i < n; ++i)
		node_id[i] = static_cast<int>(i);

	// nearest active neighbour to the right of each slot
	constexpr double inf = std::numeric_limits<double>::infinity();
	std::vector<double> nbr_dist(n, inf);
	std::vector<std::size_t> nbr(n, n);
	auto recompute_row = [&](std::size_t i) {
		nbr_dist[i] = inf;
		nbr[i] = n;
		for (std::size_t j = i + 1; j < n; ++j)
			if (active[j] && s[i][j] < nbr_dist[i]) {
				nbr_dist[i] = s[i][j];
				nbr[i] = j;
			}
	};
	for (std::size_t i = 0; i < n; ++i)
		recompute_row(i);

	for (std::size_t step = 0; step + 1 < n; ++step) {
		// global minimum; scanning order makes ties resolve to smallest (i, j)
		std::size_t bi = n;
		double best = inf;
		for (std::size_t i = 0; i < n; ++i)
			if (active[i] && nbr[i] < n && nbr_dist[i] < best) {
				best = nbr_dist[i];
				bi = i;
			}
		const std::size_t i = bi;
		const std::size_t j = nbr[i];

		out.merges.push_back({node_id[i], node_id[j], std::sqrt(s[i][j]),
		                      static_cast<int>(size[i] + size[j])});

		const double ni = size[i], nj = size[j], sij = s[i][j];
		active[j] = false;
		size[i] = ni + nj;
		node_id[i] = static_cast<int>(n + step);
		for (std::size_t a = 0; a < n; ++a) {
			if (!active[a] || a == i)
				continue;
			const double na = size[a];
			const double updated =
			    ((ni + na) * s[i][a] + (nj + na) * s[j][a] - na * sij) / (ni + nj + na);
			s[i][a] = updated;
			s[a][i] = updated;
		}
		recompute_row(i);
		for (std::size_t a = 0; a < i; ++a) {
			if (!active[a])
				continue;
			if (nbr[a] == i || nbr[a] == j) {
				recompute_row(a);
			} else if (s[a][i] < nbr_dist[a] || (s[a][i] == nbr_dist[a] && i < nbr[a])) {
				nbr_dist[a] = s[a][i];
				nbr[a] = i;
			}
		}
		for (std::size_t a = i + 1; a < j; ++a)
			if (active[a] && nbr[a] == j)
				recompute_row(a);
	}
	return out;
}

// k clusters by undoing the last k-1 merges. Labels are dense and assigned
// in order of each cluster's first leaf.
inline std::vector<int> cut_dendrogram(const Dendrogram& tree, int k) {
	const int n = tree.n_leaves;
	if (k < 1 || k > n)
		throw std::invalid_argument("cut k out of range: " + std::to_string(k));
	std::vector<int> parent(n + tree.merges.size());
	for (std::size_t i = 0; i < parent.size(); ++i)
		parent[i] = static_cast<int>(i);
	std::function<int(int)> find = [&](int x) {
		while (parent[x] != x) {
			parent[x] = parent[parent[x]];
			x = parent[x];
		}
		return x;
	};
	const int merges_applied = n - k;
	for (int t = 0; t < merges_applied; ++t) {
		const auto& m = tree.merges[t];
		const int target = n + t;
		parent[find(m.left)] = target;
		parent[find(m.right)] = target;
	}
	std::vector<int> labels(n, -1);
	std::map<int, int> dense;
	for (int leaf = 0; leaf < n; ++leaf) {
		const int root = find(leaf);
		auto [it, inserted] = dense.emplace(root, static_cast<int>(dense.size()));
		labels[leaf] = it->second;
	}
	return labels;
}

struct ClusterProfile {
	int cluster = 0;
	int size = 0;
	std::array<double, 24> mean{};
	std::array<double, 24> stddev{}; // sample std; 0 for singletons
	double weekend_pct = 0.0;
	double workday_pct = 0.0;
};

// Per-cluster hourly mean and spread plus day-type composition, for reports.
inline std::vector<ClusterProfile> cluster_profiles(const FeatureMatrix& X,
                                                    const std::vector<int>& labels) {
	if (labels.size() != X.rows.size())
		throw std::invalid_argument("labels size mismatch");
	int k = 0;
	for (int l : labels) {
		if (l < 0)
			throw std::invalid_argument("negative cluster label");
		k = std::max(k, l + 1);
	}
	std::vector<ClusterProfile> out(k);
	for (int c = 0; c < k; ++c)
		out[c].cluster = c;
	for (std::size_t i = 0; i < X.rows.size(); ++i) {
		auto& p = out[labels[i]];
		++p.size;
		for (int h = 0; h < 24; ++h)
			p.mean[h] += X.rows[i].values[h];
		if (X.rows[i].daytype == DayType::Weekend)
			p.weekend_pct += 1.0;
		else
			p.workday_pct += 1.0;
	}
	for (auto& p : out) {
		if (p.size == 0)
			continue;
		for (int h = 0; h < 24; ++h)
			p.mean[h] /= p.size;
		p.weekend_pct = p.weekend_pct * 100.0 / p.size;
		p.workday_pct = p.workday_pct * 100.0 / p.size;
	}
	for (std::size_t i = 0; i < X.rows.size(); ++i) {
		auto& p = out[labels[i]];
		for (int h = 0; h < 24; ++h) {
			const double d = X.rows[i].values[h] - p.mean[h];
			p.stddev[h] += d * d;
		}
	}
	for (auto& p : out)
		if (p.size > 1)
			for (int h = 0; h < 24; ++h)
				p.stddev[h] = std::sqrt(p.stddev[h] / (p.size - 1));
		else
			p.stddev.fill(0.0);
	return out;
}

} // namespace counterscope
