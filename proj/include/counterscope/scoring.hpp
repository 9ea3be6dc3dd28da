#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "counterscope/profile.hpp"

namespace counterscope {

// "Omnipresent" traffic floor: for every hour, the mean of the four smallest
// period values. Whatever a road carries even in its quietest months is
// treated as commuter background, not as anything interesting.
inline std::array<double, 24> baseline_of(const std::vector<HourlyProfile>& profiles) {
	if (profiles.size() < 4)
		throw std::invalid_argument("baseline needs at least 4 periods, got " +
		                            std::to_string(profiles.size()));
	std::array<double, 24> base{};
	std::vector<double> column(profiles.size());
	for (int h = 0; h < 24; ++h) {
		for (std::size_t p = 0; p < profiles.size(); ++p)
			column[p] = profiles[p][h];
		std::partial_sort(column.begin(), column.begin() + 4, column.end());
		base[h] = (column[0] + column[1] + column[2] + column[3]) / 4.0;
	}
	return base;
}

namespace detail {

// Sample (n-1) standard deviation of one hour column across periods.
inline double column_std(const std::vector<HourlyProfile>& profiles, int h, double mean) {
	double ss = 0.0;
	for (const auto& p : profiles) {
		const double d = p[h] - mean;
		ss += d * d;
	}
	return std::sqrt(ss / static_cast<double>(profiles.size() - 1));
}

// Mean about the first value as provisional origin: a constant column comes
// out exactly equal to that constant, so its dispersion is exactly zero.
inline double column_mean(const std::vector<HourlyProfile>& profiles, int h) {
	const double origin = profiles[0][h];
	double sum = 0.0;
	for (const auto& p : profiles)
		sum += p[h] - origin;
	return origin + sum / static_cast<double>(profiles.size());
}

} // namespace detail

// Cell where a score statistic peaked: period is 1-based (month 1..12),
// hour is 0-based; period 0 means "not period-specific".
struct ArgMax {
	int period = 0;
	int hour = 0;

	friend bool operator==(const ArgMax&, const ArgMax&) = default;
};

// Largest absolute exceedance over the baseline, clamped at zero.
inline double score_a(const std::vector<HourlyProfile>& profiles, const std::array<double, 24>& baseline,
                      ArgMax* argmax = nullptr) {
	if (profiles.empty())
		throw std::invalid_argument("score_a needs at least 1 period");
	double best = 0.0;
	ArgMax where{1, 0};
	for (std::size_t p = 0; p < profiles.size(); ++p)
		for (int h = 0; h < 24; ++h) {
			const double diff = profiles[p][h] - baseline[h];
			if (diff > best) {
				best = diff;
				where = {static_cast<int>(p) + 1, h};
			}
		}
	if (argmax)
		*argmax = where;
	return best;
}

// Largest relative exceedance. The epsilon of one vehicle per hour keeps
// dead night hours from producing infinite ratios.
inline double score_b(const std::vector<HourlyProfile>& profiles, const std::array<double, 24>& baseline,
                      ArgMax* argmax = nullptr) {
	if (profiles.empty())
		throw std::invalid_argument("score_b needs at least 1 period");
	constexpr double eps = 1.0;
	double best = 0.0;
	ArgMax where{1, 0};
	for (std::size_t p = 0; p < profiles.size(); ++p)
		for (int h = 0; h < 24; ++h) {
			const double ratio = (profiles[p][h] - baseline[h]) / std::max(baseline[h], eps);
			if (ratio > best) {
				best = ratio;
				where = {static_cast<int>(p) + 1, h};
			}
		}
	if (argmax)
		*argmax = where;
	return best;
}

// Mean coefficient of variation across the day: how unstable each hour is
// over the periods, averaged over all 24 hours. Insensitive to scale.
inline double score_c(const std::vector<HourlyProfile>& profiles, ArgMax* argmax = nullptr) {
	if (profiles.size() < 2)
		throw std::invalid_argument("score_c needs at least 2 periods");
	double sum = 0.0;
	double best = -1.0;
	ArgMax where{0, 0};
	for (int h = 0; h < 24; ++h) {
		const double mean = detail::column_mean(profiles, h);
		const double cv = mean == 0.0 ? 0.0 : detail::column_std(profiles, h, mean) / mean;
		sum += cv;
		if (cv > best) {
			best = cv;
			where = {0, h};
		}
	}
	if (argmax)
		*argmax = where;
	return sum / 24.0;
}

// Total absolute deviation from the baseline over every cell: a volume
// measure that rewards sustained, not just peaked, divergence.
inline double score_d(const std::vector<HourlyProfile>& profiles, const std::array<double, 24>& baseline,
                      ArgMax* argmax = nullptr) {
	if (profiles.empty())
		throw std::invalid_argument("score_d needs at least 1 period");
	double sum = 0.0;
	double best = -1.0;
	ArgMax where{1, 0};
	for (std::size_t p = 0; p < profiles.size(); ++p)
		for (int h = 0; h < 24; ++h) {
			const double dev = std::abs(profiles[p][h] - baseline[h]);
			sum += dev;
			if (dev > best) {
				best = dev;
				where = {static_cast<int>(p) + 1, h};
			}
		}
	if (argmax)
		*argmax = where;
	return sum;
}

// Adjusted z-score: deviation from the baseline (instead of the mean) in
// units of the hour's spread across periods. Scale-free and sharp on
// single-period anomalies.
inline double score_e(const std::vector<HourlyProfile>& profiles, const std::array<double, 24>& baseline,
                      ArgMax* argmax = nullptr) {
	if (profiles.size() < 2)
		throw std::invalid_argument("score_e needs at least 2 periods");
	constexpr double eps = 1e-6;
	double best = 0.0;
	ArgMax where{1, 0};
	for (int h = 0; h < 24; ++h) {
		const double mean = detail::column_mean(profiles, h);
		const double sd = std::max(detail::column_std(profiles, h, mean), eps);
		for (std::size_t p = 0; p < profiles.size(); ++p) {
			const double z = (profiles[p][h] - baseline[h]) / sd;
			if (z > best) {
				best = z;
				where = {static_cast<int>(p) + 1, h};
			}
		}
	}
	if (argmax)
		*argmax = where;
	return best;
}

struct ScoreCard {
	ProfileKey key;
	double a = 0.0, b = 0.0, c = 0.0, d = 0.0, e = 0.0;
	ArgMax argmax_a, argmax_b, argmax_c, argmax_d, argmax_e;
};

// One score card per profile key. Requires at least 4 periods (baseline).
inline std::vector<ScoreCard> compute_score_cards(const ProfileSet& set) {
	std::vector<ScoreCard> cards;
	cards.reserve(set.profiles.size());
	for (const auto& [key, profiles] : set.profiles) {
		ScoreCard card;
		card.key = key;
		const auto baseline = baseline_of(profiles);
		card.a = score_a(profiles, baseline, &card.argmax_a);
		card.b = score_b(profiles, baseline, &card.argmax_b);
		card.c = score_c(profiles, &card.argmax_c);
		card.d = score_d(profiles, baseline, &card.argmax_d);
		card.e = score_e(profiles, baseline, &card.argmax_e);
		cards.push_back(std::move(card));
	}
	return cards;
}

enum class ScoreKind : std::uint8_t { A = 0, B, C, D, E };

inline const char* to_string(ScoreKind k) {
	switch (k) {
	case ScoreKind::A: return "score_a";
	case ScoreKind::B: return "score_b";
	case ScoreKind::C: return "score_c";
	case ScoreKind::D: return "score_d";
	default: return "score_e";
	}
}

inline ScoreKind score_kind_from_string(const std::string& s) {
	if (s == "score_a" || s == "a") return ScoreKind::A;
	if (s == "score_b" || s == "b") return ScoreKind::B;
	if (s == "score_c" || s == "c") return ScoreKind::C;
	if (s == "score_d" || s == "d") return ScoreKind::D;
	if (s == "score_e" || s == "e") return ScoreKind::E;
	throw std::invalid_argument("unknown score '" + s + "'");
}

inline double score_value(const ScoreCard& card, ScoreKind kind) {
	switch (kind) {
	case ScoreKind::A: return card.a;
	case ScoreKind::B: return card.b;
	case ScoreKind::C: return card.c;
	case ScoreKind::D: return card.d;
	default: return card.e;
	}
}

inline ArgMax score_argmax(const ScoreCard& card, ScoreKind kind) {
	switch (kind) {
	case ScoreKind::A: return card.argmax_a;
	case ScoreKind::B: return card.argmax_b;
	case ScoreKind::C: return card.argmax_c;
	case ScoreKind::D: return card.argmax_d;
	default: return card.argmax_e;
	}
}

struct RankedEntry {
	std::string counter_id;
	Direction direction = Direction::Dir1;
	DayType daytype = DayType::Workday;
	double value = 0.0;
	ArgMax argmax;
};

// Top-k counters by one score. Each counter appears at most once (its best
// card across directions and day types wins); ties resolve by counter id,
// then direction, then day type, so the result is a deterministic
// permutation prefix of the counter set.
inline std::vector<RankedEntry> rank(const std::vector<ScoreCard>& cards, ScoreKind kind,
                                     std::size_t k) {
	std::vector<const ScoreCard*> sorted;
	sorted.reserve(cards.size());
	for (const auto& c : cards)
		sorted.push_back(&c);
	std::sort(sorted.begin(), sorted.end(), [kind](const ScoreCard* x, const ScoreCard* y) {
		const double vx = score_value(*x, kind);
		const double vy = score_value(*y, kind);
		if (vx != vy)
			return vx > vy;
		return std::tie(x->key.counter_id, x->key.direction, x->key.daytype) <
		       std::tie(y->key.counter_id, y->key.direction, y->key.daytype);
	});
	std::vector<RankedEntry> out;
	std::set<std::string> seen;
	for (const ScoreCard* c : sorted) {
		if (out.size() >= k)
			break;
		if (!seen.insert(c->key.counter_id).second)
			continue;
		out.push_back({c->key.counter_id, c->key.direction, c->key.daytype, score_value(*c, kind),
		               score_argmax(*c, kind)});
	}
	return out;
}

inline std::vector<RankedEntry> rank(const std::vector<ScoreCard>& cards, const std::string& kind,
                                     std::size_t k) {
	return rank(cards, score_kind_from_string(kind), k);
}

struct SeasonalCard {
	std::string counter_id;
	Direction direction = Direction::Dir1;
	std::array<double, 4> shares{};     // indexed by Season
	std::array<double, 4> deviations{}; // counter share minus corpus share
	double max_deviation = 0.0;
	Season argmax_season = Season::Spring;
};

struct SeasonalResult {
	std::vector<SeasonalCard> cards;        // sorted by (counter, direction)
	std::array<double, 4> corpus_shares{};  // pooled over every record
};

// Raw per-season traffic sums of one (counter, direction); the sufficient
// statistic for seasonal scoring, cheap to cache and pool.
using SeasonSums = std::map<WeeklyShareKey, std::array<double, 4>>;

inline SeasonSums season_sums(const CleanDataset& data) {
	SeasonSums totals;
	for (const auto& rec : data.records)
		totals[{rec.counter_id, rec.direction}][static_cast<int>(season_of_month(rec.date.month))] +=
		    static_cast<double>(rec.total());
	return totals;
}

// Season share of each counter against the pooled corpus share. Deviations
// sum to zero per card by construction. Directions with zero annual traffic
// have no seasonal behavior and are omitted.
inline SeasonalResult seasonal_from_sums(const SeasonSums& totals) {
	std::array<double, 4> corpus{};
	for (const auto& [key, seasons] : totals)
		for (int s = 0; s < 4; ++s)
			corpus[s] += seasons[s];
	const double corpus_total = corpus[0] + corpus[1] + corpus[2] + corpus[3];
	SeasonalResult result;
	if (corpus_total <= 0.0)
		return result;
	for (int s = 0; s < 4; ++s)
		result.corpus_shares[s] = corpus[s] / corpus_total;
	for (const auto& [key, seasons] : totals) {
		const double annual = seasons[0] + seasons[1] + seasons[2] + seasons[3];
		if (annual <= 0.0)
			continue;
		SeasonalCard card;
		card.counter_id = key.counter_id;
		card.direction = key.direction;
		for (int s = 0; s < 4; ++s) {
			card.shares[s] = seasons[s] / annual;
			card.deviations[s] = card.shares[s] - result.corpus_shares[s];
		}
		card.max_deviation = card.deviations[0];
		card.argmax_season = Season::Spring;
		for (int s = 1; s < 4; ++s)
			if (card.deviations[s] > card.max_deviation) {
				card.max_deviation = card.deviations[s];
				card.argmax_season = static_cast<Season>(s);
			}
		result.cards.push_back(std::move(card));
	}
	return result;
}

inline SeasonalResult seasonal_score(const CleanDataset& data) {
	return seasonal_from_sums(season_sums(data));
}

// Top-k counters by seasonal deviation: for a given season, or by each
// card's own maximum deviation when no season is requested.
inline std::vector<RankedEntry> rank_seasonal(const std::vector<SeasonalCard>& cards,
                                              std::size_t k,
                                              std::optional<Season> season = std::nullopt) {
	std::vector<const SeasonalCard*> sorted;
	sorted.reserve(cards.size());
	for (const auto& c : cards)
		sorted.push_back(&c);
	auto value = [&](const SeasonalCard& c) {
		return season ? c.deviations[static_cast<int>(*season)] : c.max_deviation;
	};
	std::sort(sorted.begin(), sorted.end(), [&](const SeasonalCard* x, const SeasonalCard* y) {
		const double vx = value(*x);
		const double vy = value(*y);
		if (vx != vy)
			return vx > vy;
		return std::tie(x->counter_id, x->direction) < std::tie(y->counter_id, y->direction);
	});
	std::vector<RankedEntry> out;
	std::set<std::string> seen;
	for (const SeasonalCard* c : sorted) {
		if (out.size() >= k)
			break;
		if (!seen.insert(c->counter_id).second)
			continue;
		const Season s = season.value_or(c->argmax_season);
		out.push_back({c->counter_id, c->direction, DayType::Workday, value(*c),
		               ArgMax{static_cast<int>(s) + 1, 0}});
	}
	return out;
}

struct WeekTagCard {
	std::string counter_id;
	Direction direction = Direction::Dir1;
	DayType tag = DayType::Workday;
	double weekend_share = 0.0;
	double workday_share = 0.0;
};

// Tags a counter as a weekend or workday road by its larger weekly share.
// An exact 50:50 split stays a workday road.
inline DayType week_tag(const WeeklyShare& share) {
	return share.weekend > 0.5 ? DayType::Weekend : DayType::Workday;
}

inline std::vector<WeekTagCard> week_tag_cards(const std::map<WeeklyShareKey, WeeklyShare>& shares) {
	std::vector<WeekTagCard> out;
	out.reserve(shares.size());
	for (const auto& [key, share] : shares)
		out.push_back({key.counter_id, key.direction, week_tag(share), share.weekend, share.workday});
	return out;
}

} // namespace counterscope
