#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "counterscope/calendar.hpp"
#include "counterscope/ingest.hpp"
#include "counterscope/records.hpp"

namespace counterscope {

// Linear-interpolation percentile on a sorted sample, p in [0,1].
inline double percentile_sorted(const std::vector<double>& sorted, double p) {
	if (sorted.empty())
		throw std::invalid_argument("percentile of empty sample");
	const double h = p * static_cast<double>(sorted.size() - 1);
	const auto lo = static_cast<std::size_t>(h);
	if (lo + 1 >= sorted.size())
		return sorted.back();
	return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

// Robust cell average: values strictly below the 10th or strictly above the
// 90th percentile are dropped before averaging, so a single freak day (an
// accident, a one-off event) cannot drag a monthly profile. Boundary ties are
// kept; if trimming would discard everything, the plain mean is used.
inline double trimmed_mean(std::vector<double> values) {
	if (values.empty())
		throw std::invalid_argument("trimmed_mean of empty sample");
	std::sort(values.begin(), values.end());
	const double p10 = percentile_sorted(values, 0.10);
	const double p90 = percentile_sorted(values, 0.90);
	double sum = 0.0;
	std::size_t kept = 0;
	for (double v : values) {
		if (v < p10 || v > p90)
			continue;
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

enum class ProfileMode : std::uint8_t { Monthly = 0, DayOfWeek = 1 };

inline int period_count(ProfileMode mode) {
	return mode == ProfileMode::Monthly ? 12 : 7;
}

// Label used in the profile cache: months as 1..12, weekdays by name.
inline std::string period_label(ProfileMode mode, int period_index) {
	if (mode == ProfileMode::Monthly)
		return std::to_string(period_index + 1);
	static constexpr const char* names[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
	return names[period_index];
}

inline int period_from_label(ProfileMode mode, const std::string& label) {
	if (mode == ProfileMode::Monthly) {
		const int m = std::stoi(label);
		if (m < 1 || m > 12)
			throw DataError("period out of range '" + label + "'");
		return m - 1;
	}
	static constexpr const char* names[] = {"mon", "tue", "wed", "thu", "fri", "sat", "sun"};
	for (int i = 0; i < 7; ++i)
		if (label == names[i])
			return i;
	throw DataError("unknown weekday '" + label + "'");
}

using HourlyProfile = std::array<double, 24>;

struct ProfileKey {
	std::string counter_id;
	Direction direction = Direction::Dir1;
	DayType daytype = DayType::Workday;

	friend auto operator<=>(const ProfileKey&, const ProfileKey&) = default;
};

// All aggregated profiles of a corpus. Every key carries the full period
// vector (12 months or 7 weekdays); cells without observations are zero.
struct ProfileSet {
	ProfileMode mode = ProfileMode::Monthly;
	std::map<ProfileKey, std::vector<HourlyProfile>> profiles;

	int periods() const { return period_count(mode); }
};

struct BuildStats {
	std::size_t observations = 0;
	std::size_t cells = 0;
	std::size_t zero_filled = 0;
	std::vector<std::string> zero_filled_examples; // capped, for the run log
};

// Aggregates hourly records into per-(counter, direction, day type) profiles:
// one 24-hour curve per calendar month (or weekday). Each cell is the trimmed
// mean over every matching observation in the corpus; hours that never appear
// contribute nothing (they are absent samples, not zeros), while cells with
// no observations at all are zero-filled and counted in the stats.
inline ProfileSet build_profiles(const CleanDataset& data, const HolidayCalendar& holidays,
                                 ProfileMode mode = ProfileMode::Monthly,
                                 BuildStats* stats = nullptr) {
	const int periods = period_count(mode);
	// observation buckets per key, indexed period * 24 + hour
	std::map<ProfileKey, std::vector<std::vector<double>>> buckets;
	std::vector<std::vector<double>>* current = nullptr;
	ProfileKey last_key;
	bool have_last = false;

	BuildStats local;
	for (const auto& rec : data.records) {
		const DayType dt = classify_day(rec.date, holidays);
		ProfileKey key{rec.counter_id, rec.direction, dt};
		if (!have_last || !(key == last_key)) {
			auto [it, inserted] = buckets.try_emplace(std::move(key));
			if (inserted)
				it->second.resize(static_cast<std::size_t>(periods) * 24);
			current = &it->second;
			last_key = it->first;
			have_last = true;
		}
		const int period = mode == ProfileMode::Monthly
		                       ? rec.date.month - 1
		                       : static_cast<int>(weekday_of(rec.date));
		(*current)[static_cast<std::size_t>(period) * 24 + rec.hour].push_back(
		    static_cast<double>(rec.total()));
		++local.observations;
	}

	ProfileSet out;
	out.mode = mode;
	for (auto& [key, cells] : buckets) {
		auto& vec = out.profiles[key];
		vec.assign(periods, HourlyProfile{});
		for (int p = 0; p < periods; ++p) {
			for (int h = 0; h < 24; ++h) {
				auto& obs = cells[static_cast<std::size_t>(p) * 24 + h];
				++local.cells;
				if (obs.empty()) {
					++local.zero_filled;
					if (local.zero_filled_examples.size() < 10)
						local.zero_filled_examples.push_back(
						    key.counter_id + "/" + std::to_string(to_int(key.direction)) + "/" +
						    to_string(key.daytype) + " period " + period_label(mode, p) + " hour " +
						    std::to_string(h));
					vec[p][h] = 0.0;
				} else {
					vec[p][h] = trimmed_mean(std::move(obs));
				}
			}
		}
	}
	if (stats)
		*stats = std::move(local);
	return out;
}

// Rescales a 24-hour profile to percentages of the daily total.
inline HourlyProfile normalize_profile(const HourlyProfile& profile) {
	double sum = 0.0;
	for (double v : profile)
		sum += v;
	if (sum <= 0.0)
		throw DataError("degenerate profile");
	HourlyProfile out;
	for (int h = 0; h < 24; ++h)
		out[h] = profile[h] * 100.0 / sum;
	return out;
}

struct WeeklyShare {
	double weekend = 0.0;
	double workday = 0.0;
};

struct WeeklyShareKey {
	std::string counter_id;
	Direction direction = Direction::Dir1;

	friend auto operator<=>(const WeeklyShareKey&, const WeeklyShareKey&) = default;
};

// Per-day-type totals and distinct observed days of one (counter, direction);
// the sufficient statistic behind the weekly share, cheap to cache.
struct WeeklySums {
	double total[2] = {0.0, 0.0}; // indexed by DayType
	std::int64_t days[2] = {0, 0};
};

inline std::map<WeeklyShareKey, WeeklySums> weekly_sums(const CleanDataset& data,
                                                        const HolidayCalendar& holidays) {
	struct Acc {
		WeeklySums sums;
		Date last_date[2];
		bool has_last[2] = {false, false};
	};
	std::map<WeeklyShareKey, Acc> acc;
	for (const auto& rec : data.records) {
		const auto dt = static_cast<int>(classify_day(rec.date, holidays));
		auto& a = acc[{rec.counter_id, rec.direction}];
		a.sums.total[dt] += static_cast<double>(rec.total());
		if (!a.has_last[dt] || !(a.last_date[dt] == rec.date)) {
			++a.sums.days[dt];
			a.last_date[dt] = rec.date;
			a.has_last[dt] = true;
		}
	}
	std::map<WeeklyShareKey, WeeklySums> out;
	for (const auto& [key, a] : acc)
		out[key] = a.sums;
	return out;
}

inline WeeklyShare weekly_share_from_sums(const WeeklySums& s) {
	const int wk = static_cast<int>(DayType::Weekend);
	const int wd = static_cast<int>(DayType::Workday);
	const double weekend_avg = s.days[wk] > 0 ? s.total[wk] / static_cast<double>(s.days[wk]) : 0.0;
	const double workday_avg = s.days[wd] > 0 ? s.total[wd] / static_cast<double>(s.days[wd]) : 0.0;
	const double denom = weekend_avg + workday_avg;
	if (denom <= 0.0)
		return WeeklyShare{0.5, 0.5}; // silent counter: no preference
	return WeeklyShare{weekend_avg / denom, workday_avg / denom};
}

// Weekend vs. workday share of traffic per counter and direction. Shares are
// built from per-day-type daily averages (total divided by the number of
// distinct days observed), then renormalized to sum to 1 so that corpora with
// unbalanced calendars (5 workdays per 2 weekend days) compare fairly.
inline std::map<WeeklyShareKey, WeeklyShare> weekly_share(const CleanDataset& data,
                                                          const HolidayCalendar& holidays) {
	std::map<WeeklyShareKey, WeeklyShare> out;
	for (const auto& [key, sums] : weekly_sums(data, holidays))
		out[key] = weekly_share_from_sums(sums);
	return out;
}

inline constexpr const char* kProfileCacheHeaderPrefix = "counter_id,direction,daytype,period";

// Profile cache CSV: one row per (counter, direction, daytype, period) with
// 24 hourly values at 6 decimals. '#' lines carry run metadata.
inline void write_profile_cache(std::ostream& out, const ProfileSet& set,
                                const std::vector<std::string>& comment_lines = {}) {
	for (const auto& c : comment_lines)
		out << "# " << c << "\n";
	out << kProfileCacheHeaderPrefix;
	for (int h = 0; h < 24; ++h) {
		char buf[8];
		std::snprintf(buf, sizeof buf, ",h%02d", h);
		out << buf;
	}
	out << "\n";
	for (const auto& [key, periods] : set.profiles) {
		for (std::size_t p = 0; p < periods.size(); ++p) {
			out << key.counter_id << ',' << to_int(key.direction) << ',' << to_string(key.daytype)
			    << ',' << period_label(set.mode, static_cast<int>(p));
			for (int h = 0; h < 24; ++h) {
				char buf[32];
				std::snprintf(buf, sizeof buf, ",%.6f", periods[p][h]);
				out << buf;
			}
			out << "\n";
		}
	}
}

inline ProfileSet read_profile_cache(std::istream& in) {
	ProfileSet set;
	std::string raw;
	std::size_t lineno = 0;
	bool header_seen = false;
	bool mode_known = false;
	while (std::getline(in, raw)) {
		++lineno;
		const std::string line = detail::strip_cr(raw);
		if (line.empty() || line[0] == '#')
			continue;
		if (!header_seen) {
			if (line.rfind(kProfileCacheHeaderPrefix, 0) != 0)
				throw data_error_at_line("unexpected profile cache header", lineno);
			header_seen = true;
			continue;
		}
		const auto fields = detail::split(line, ',');
		if (fields.size() != 28)
			throw data_error_at_line("expected 28 fields, got " + std::to_string(fields.size()), lineno);
		if (!mode_known) {
			const bool numeric = !fields[3].empty() &&
			                     fields[3].find_first_not_of("0123456789") == std::string::npos;
			set.mode = numeric ? ProfileMode::Monthly : ProfileMode::DayOfWeek;
			mode_known = true;
		}
		ProfileKey key;
		key.counter_id = fields[0];
		try {
			key.direction = direction_from_int(detail::parse_int<int>(fields[1], "direction", lineno));
			key.daytype = daytype_from_string(fields[2]);
		} catch (const DataError& e) {
			throw data_error_at_line(e.what(), lineno);
		}
		int period;
		try {
			period = period_from_label(set.mode, fields[3]);
		} catch (const std::exception&) {
			throw data_error_at_line("invalid period '" + fields[3] + "'", lineno);
		}
		auto& vec = set.profiles[key];
		if (vec.empty())
			vec.assign(set.periods(), HourlyProfile{});
		for (int h = 0; h < 24; ++h) {
			try {
				vec[period][h] = std::stod(fields[4 + h]);
			} catch (const std::exception&) {
				throw data_error_at_line("invalid value '" + fields[4 + h] + "'", lineno);
			}
		}
	}
	return set;
}

inline ProfileSet read_profile_cache_file(const std::string& path) {
	std::ifstream in(path);
	if (!in)
		throw DataError("cannot open profile cache '" + path + "'");
	return read_profile_cache(in);
}

} // namespace counterscope
