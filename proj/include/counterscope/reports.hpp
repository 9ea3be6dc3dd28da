#pragma once

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "counterscope/cluster.hpp"
#include "counterscope/config.hpp"
#include "counterscope/ingest.hpp"
#include "counterscope/scoring.hpp"

namespace counterscope {

namespace detail {

inline std::string fmt6(double v) {
	char buf[40];
	std::snprintf(buf, sizeof buf, "%.6f", v);
	return buf;
}

inline void write_comments(std::ostream& out, const RunMeta& meta,
                           const std::vector<std::string>& extra = {}) {
	for (const auto& line : meta.comment_lines())
		out << "# " << line << "\n";
	for (const auto& line : extra)
		out << "# " << line << "\n";
}

inline double parse_double(const std::string& text, const char* what, std::size_t lineno) {
	try {
		std::size_t pos = 0;
		const double v = std::stod(text, &pos);
		if (pos != text.size())
			throw std::invalid_argument("trailing characters");
		return v;
	} catch (const std::exception&) {
		throw data_error_at_line(std::string("invalid ") + what + " '" + text + "'", lineno);
	}
}

} // namespace detail

// --- score artifacts ---------------------------------------------------------

inline constexpr const char* kScoresHeader =
    "counter_id,direction,daytype,score_a,score_b,score_c,score_d,score_e,argmax_month,argmax_hour";

// One row per score card; the argmax columns locate the strongest
// standardized deviation (the score_e cell).
inline void write_scores_csv(std::ostream& out, const std::vector<ScoreCard>& cards,
                             const RunMeta& meta) {
	detail::write_comments(out, meta);
	out << kScoresHeader << "\n";
	for (const auto& card : cards) {
		out << card.key.counter_id << "," << to_int(card.key.direction) << ","
		    << to_string(card.key.daytype) << "," << detail::fmt6(card.a) << ","
		    << detail::fmt6(card.b) << "," << detail::fmt6(card.c) << "," << detail::fmt6(card.d)
		    << "," << detail::fmt6(card.e) << "," << card.argmax_e.period << "," << card.argmax_e.hour
		    << "\n";
	}
}

inline constexpr const char* kSeasonalHeader =
    "counter_id,direction,share_spring,share_summer,share_autumn,share_winter,"
    "dev_spring,dev_summer,dev_autumn,dev_winter,max_deviation,argmax_season";

inline void write_seasonal_csv(std::ostream& out, const SeasonalResult& result,
                               const RunMeta& meta) {
	std::vector<std::string> extra;
	for (int s = 0; s < 4; ++s)
		extra.push_back(std::string("corpus_share_") + to_string(static_cast<Season>(s)) + ": " +
		                detail::fmt6(result.corpus_shares[s]));
	detail::write_comments(out, meta, extra);
	out << kSeasonalHeader << "\n";
	for (const auto& card : result.cards) {
		out << card.counter_id << "," << to_int(card.direction);
		for (int s = 0; s < 4; ++s)
			out << "," << detail::fmt6(card.shares[s]);
		for (int s = 0; s < 4; ++s)
			out << "," << detail::fmt6(card.deviations[s]);
		out << "," << detail::fmt6(card.max_deviation) << "," << to_string(card.argmax_season)
		    << "\n";
	}
}

inline constexpr const char* kWeekTagHeader =
    "counter_id,direction,weekend_share,workday_share,tag";

inline void write_weektag_csv(std::ostream& out, const std::vector<WeekTagCard>& cards,
                              const RunMeta& meta) {
	detail::write_comments(out, meta);
	out << kWeekTagHeader << "\n";
	for (const auto& card : cards)
		out << card.counter_id << "," << to_int(card.direction) << ","
		    << detail::fmt6(card.weekend_share) << "," << detail::fmt6(card.workday_share) << ","
		    << to_string(card.tag) << "\n";
}

// --- rankings ----------------------------------------------------------------

struct RankingRow {
	std::string score;   // "score_a".."score_e" or "seasonal"
	int rank = 0;        // 1-based
	std::string counter_id;
	Direction direction = Direction::Dir1;
	std::string daytype; // "workday"/"weekend", "-" for seasonal rows
	double value = 0.0;
	std::string context; // "month=10;hour=14" or "season=winter"
};

inline std::vector<RankingRow> ranking_rows(ScoreKind kind,
                                            const std::vector<RankedEntry>& entries) {
	std::vector<RankingRow> rows;
	rows.reserve(entries.size());
	int r = 1;
	for (const auto& e : entries) {
		RankingRow row;
		row.score = to_string(kind);
		row.rank = r++;
		row.counter_id = e.counter_id;
		row.direction = e.direction;
		row.daytype = to_string(e.daytype);
		row.value = e.value;
		if (kind == ScoreKind::C)
			row.context = "hour=" + std::to_string(e.argmax.hour);
		else
			row.context =
			    "month=" + std::to_string(e.argmax.period) + ";hour=" + std::to_string(e.argmax.hour);
		rows.push_back(std::move(row));
	}
	return rows;
}

inline std::vector<RankingRow> ranking_rows_seasonal(const std::vector<RankedEntry>& entries) {
	std::vector<RankingRow> rows;
	rows.reserve(entries.size());
	int r = 1;
	for (const auto& e : entries) {
		RankingRow row;
		row.score = "seasonal";
		row.rank = r++;
		row.counter_id = e.counter_id;
		row.direction = e.direction;
		row.daytype = "-";
		row.value = e.value;
		row.context = std::string("season=") + to_string(static_cast<Season>(e.argmax.period - 1));
		rows.push_back(std::move(row));
	}
	return rows;
}

inline constexpr const char* kRankingsHeader =
    "score,rank,counter_id,direction,daytype,value,context";

inline void write_rankings_csv(std::ostream& out, const std::vector<RankingRow>& rows,
                               const RunMeta& meta) {
	detail::write_comments(out, meta);
	out << kRankingsHeader << "\n";
	for (const auto& row : rows)
		out << row.score << "," << row.rank << "," << row.counter_id << "," << to_int(row.direction)
		    << "," << row.daytype << "," << detail::fmt6(row.value) << "," << row.context << "\n";
}

// --- cached sufficient statistics ---------------------------------------------

inline constexpr const char* kSeasonSumsHeader = "counter_id,direction,spring,summer,autumn,winter";

inline void write_season_sums_csv(std::ostream& out, const SeasonSums& sums, const RunMeta& meta) {
	detail::write_comments(out, meta);
	out << kSeasonSumsHeader << "\n";
	for (const auto& [key, seasons] : sums) {
		out << key.counter_id << "," << to_int(key.direction);
		for (int s = 0; s < 4; ++s)
			out << "," << detail::fmt6(seasons[s]);
		out << "\n";
	}
}

inline SeasonSums read_season_sums_csv(std::istream& in) {
	SeasonSums sums;
	std::string line;
	std::size_t lineno = 0;
	bool saw_header = false;
	while (std::getline(in, line)) {
		++lineno;
		line = detail::strip_cr(line);
		if (line.empty() || line[0] == '#')
			continue;
		if (!saw_header) {
			if (line != kSeasonSumsHeader)
				throw data_error_at_line("unexpected season sums header", lineno);
			saw_header = true;
			continue;
		}
		const auto fields = detail::split(line, ',');
		if (fields.size() != 6)
			throw data_error_at_line("expected 6 fields", lineno);
		WeeklyShareKey key{std::string(fields[0]),
		                   direction_from_int(detail::parse_int<int>(fields[1], "direction", lineno))};
		std::array<double, 4> seasons{};
		for (int s = 0; s < 4; ++s)
			seasons[s] = detail::parse_double(std::string(fields[2 + s]), "season sum", lineno);
		if (!sums.emplace(key, seasons).second)
			throw data_error_at_line("duplicate season sums row", lineno);
	}
	if (!saw_header)
		throw DataError("season sums file has no header");
	return sums;
}

inline constexpr const char* kWeeklySumsHeader =
    "counter_id,direction,weekend_total,weekend_days,workday_total,workday_days";

inline void write_weekly_sums_csv(std::ostream& out,
                                  const std::map<WeeklyShareKey, WeeklySums>& sums,
                                  const RunMeta& meta) {
	const int wk = static_cast<int>(DayType::Weekend);
	const int wd = static_cast<int>(DayType::Workday);
	detail::write_comments(out, meta);
	out << kWeeklySumsHeader << "\n";
	for (const auto& [key, s] : sums)
		out << key.counter_id << "," << to_int(key.direction) << "," << detail::fmt6(s.total[wk])
		    << "," << s.days[wk] << "," << detail::fmt6(s.total[wd]) << "," << s.days[wd] << "\n";
}

inline std::map<WeeklyShareKey, WeeklySums> read_weekly_sums_csv(std::istream& in) {
	std::map<WeeklyShareKey, WeeklySums> sums;
	const int wk = static_cast<int>(DayType::Weekend);
	const int wd = static_cast<int>(DayType::Workday);
	std::string line;
	std::size_t lineno = 0;
	bool saw_header = false;
	while (std::getline(in, line)) {
		++lineno;
		line = detail::strip_cr(line);
		if (line.empty() || line[0] == '#')
			continue;
		if (!saw_header) {
			if (line != kWeeklySumsHeader)
				throw data_error_at_line("unexpected weekly sums header", lineno);
			saw_header = true;
			continue;
		}
		const auto fields = detail::split(line, ',');
		if (fields.size() != 6)
			throw data_error_at_line("expected 6 fields", lineno);
		WeeklyShareKey key{std::string(fields[0]),
		                   direction_from_int(detail::parse_int<int>(fields[1], "direction", lineno))};
		WeeklySums s;
		s.total[wk] = detail::parse_double(std::string(fields[2]), "weekend total", lineno);
		s.days[wk] = detail::parse_int<std::int64_t>(fields[3], "weekend days", lineno);
		s.total[wd] = detail::parse_double(std::string(fields[4]), "workday total", lineno);
		s.days[wd] = detail::parse_int<std::int64_t>(fields[5], "workday days", lineno);
		if (!sums.emplace(key, s).second)
			throw data_error_at_line("duplicate weekly sums row", lineno);
	}
	if (!saw_header)
		throw DataError("weekly sums file has no header");
	return sums;
}

// --- quality-control log -------------------------------------------------------

inline void write_qc_log(std::ostream& out, const QcReport& report, const RunMeta& meta) {
	detail::write_comments(out, meta);
	out << "records_in: " << report.records_in << "\n";
	out << "records_out: " << report.records_out << "\n";
	out << "kept: " << report.kept.size() << "\n";
	out << "dropped: " << report.dropped.size() << "\n";
	for (const auto& d : report.dropped)
		out << "drop " << d.counter_id << ": " << d.reason << "\n";
}

// --- clustering artifacts -------------------------------------------------------

inline constexpr const char* kDendrogramHeader = "step,left,right,height,size";

inline void write_dendrogram_csv(std::ostream& out, const Dendrogram& tree, const RunMeta& meta) {
	detail::write_comments(out, meta, {"leaves: " + std::to_string(tree.n_leaves)});
	out << kDendrogramHeader << "\n";
	for (std::size_t t = 0; t < tree.merges.size(); ++t) {
		const auto& m = tree.merges[t];
		out << t << "," << m.left << "," << m.right << "," << detail::fmt6(m.height) << "," << m.size
		    << "\n";
	}
}

inline constexpr const char* kSilhouetteHeader = "k,silhouette";

inline void write_silhouette_csv(std::ostream& out, const std::vector<std::pair<int, double>>& table,
                                 const RunMeta& meta) {
	detail::write_comments(out, meta);
	out << kSilhouetteHeader << "\n";
	for (const auto& [k, sil] : table)
		out << k << "," << detail::fmt6(sil) << "\n";
}

// Full clustering report: method, chosen k, fit quality, per-cluster hourly
// signatures and the row assignments. Ward runs also carry the merge list.
inline nlohmann::ordered_json cluster_report_json(const RunMeta& meta, const std::string& method,
                                                  int k, double sil, const FeatureMatrix& X,
                                                  const std::vector<int>& labels,
                                                  const std::vector<ClusterProfile>& profiles,
                                                  const std::vector<Merge>& merges = {}) {
	nlohmann::ordered_json j;
	j["meta"] = {{"tool", kToolName}, {"version", kVersion}, {"seed", meta.seed},
	             {"config", meta.config_hex()}};
	j["method"] = method;
	j["k"] = k;
	j["silhouette"] = sil;
	auto clusters = nlohmann::ordered_json::array();
	for (const auto& p : profiles) {
		nlohmann::ordered_json c;
		c["id"] = p.cluster;
		c["size"] = p.size;
		c["weekend_pct"] = p.weekend_pct;
		c["workday_pct"] = p.workday_pct;
		c["mean"] = p.mean;
		c["std"] = p.stddev;
		clusters.push_back(std::move(c));
	}
	j["clusters"] = std::move(clusters);
	auto assignments = nlohmann::ordered_json::array();
	for (std::size_t i = 0; i < X.rows.size(); ++i) {
		const auto& r = X.rows[i];
		assignments.push_back({{"counter_id", r.counter_id},
		                       {"direction", to_int(r.direction)},
		                       {"daytype", to_string(r.daytype)},
		                       {"month", r.month},
		                       {"cluster", labels[i]}});
	}
	j["assignments"] = std::move(assignments);
	if (!merges.empty()) {
		auto ms = nlohmann::ordered_json::array();
		for (std::size_t t = 0; t < merges.size(); ++t)
			ms.push_back({{"step", t},
			              {"left", merges[t].left},
			              {"right", merges[t].right},
			              {"height", merges[t].height},
			              {"size", merges[t].size}});
		j["merges"] = std::move(ms);
	}
	if (!X.skipped.empty())
		j["skipped_rows"] = X.skipped;
	return j;
}

inline void write_json(std::ostream& out, const nlohmann::ordered_json& j) {
	out << j.dump(2) << "\n";
}

} // namespace counterscope
