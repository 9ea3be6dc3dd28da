#pragma once

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "counterscope/cluster.hpp"
#include "counterscope/config.hpp"
#include "counterscope/scoring.hpp"

namespace counterscope {

namespace geojson_detail {

using ojson = nlohmann::ordered_json;

inline ojson feature(const CounterMeta& meta, ojson properties) {
	ojson f;
	f["type"] = "Feature";
	f["geometry"] = {{"type", "Point"}, {"coordinates", {meta.lon, meta.lat}}};
	properties["road_name"] = meta.road_name;
	f["properties"] = std::move(properties);
	return f;
}

inline ojson collection(const RunMeta& meta, const std::string& layer) {
	ojson j;
	j["type"] = "FeatureCollection";
	j["meta"] = {{"tool", kToolName},
	             {"version", kVersion},
	             {"seed", meta.seed},
	             {"config", meta.config_hex()},
	             {"layer", layer}};
	j["features"] = ojson::array();
	return j;
}

// Looks up coordinates; a missing counter yields a warning and no feature.
inline const CounterMeta* lookup(const std::map<std::string, CounterMeta>& meta,
                                 const std::string& counter_id, std::vector<std::string>* warnings) {
	const auto it = meta.find(counter_id);
	if (it != meta.end())
		return &it->second;
	if (warnings)
		warnings->push_back("no coordinates for counter '" + counter_id + "', feature skipped");
	return nullptr;
}

} // namespace geojson_detail

// Weekend/workday road map. Marker size grows with how decisively the
// counter leans toward its tag, clamped to [0.5, 0.7].
inline nlohmann::ordered_json weektag_geojson(const std::vector<WeekTagCard>& cards,
                                              const std::map<std::string, CounterMeta>& meta,
                                              const RunMeta& run,
                                              std::vector<std::string>* warnings = nullptr) {
	auto j = geojson_detail::collection(run, "week_tag");
	for (const auto& card : cards) {
		const CounterMeta* m = geojson_detail::lookup(meta, card.counter_id, warnings);
		if (!m)
			continue;
		const double lean = std::max(card.weekend_share, card.workday_share);
		nlohmann::ordered_json props;
		props["counter_id"] = card.counter_id;
		props["direction"] = to_int(card.direction);
		props["tag"] = to_string(card.tag);
		props["weekend_share"] = card.weekend_share;
		props["workday_share"] = card.workday_share;
		props["size"] = std::clamp(lean, 0.5, 0.7);
		j["features"].push_back(geojson_detail::feature(*m, std::move(props)));
	}
	return j;
}

// Seasonal fingerprint map: shares, deviations from the corpus, and the
// season each counter leans into the most.
inline nlohmann::ordered_json seasonshare_geojson(const SeasonalResult& result,
                                                  const std::map<std::string, CounterMeta>& meta,
                                                  const RunMeta& run,
                                                  std::vector<std::string>* warnings = nullptr) {
	auto j = geojson_detail::collection(run, "season_share");
	for (const auto& card : result.cards) {
		const CounterMeta* m = geojson_detail::lookup(meta, card.counter_id, warnings);
		if (!m)
			continue;
		nlohmann::ordered_json props;
		props["counter_id"] = card.counter_id;
		props["direction"] = to_int(card.direction);
		for (int s = 0; s < 4; ++s)
			props[std::string("share_") + to_string(static_cast<Season>(s))] = card.shares[s];
		for (int s = 0; s < 4; ++s)
			props[std::string("dev_") + to_string(static_cast<Season>(s))] = card.deviations[s];
		props["max_deviation"] = card.max_deviation;
		props["argmax_season"] = to_string(card.argmax_season);
		j["features"].push_back(geojson_detail::feature(*m, std::move(props)));
	}
	return j;
}

// Cluster membership map: one feature per counter, labeled by the majority
// cluster across that counter's feature rows (ties go to the lower label).
inline nlohmann::ordered_json cluster_geojson(const FeatureMatrix& X,
                                              const std::vector<int>& labels,
                                              const std::map<std::string, CounterMeta>& meta,
                                              const RunMeta& run,
                                              std::vector<std::string>* warnings = nullptr) {
	if (labels.size() != X.rows.size())
		throw std::invalid_argument("labels do not match feature rows");
	std::map<std::string, std::map<int, int>> votes;
	for (std::size_t i = 0; i < X.rows.size(); ++i)
		++votes[X.rows[i].counter_id][labels[i]];
	auto j = geojson_detail::collection(run, "cluster");
	for (const auto& [counter_id, counts] : votes) {
		const CounterMeta* m = geojson_detail::lookup(meta, counter_id, warnings);
		if (!m)
			continue;
		int best_label = 0, best_count = -1, total = 0;
		for (const auto& [label, count] : counts) { // map order: ties keep the lower label
			total += count;
			if (count > best_count) {
				best_count = count;
				best_label = label;
			}
		}
		nlohmann::ordered_json props;
		props["counter_id"] = counter_id;
		props["cluster"] = best_label;
		props["rows"] = total;
		props["agreement"] = static_cast<double>(best_count) / static_cast<double>(total);
		j["features"].push_back(geojson_detail::feature(*m, std::move(props)));
	}
	return j;
}

} // namespace counterscope
