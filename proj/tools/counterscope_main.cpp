// counterscope: longitudinal anomaly screening for road traffic counters.
//
// Subcommands cover the whole pipeline: synthesize or ingest hourly counts,
// build trimmed-mean profiles, score counters against their own quiet
// baseline, cluster daily shapes, and render plots and maps. Every artifact
// embeds the tool version, seed and a hash of the effective configuration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "counterscope/calendar.hpp"
#include "counterscope/cluster.hpp"
#include "counterscope/config.hpp"
#include "counterscope/geojson.hpp"
#include "counterscope/ingest.hpp"
#include "counterscope/profile.hpp"
#include "counterscope/reports.hpp"
#include "counterscope/scoring.hpp"
#include "counterscope/svg.hpp"
#include "counterscope/synth.hpp"
#include "counterscope/version.hpp"

namespace fs = std::filesystem;
using namespace counterscope;

namespace {

std::ifstream open_input(const fs::path& path) {
	std::ifstream in(path);
	if (!in)
		throw DataError("cannot open '" + path.string() + "'");
	return in;
}

std::ofstream open_output(const fs::path& path) {
	if (path.has_parent_path())
		fs::create_directories(path.parent_path());
	std::ofstream out(path);
	if (!out)
		throw DataError("cannot write '" + path.string() + "'");
	return out;
}

VehicleClassFilter parse_class_filter(const std::string& classes) {
	VehicleClassFilter filter;
	std::size_t start = 0;
	while (start <= classes.size()) {
		const auto comma = classes.find(',', start);
		const auto token = classes.substr(start, comma == std::string::npos ? comma : comma - start);
		if (!token.empty()) {
			try {
				filter.insert(vehicle_class_from_string(token));
			} catch (const DataError& e) {
				throw CLI::ValidationError("--classes", e.what());
			}
		}
		if (comma == std::string::npos)
			break;
		start = comma + 1;
	}
	if (filter.empty())
		throw CLI::ValidationError("--classes", "no vehicle classes selected");
	return filter;
}

ProfileMode parse_mode(const std::string& mode) {
	if (mode == "monthly")
		return ProfileMode::Monthly;
	if (mode == "weekday")
		return ProfileMode::DayOfWeek;
	throw CLI::ValidationError("--mode", "expected 'monthly' or 'weekday'");
}

// Cache directory layout shared by ingest (writer) and the downstream
// commands (readers).
struct CachePaths {
	fs::path profiles, seasonal, weekly, qc_log;

	explicit CachePaths(const fs::path& dir)
	    : profiles(dir / "profiles.csv"), seasonal(dir / "seasonal.csv"),
	      weekly(dir / "weekly.csv"), qc_log(dir / "qc_log.txt") {}
};

struct MonthLabels {
	static std::string of(ProfileMode mode, std::size_t period_index) {
		static constexpr const char* months[12] = {"Jan", "Feb", "Mar", "Apr", "May", "Jun",
		                                           "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"};
		if (mode == ProfileMode::Monthly)
			return months[period_index];
		return period_label(mode, static_cast<int>(period_index));
	}
};

// --- ingest -------------------------------------------------------------------

struct IngestArgs {
	std::string counts, meta, holidays, out;
	std::string classes = "car,motorbike";
	std::string mode = "monthly";
};

int cmd_ingest(const IngestArgs& args, std::uint64_t seed) {
	const RunMeta meta = make_run_meta(seed, {{"command", "ingest"},
	                                          {"counts", args.counts},
	                                          {"meta", args.meta},
	                                          {"holidays", args.holidays},
	                                          {"classes", args.classes},
	                                          {"mode", args.mode},
	                                          {"out", args.out}});
	const auto filter = parse_class_filter(args.classes);
	const auto mode = parse_mode(args.mode);

	auto counts_in = open_input(args.counts);
	auto records = parse_counts(counts_in, filter);
	std::map<std::string, CounterMeta> counter_meta;
	if (!args.meta.empty()) {
		auto meta_in = open_input(args.meta);
		counter_meta = parse_meta(meta_in);
	}
	HolidayCalendar holidays;
	if (!args.holidays.empty())
		holidays = HolidayCalendar::load(args.holidays);

	QcReport qc;
	auto clean = qc_filter(records, counter_meta, &qc);
	BuildStats stats;
	auto profiles = build_profiles(clean, holidays, mode, &stats);
	const auto seasons = season_sums(clean);
	const auto weekly = weekly_sums(clean, holidays);

	const CachePaths cache{args.out};
	{
		auto out = open_output(cache.profiles);
		write_profile_cache(out, profiles, meta.comment_lines());
	}
	{
		auto out = open_output(cache.seasonal);
		write_season_sums_csv(out, seasons, meta);
	}
	{
		auto out = open_output(cache.weekly);
		write_weekly_sums_csv(out, weekly, meta);
	}
	{
		auto out = open_output(cache.qc_log);
		write_qc_log(out, qc, meta);
	}
	std::cout << "ingest: " << qc.records_in << " records in, " << qc.records_out << " kept\n";
	std::cout << "counters: " << qc.kept.size() << " kept, " << qc.dropped.size() << " dropped\n";
	for (const auto& d : qc.dropped)
		std::cout << "  drop " << d.counter_id << ": " << d.reason << "\n";
	std::cout << "profiles: " << profiles.profiles.size() << " keys, " << stats.zero_filled
	          << " zero-filled cells\n";
	std::cout << "wrote " << cache.profiles.string() << "\n";
	return 0;
}

// --- score --------------------------------------------------------------------

struct ScoreArgs {
	std::string cache, out;
	int top = 10;
};

int cmd_score(const ScoreArgs& args, std::uint64_t seed) {
	const RunMeta meta = make_run_meta(
	    seed, {{"command", "score"}, {"cache", args.cache}, {"out", args.out},
	           {"top", std::to_string(args.top)}});
	if (args.top < 1)
		throw CLI::ValidationError("--top", "must be >= 1");
	const CachePaths cache{args.cache};
	auto profiles = read_profile_cache_file(cache.profiles.string());
	auto seasons_in = open_input(cache.seasonal);
	const auto seasons = read_season_sums_csv(seasons_in);
	auto weekly_in = open_input(cache.weekly);
	const auto weekly = read_weekly_sums_csv(weekly_in);

	const auto cards = compute_score_cards(profiles);
	const auto seasonal = seasonal_from_sums(seasons);
	std::map<WeeklyShareKey, WeeklyShare> shares;
	for (const auto& [key, sums] : weekly)
		shares[key] = weekly_share_from_sums(sums);
	const auto tags = week_tag_cards(shares);

	std::vector<RankingRow> rankings;
	for (auto kind : {ScoreKind::A, ScoreKind::B, ScoreKind::C, ScoreKind::D, ScoreKind::E}) {
		auto rows = ranking_rows(kind, rank(cards, kind, static_cast<std::size_t>(args.top)));
		rankings.insert(rankings.end(), rows.begin(), rows.end());
	}
	{
		auto rows = ranking_rows_seasonal(
		    rank_seasonal(seasonal.cards, static_cast<std::size_t>(args.top)));
		rankings.insert(rankings.end(), rows.begin(), rows.end());
	}

	{
		auto out = open_output(fs::path(args.out) / "scores.csv");
		write_scores_csv(out, cards, meta);
	}
	{
		auto out = open_output(fs::path(args.out) / "seasonal_report.csv");
		write_seasonal_csv(out, seasonal, meta);
	}
	{
		auto out = open_output(fs::path(args.out) / "weektag.csv");
		write_weektag_csv(out, tags, meta);
	}
	{
		auto out = open_output(fs::path(args.out) / "rankings.csv");
		write_rankings_csv(out, rankings, meta);
	}
	std::cout << "score: " << cards.size() << " cards, " << seasonal.cards.size()
	          << " seasonal cards, " << tags.size() << " week tags\n";
	std::cout << "wrote " << (fs::path(args.out) / "rankings.csv").string() << "\n";
	return 0;
}

// --- cluster ------------------------------------------------------------------

struct ClusterArgs {
	std::string cache, out;
	std::string method = "kmeans";
	std::string daytype = "both";
	int k = 0; // 0: pick by silhouette scan
	int k_min = 2, k_max = 10;
	int month = 5;
	int direction = 0; // 0: both
	int restarts = 10;
	int cut = 6;
};

std::optional<Direction> direction_filter(int direction) {
	if (direction == 0)
		return std::nullopt;
	if (direction != 1 && direction != 2)
		throw CLI::ValidationError("--direction", "expected 0 (both), 1 or 2");
	return direction_from_int(direction);
}

std::optional<DayType> daytype_filter(const std::string& daytype) {
	if (daytype == "both")
		return std::nullopt;
	if (daytype == "workday")
		return DayType::Workday;
	if (daytype == "weekend")
		return DayType::Weekend;
	throw CLI::ValidationError("--daytype", "expected 'workday', 'weekend' or 'both'");
}

int cmd_cluster(const ClusterArgs& args, std::uint64_t seed) {
	const RunMeta meta = make_run_meta(
	    seed, {{"command", "cluster"},
	           {"cache", args.cache},
	           {"out", args.out},
	           {"method", args.method},
	           {"k", std::to_string(args.k)},
	           {"k_min", std::to_string(args.k_min)},
	           {"k_max", std::to_string(args.k_max)},
	           {"month", std::to_string(args.month)},
	           {"direction", std::to_string(args.direction)},
	           {"daytype", args.daytype},
	           {"restarts", std::to_string(args.restarts)},
	           {"cut", std::to_string(args.cut)}});
	if (args.month < 0 || args.month > 12)
		throw CLI::ValidationError("--month", "expected 0 (all) or 1..12");
	const CachePaths cache{args.cache};
	auto profiles = read_profile_cache_file(cache.profiles.string());
	const auto X =
	    build_feature_matrix(profiles, args.month, direction_filter(args.direction),
	                         daytype_filter(args.daytype));
	for (const auto& s : X.skipped)
		std::cerr << "warning: skipped degenerate profile row " << s << "\n";
	const auto vectors = X.as_vectors();

	if (args.method == "kmeans") {
		KMeansResult model;
		int k = args.k;
		std::vector<std::pair<int, double>> table;
		double sil = 0.0;
		if (args.k == 0) {
			auto sel = select_k(vectors, args.k_min, args.k_max, seed, args.restarts);
			model = std::move(sel.best);
			k = sel.best_k;
			table = std::move(sel.table);
			for (const auto& [tk, tsil] : table)
				if (tk == k)
					sil = tsil;
			auto out = open_output(fs::path(args.out) / "silhouette.csv");
			write_silhouette_csv(out, table, meta);
		} else {
			KMeansParams params;
			params.k = args.k;
			params.seed = seed;
			params.restarts = args.restarts;
			model = kmeans(vectors, params);
			sil = silhouette(vectors, model.assignments);
		}
		const auto profiles_out = cluster_profiles(X, model.assignments);
		const auto report = cluster_report_json(meta, "kmeans", k, sil, X, model.assignments,
		                                        profiles_out);
		auto out = open_output(fs::path(args.out) / "cluster_report.json");
		write_json(out, report);
		std::cout << "cluster: kmeans k=" << k << " silhouette=" << detail::fmt6(sil) << " rows="
		          << X.rows.size() << "\n";
		std::cout << "wrote " << (fs::path(args.out) / "cluster_report.json").string() << "\n";
		return 0;
	}
	if (args.method == "ward") {
		std::vector<std::string> labels;
		labels.reserve(X.rows.size());
		for (std::size_t i = 0; i < X.rows.size(); ++i)
			labels.push_back(X.row_label(i));
		const auto D = spearman_distance_matrix(vectors, labels);
		const auto tree = ward_hclust(D);
		{
			auto out = open_output(fs::path(args.out) / "dendrogram.csv");
			write_dendrogram_csv(out, tree, meta);
		}
		const int k = std::min<int>(args.cut, static_cast<int>(X.rows.size()));
		const auto cut = cut_dendrogram(tree, k);
		const double sil = k >= 2 ? silhouette(vectors, cut) : 0.0;
		const auto profiles_out = cluster_profiles(X, cut);
		const auto report =
		    cluster_report_json(meta, "ward", k, sil, X, cut, profiles_out, tree.merges);
		auto out = open_output(fs::path(args.out) / "cluster_report.json");
		write_json(out, report);
		std::cout << "cluster: ward cut k=" << k << " rows=" << X.rows.size() << "\n";
		std::cout << "wrote " << (fs::path(args.out) / "cluster_report.json").string() << "\n";
		return 0;
	}
	throw CLI::ValidationError("--method", "expected 'kmeans' or 'ward'");
}

// --- plot ---------------------------------------------------------------------

struct PlotArgs {
	std::string cache, out, counter;
	int direction = 1;
	std::string daytype = "workday";
	bool baseline = false;
};

int cmd_plot(const PlotArgs& args, std::uint64_t seed) {
	const RunMeta meta = make_run_meta(
	    seed, {{"command", "plot"},
	           {"cache", args.cache},
	           {"out", args.out},
	           {"counter", args.counter},
	           {"direction", std::to_string(args.direction)},
	           {"daytype", args.daytype},
	           {"baseline", args.baseline ? "true" : "false"}});
	if (args.direction != 1 && args.direction != 2)
		throw CLI::ValidationError("--direction", "expected 1 or 2");
	if (args.daytype != "workday" && args.daytype != "weekend")
		throw CLI::ValidationError("--daytype", "expected 'workday' or 'weekend'");
	const CachePaths cache{args.cache};
	auto profiles = read_profile_cache_file(cache.profiles.string());
	const ProfileKey key{args.counter, direction_from_int(args.direction),
	                     daytype_from_string(args.daytype)};
	const auto it = profiles.profiles.find(key);
	if (it == profiles.profiles.end())
		throw DataError("no profile for counter '" + args.counter + "' direction " +
		                std::to_string(args.direction) + " " + args.daytype);

	std::vector<SvgSeries> series;
	for (std::size_t p = 0; p < it->second.size(); ++p)
		series.push_back({MonthLabels::of(profiles.mode, p), it->second[p]});
	std::array<double, 24> base{};
	const std::array<double, 24>* base_ptr = nullptr;
	if (args.baseline) {
		base = baseline_of(it->second);
		base_ptr = &base;
	}
	const std::string title = args.counter + " direction " + std::to_string(args.direction) +
	                          " (" + args.daytype + ")";
	auto out = open_output(args.out);
	write_profile_svg(out, series, base_ptr, title, meta);
	std::cout << "plot: " << series.size() << " series\n";
	std::cout << "wrote " << args.out << "\n";
	return 0;
}

// --- map ----------------------------------------------------------------------

struct MapArgs {
	std::string cache, meta_path, out;
	std::string layer = "weektag";
	int month = 5;
};

int cmd_map(const MapArgs& args, std::uint64_t seed) {
	const RunMeta meta = make_run_meta(seed, {{"command", "map"},
	                                          {"cache", args.cache},
	                                          {"meta", args.meta_path},
	                                          {"out", args.out},
	                                          {"layer", args.layer},
	                                          {"month", std::to_string(args.month)}});
	const CachePaths cache{args.cache};
	auto meta_in = open_input(args.meta_path);
	const auto counter_meta = parse_meta(meta_in);

	nlohmann::ordered_json layer;
	std::vector<std::string> warnings;
	if (args.layer == "weektag") {
		auto weekly_in = open_input(cache.weekly);
		const auto weekly = read_weekly_sums_csv(weekly_in);
		std::map<WeeklyShareKey, WeeklyShare> shares;
		for (const auto& [key, sums] : weekly)
			shares[key] = weekly_share_from_sums(sums);
		layer = weektag_geojson(week_tag_cards(shares), counter_meta, meta, &warnings);
	} else if (args.layer == "seasons") {
		auto seasons_in = open_input(cache.seasonal);
		const auto seasonal = seasonal_from_sums(read_season_sums_csv(seasons_in));
		layer = seasonshare_geojson(seasonal, counter_meta, meta, &warnings);
	} else if (args.layer == "clusters") {
		auto profiles = read_profile_cache_file(cache.profiles.string());
		const auto X = build_feature_matrix(profiles, args.month);
		auto sel = select_k(X.as_vectors(), 2, 10, seed, 10);
		layer = cluster_geojson(X, sel.best.assignments, counter_meta, meta, &warnings);
	} else {
		throw CLI::ValidationError("--layer", "expected 'weektag', 'seasons' or 'clusters'");
	}
	for (const auto& w : warnings)
		std::cerr << "warning: " << w << "\n";
	auto out = open_output(args.out);
	write_json(out, layer);
	std::cout << "map: layer " << args.layer << ", " << layer["features"].size() << " features\n";
	std::cout << "wrote " << args.out << "\n";
	return 0;
}

// --- synth --------------------------------------------------------------------

struct SynthArgs {
	std::string scenario = "mixed";
	std::string out;
	int counters = 50;
	double noise = 0.1;
};

int cmd_synth(const SynthArgs& args, std::uint64_t seed) {
	const RunMeta meta = make_run_meta(seed, {{"command", "synth"},
	                                          {"scenario", args.scenario},
	                                          {"counters", std::to_string(args.counters)},
	                                          {"noise", detail::fmt6(args.noise)},
	                                          {"out", args.out}});
	ScenarioSpec spec;
	try {
		spec = scenario_by_name(args.scenario, args.counters, seed, args.noise);
	} catch (const std::invalid_argument& e) {
		throw CLI::ValidationError("--scenario", e.what());
	}
	const auto result = generate(spec);
	{
		auto out = open_output(fs::path(args.out) / "counts.csv");
		serialize_counts(out, result.records, meta.comment_lines());
	}
	{
		auto out = open_output(fs::path(args.out) / "meta.csv");
		serialize_meta(out, result.meta, meta.comment_lines());
	}
	{
		auto out = open_output(fs::path(args.out) / "truth.json");
		auto truth = truth_manifest(spec);
		out << truth.dump(2) << "\n";
	}
	std::cout << "synth: scenario " << spec.name << ", " << spec.counters.size() << " counters, "
	          << result.records.size() << " records\n";
	std::cout << "wrote " << (fs::path(args.out) / "counts.csv").string() << "\n";
	return 0;
}

} // namespace

int main(int argc, char** argv) {
	CLI::App app{std::string(kToolName) + " " + kVersion +
	             " - anomaly screening for road traffic counters"};
	app.require_subcommand(1);
	app.set_config("--config", "", "Read options from an INI/TOML file");
	app.set_version_flag("--version", std::string(kToolName) + " " + kVersion);

	std::uint64_t seed = 42;
	app.add_option("--seed", seed, "Seed for every randomized step")->capture_default_str();

	IngestArgs ingest_args;
	auto* ingest = app.add_subcommand("ingest", "Parse counts, run QC, cache profiles");
	ingest->add_option("--counts", ingest_args.counts, "Hourly counts CSV")->required();
	ingest->add_option("--meta", ingest_args.meta, "Counter coordinates CSV");
	ingest->add_option("--holidays", ingest_args.holidays, "Holiday dates, one per line");
	ingest->add_option("--classes", ingest_args.classes, "Vehicle classes to keep")
	    ->capture_default_str();
	ingest->add_option("--mode", ingest_args.mode, "Profile periods: monthly or weekday")
	    ->capture_default_str();
	ingest->add_option("--out", ingest_args.out, "Cache directory to write")->required();

	ScoreArgs score_args;
	auto* score = app.add_subcommand("score", "Score cached profiles and rank counters");
	score->add_option("--cache", score_args.cache, "Cache directory from ingest")->required();
	score->add_option("--out", score_args.out, "Report directory to write")->required();
	score->add_option("--top", score_args.top, "Entries per ranking")->capture_default_str();

	ClusterArgs cluster_args;
	auto* cluster = app.add_subcommand("cluster", "Cluster profile shapes");
	cluster->add_option("--cache", cluster_args.cache, "Cache directory from ingest")->required();
	cluster->add_option("--out", cluster_args.out, "Report directory to write")->required();
	cluster->add_option("--method", cluster_args.method, "kmeans or ward")->capture_default_str();
	cluster->add_option("--k", cluster_args.k, "Fixed cluster count (0: scan k by silhouette)")
	    ->capture_default_str();
	cluster->add_option("--k-min", cluster_args.k_min, "Smallest k in the scan")
	    ->capture_default_str();
	cluster->add_option("--k-max", cluster_args.k_max, "Largest k in the scan")
	    ->capture_default_str();
	cluster->add_option("--month", cluster_args.month, "Month to cluster (0: all months)")
	    ->capture_default_str();
	cluster->add_option("--direction", cluster_args.direction, "Direction filter (0: both)")
	    ->capture_default_str();
	cluster->add_option("--daytype", cluster_args.daytype, "workday, weekend or both")
	    ->capture_default_str();
	cluster->add_option("--restarts", cluster_args.restarts, "k-means restarts")
	    ->capture_default_str();
	cluster->add_option("--cut", cluster_args.cut, "Clusters to cut the dendrogram into")
	    ->capture_default_str();

	PlotArgs plot_args;
	auto* plot = app.add_subcommand("plot", "Render one counter's profiles as SVG");
	plot->add_option("--cache", plot_args.cache, "Cache directory from ingest")->required();
	plot->add_option("--counter", plot_args.counter, "Counter id")->required();
	plot->add_option("--direction", plot_args.direction, "Direction (1 or 2)")
	    ->capture_default_str();
	plot->add_option("--daytype", plot_args.daytype, "workday or weekend")->capture_default_str();
	plot->add_flag("--baseline", plot_args.baseline, "Overlay the quiet baseline");
	plot->add_option("--out", plot_args.out, "SVG file to write")->required();

	MapArgs map_args;
	auto* map = app.add_subcommand("map", "Render counters as a GeoJSON layer");
	map->add_option("--cache", map_args.cache, "Cache directory from ingest")->required();
	map->add_option("--meta", map_args.meta_path, "Counter coordinates CSV")->required();
	map->add_option("--layer", map_args.layer, "weektag, seasons or clusters")
	    ->capture_default_str();
	map->add_option("--month", map_args.month, "Month for the clusters layer")
	    ->capture_default_str();
	map->add_option("--out", map_args.out, "GeoJSON file to write")->required();

	SynthArgs synth_args;
	auto* synth = app.add_subcommand("synth", "Generate a synthetic corpus with ground truth");
	synth->add_option("--scenario", synth_args.scenario,
	                  "festival, ski, closure, twomag, shapes or mixed")
	    ->capture_default_str();
	synth->add_option("--counters", synth_args.counters, "Number of counters")
	    ->capture_default_str();
	synth->add_option("--noise", synth_args.noise, "Lognormal noise sigma")->capture_default_str();
	synth->add_option("--out", synth_args.out, "Corpus directory to write")->required();

	try {
		app.parse(argc, argv);
		if (ingest->parsed())
			return cmd_ingest(ingest_args, seed);
		if (score->parsed())
			return cmd_score(score_args, seed);
		if (cluster->parsed())
			return cmd_cluster(cluster_args, seed);
		if (plot->parsed())
			return cmd_plot(plot_args, seed);
		if (map->parsed())
			return cmd_map(map_args, seed);
		if (synth->parsed())
			return cmd_synth(synth_args, seed);
		return 1;
	} catch (const CLI::ParseError& e) {
		const int code = app.exit(e); // prints help/errors; 0 for --help/--version
		return code == 0 ? 0 : 1;
	} catch (const DataError& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 2;
	} catch (const std::invalid_argument& e) {
		std::cerr << "error: " << e.what() << "\n";
		return 1;
	}
}
