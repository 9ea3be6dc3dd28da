#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cstdint>

#include "counterscope/ingest.hpp"
#include "counterscope/synth.hpp"

using namespace counterscope;

namespace {

std::uint64_t count_at(const std::vector<RawCountRecord>& records, const std::string& id,
                       Direction dir, Date date, int hour) {
	RawCountRecord probe;
	probe.counter_id = id;
	probe.direction = dir;
	probe.date = date;
	probe.hour = static_cast<std::uint8_t>(hour);
	const auto it = std::lower_bound(records.begin(), records.end(), probe, record_order);
	REQUIRE(it != records.end());
	REQUIRE(it->counter_id == id);
	REQUIRE(it->date == date);
	REQUIRE(int{it->hour} == hour);
	return it->total();
}

} // namespace

TEST_CASE("generation is deterministic and covers every cell") {
	const auto spec = festival_scenario(4, 7, 0.1);
	const auto a = generate(spec);
	const auto b = generate(spec);
	CHECK(a.records.size() == 4u * 366u * 24u * 2u); // 2016 is a leap year
	CHECK(a.records == b.records);
	CHECK(a.meta == b.meta);
	CHECK(std::is_sorted(a.records.begin(), a.records.end(), record_order));
}

TEST_CASE("a planted event never disturbs unaffected records") {
	auto closed_spec = closure_scenario(4, 11, 0.2); // plants on S002, March 1-28
	auto open_spec = closed_spec;
	open_spec.events.clear();
	const auto closed = generate(closed_spec);
	const auto open = generate(open_spec);
	REQUIRE(closed.records.size() == open.records.size());

	const Date win_start{2016, 3, 1};
	const Date win_end{2016, 3, 28};
	std::size_t inside = 0, not_silenced = 0, baseline_traffic = 0, perturbed = 0;
	for (std::size_t i = 0; i < closed.records.size(); ++i) {
		const auto& c = closed.records[i];
		const auto& o = open.records[i];
		const bool affected =
		    c.counter_id == "S002" && win_start <= c.date && c.date <= win_end;
		if (affected) {
			++inside;
			not_silenced += c.total() != 0;
			baseline_traffic += o.total() > 0;
		} else {
			perturbed += !(c == o); // same noise stream with and without the event
		}
	}
	CHECK(inside == 28u * 24u * 2u);
	CHECK(not_silenced == 0);
	CHECK(baseline_traffic > 0);
	CHECK(perturbed == 0);
}

TEST_CASE("festival traffic arrives on one side and leaves on the other") {
	auto spec = festival_scenario(4, 5, 0.0); // S002 is the flat host, surge x8, hours 10-17
	const auto result = generate(spec);
	const Date saturday{2016, 10, 8};
	for (int h : {10, 11, 12, 13}) {
		CHECK(count_at(result.records, "S002", Direction::Dir1, saturday, h) == 400);
		CHECK(count_at(result.records, "S002", Direction::Dir2, saturday, h) == 50);
	}
	for (int h : {14, 15, 16, 17}) {
		CHECK(count_at(result.records, "S002", Direction::Dir1, saturday, h) == 50);
		CHECK(count_at(result.records, "S002", Direction::Dir2, saturday, h) == 400);
	}
	// outside the hour window, and on a quiet Saturday two weeks earlier
	CHECK(count_at(result.records, "S002", Direction::Dir1, saturday, 9) == 50);
	CHECK(count_at(result.records, "S002", Direction::Dir2, saturday, 18) == 50);
	CHECK(count_at(result.records, "S002", Direction::Dir1, {2016, 9, 24}, 12) == 50);
}

TEST_CASE("noise-free counters reproduce their shapes exactly") {
	const auto result = generate(mixed_scenario(5, 3, 0.0));

	// S005 is flat: 50 vehicles in every cell of the year
	std::size_t off = 0;
	for (const auto& r : result.records)
		if (r.counter_id == "S005")
			off += r.total() != 50;
	CHECK(off == 0);

	// S001 commutes: morning peak inbound, afternoon peak outbound
	const Date monday{2016, 1, 4};
	auto argmax_hour = [&](Direction dir) {
		int best_h = 0;
		std::uint64_t best = 0;
		for (int h = 0; h < 24; ++h) {
			const auto c = count_at(result.records, "S001", dir, monday, h);
			if (c > best) {
				best = c;
				best_h = h;
			}
		}
		return best_h;
	};
	CHECK(argmax_hour(Direction::Dir1) == 7);
	CHECK(argmax_hour(Direction::Dir2) == 15);
	CHECK(count_at(result.records, "S001", Direction::Dir1, monday, 7) == 500);
	// weekends flatten to a small noon bump
	CHECK(count_at(result.records, "S001", Direction::Dir1, {2016, 1, 9}, 12) == 80);

	// S002 is a summer tourist road: July triples the June-level base,
	// January quarters it
	CHECK(count_at(result.records, "S002", Direction::Dir1, {2016, 7, 5}, 12) == 450);
	CHECK(count_at(result.records, "S002", Direction::Dir1, {2016, 1, 5}, 12) == 38);
}

TEST_CASE("winter resort departures peak twice in the afternoon") {
	const auto v = synth_detail::day_shape(Archetype::WinterResort, Direction::Dir2, false);
	CHECK(v[13] > v[12]);
	CHECK(v[13] > v[14]); // first hump: end of the morning session
	CHECK(v[16] > v[15]);
	CHECK(v[16] > v[17]); // second hump: lifts close
	CHECK(v[14] < v[13]);
	CHECK(v[15] < v[16]);
	const auto inbound = synth_detail::day_shape(Archetype::WinterResort, Direction::Dir1, false);
	CHECK(std::max_element(inbound.begin(), inbound.end()) - inbound.begin() == 8);
}

TEST_CASE("every preset passes quality control") {
	for (const std::string name : {"festival", "ski", "closure", "twomag", "shapes", "mixed"}) {
		const auto result = generate(scenario_by_name(name, 6, 9, 0.1));
		QcReport report;
		const auto clean = qc_filter(result.records, result.meta, &report);
		INFO("scenario " << name);
		CHECK(report.dropped.empty());
		CHECK(report.kept.size() == 6);
		CHECK(clean.records.size() == result.records.size());
	}
	CHECK_THROWS_AS(scenario_by_name("rushhour", 6, 9, 0.1), std::invalid_argument);
}

TEST_CASE("manifest round-trips through json") {
	const auto spec = festival_scenario(3, 13, 0.05);
	const auto j = truth_manifest(spec);
	CHECK(j.at("scenario") == "festival");
	CHECK(j.at("seed") == 13);
	CHECK(j.at("planted") == nlohmann::json::array({"S001"}));
	REQUIRE(j.at("counters").size() == 3);
	CHECK(j.at("counters")[0].at("archetype") == "flat");
	CHECK(j.at("counters")[0].at("peak_vph") == 50.0);
	REQUIRE(j.at("events").size() == 1);
	CHECK(j.at("events")[0].at("magnitude") == 8.0);

	const auto recovered = scenario_from_manifest(j);
	CHECK(truth_manifest(recovered) == j);
	CHECK(generate(recovered).records == generate(spec).records);

	auto broken = j;
	broken.erase("counters");
	CHECK_THROWS_AS(scenario_from_manifest(broken), DataError);
	broken = j;
	broken["counters"][0]["archetype"] = "roundabout";
	CHECK_THROWS_AS(scenario_from_manifest(broken), DataError);
}

TEST_CASE("detection quality against the manifest") {
	const auto truth = festival_scenario(6, 1, 0.1); // plants on S003
	const auto top1 = manifest_check(truth, {"S003", "S001", "S002"}, 1);
	CHECK(top1.hits == 1);
	CHECK(top1.precision_at_k == 1.0);
	CHECK(top1.recall_at_k == 1.0);
	CHECK(top1.planted == 1);

	const auto top2 = manifest_check(truth, {"S001", "S003"}, 2);
	CHECK(top2.hits == 1);
	CHECK(top2.precision_at_k == 0.5);
	CHECK(top2.recall_at_k == 1.0);

	// fewer detections than k: the missing slots count against precision
	const auto sparse = manifest_check(truth, {"S001"}, 3);
	CHECK(sparse.hits == 0);
	CHECK(sparse.precision_at_k == 0.0);

	CHECK_THROWS_AS(manifest_check(truth, {"S001"}, 0), std::invalid_argument);
	CHECK_THROWS_AS(manifest_check(truth, {"X999"}, 1), DataError);
	CHECK_THROWS_AS(manifest_check(truth, {"S001", "S001"}, 2), DataError);
	CHECK_THROWS_AS(manifest_check(mixed_scenario(4, 1, 0.1), {"S001"}, 1),
	                std::invalid_argument); // nothing planted
}

TEST_CASE("scenario validation rejects malformed input") {
	ScenarioSpec spec;
	spec.counters = {{"A", Archetype::Flat}, {"A", Archetype::Flat}};
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	spec.counters = {{"A", Archetype::Flat}};
	spec.years.clear();
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	spec.years = {2016};
	spec.noise_level = -0.1;
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	spec.noise_level = 0.1;
	PlantedEvent ev;
	ev.counter_id = "B"; // not in the scenario
	spec.events = {ev};
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	ev.counter_id = "A";
	ev.start = Date{2016, 5, 2};
	ev.end = Date{2016, 5, 1}; // ends before it starts
	spec.events = {ev};
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	ev.end = Date{2016, 5, 2};
	ev.hour_start = 12;
	ev.hour_end = 9;
	spec.events = {ev};
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	ev.hour_end = 24; // out of range
	spec.events = {ev};
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);

	ev.hour_start = 9;
	ev.hour_end = 12;
	ev.magnitude = -1.0;
	spec.events = {ev};
	CHECK_THROWS_AS(generate(spec), std::invalid_argument);
}

TEST_CASE("synthetic coordinates are stable and plausible") {
	const auto a = generate(mixed_scenario(3, 1, 0.0));
	const auto b = generate(mixed_scenario(3, 99, 0.0));
	CHECK(a.meta == b.meta); // coordinates depend on the id, not the seed
	for (const auto& [id, m] : a.meta) {
		CHECK(m.lat >= 45.42);
		CHECK(m.lat <= 46.87);
		CHECK(m.lon >= 13.38);
		CHECK(m.lon <= 16.60);
		CHECK(m.road_name.find("road") != std::string::npos);
	}
}
