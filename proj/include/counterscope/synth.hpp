#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "counterscope/records.hpp"
#include "counterscope/rng.hpp"
#include "counterscope/version.hpp"

namespace counterscope {

enum class Archetype : std::uint8_t { Commuter = 0, SummerTourist, WinterResort, BorderWeekend, Flat };

inline const char* to_string(Archetype a) {
	switch (a) {
	case Archetype::Commuter: return "commuter";
	case Archetype::SummerTourist: return "summer_tourist";
	case Archetype::WinterResort: return "winter_resort";
	case Archetype::BorderWeekend: return "border_weekend";
	default: return "flat";
	}
}

inline Archetype archetype_from_string(const std::string& s) {
	if (s == "commuter") return Archetype::Commuter;
	if (s == "summer_tourist") return Archetype::SummerTourist;
	if (s == "winter_resort") return Archetype::WinterResort;
	if (s == "border_weekend") return Archetype::BorderWeekend;
	if (s == "flat") return Archetype::Flat;
	throw DataError("unknown archetype '" + s + "'");
}

enum class EventKind : std::uint8_t { FestivalSpike = 0, AccidentDay, RoadClosure };

inline const char* to_string(EventKind k) {
	switch (k) {
	case EventKind::FestivalSpike: return "festival_spike";
	case EventKind::AccidentDay: return "accident_day";
	default: return "road_closure";
	}
}

inline EventKind event_kind_from_string(const std::string& s) {
	if (s == "festival_spike") return EventKind::FestivalSpike;
	if (s == "accident_day") return EventKind::AccidentDay;
	if (s == "road_closure") return EventKind::RoadClosure;
	throw DataError("unknown event kind '" + s + "'");
}

// A multiplicative disturbance planted on one counter. RoadClosure uses
// magnitude 0; festival traffic arrives on direction 1 in the first half of
// the hour window and leaves on direction 2 in the second half.
struct PlantedEvent {
	EventKind kind = EventKind::FestivalSpike;
	std::string counter_id;
	Date start;
	Date end;           // inclusive
	int hour_start = 0; // inclusive
	int hour_end = 23;  // inclusive
	double magnitude = 1.0;
};

struct CounterSpec {
	std::string id;
	Archetype archetype = Archetype::Flat;
};

struct ScenarioSpec {
	std::string name = "custom";
	std::vector<CounterSpec> counters;
	std::vector<int> years = {2016};
	std::vector<PlantedEvent> events;
	double noise_level = 0.1; // sigma of multiplicative lognormal noise
	std::uint64_t seed = 42;
};

namespace synth_detail {

inline double bump(double h, double center, double width) {
	const double d = (h - center) / width;
	return std::exp(-0.5 * d * d);
}

// Base hourly rates (vehicles per hour) by archetype, direction and day
// type. Weekday-invariant within each day type so that, without noise, the
// aggregated monthly profiles are exactly periodic across years.
inline std::array<double, 24> day_shape(Archetype a, Direction dir, bool weekend) {
	std::array<double, 24> v{};
	for (int h = 0; h < 24; ++h) {
		const double t = static_cast<double>(h);
		double rate = 0.0;
		switch (a) {
		case Archetype::Commuter:
			if (weekend)
				rate = 25.0 + 55.0 * bump(t, 12.0, 3.0);
			else if (dir == Direction::Dir1)
				rate = 30.0 + 470.0 * bump(t, 7.0, 1.2) + 120.0 * bump(t, 15.0, 1.5);
			else
				rate = 30.0 + 470.0 * bump(t, 15.0, 1.2) + 120.0 * bump(t, 7.0, 1.5);
			break;
		case Archetype::SummerTourist:
			rate = dir == Direction::Dir1 ? 8.0 + 142.0 * bump(t, 12.0, 2.0)
			                              : 8.0 + 142.0 * bump(t, 17.0, 2.0);
			break;
		case Archetype::WinterResort:
			rate = dir == Direction::Dir1
			           ? 8.0 + 142.0 * bump(t, 8.0, 1.5)
			           : 8.0 + 100.0 * bump(t, 13.0, 1.2) + 120.0 * bump(t, 16.0, 1.2);
			break;
		case Archetype::BorderWeekend:
			if (weekend)
				rate = dir == Direction::Dir1 ? 10.0 + 140.0 * bump(t, 8.5, 1.5)
				                              : 10.0 + 140.0 * bump(t, 17.5, 1.5);
			else
				rate = 12.0 + 10.0 * bump(t, 13.0, 3.0);
			break;
		case Archetype::Flat:
			rate = 50.0;
			break;
		}
		v[h] = rate;
	}
	return v;
}

// Month-of-year amplitude, applied to every hour of the day. Nontrivial for
// every archetype except Flat: commuter roads dip over the summer holidays,
// tourist roads swell in their season.
inline std::array<double, 12> monthly_amplitude(Archetype a) {
	switch (a) {
	case Archetype::Commuter:
		return {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 0.85, 0.8, 1.0, 1.0, 1.0, 1.0};
	case Archetype::SummerTourist:
		return {0.25, 0.25, 0.4, 0.6, 0.9, 2.0, 3.0, 3.0, 1.4, 0.7, 0.35, 0.25};
	case Archetype::WinterResort:
		return {3.0, 3.5, 1.5, 0.6, 0.45, 0.45, 0.5, 0.8, 0.55, 0.5, 0.8, 2.5};
	case Archetype::BorderWeekend:
		return {0.6, 0.6, 0.7, 0.8, 1.0, 1.5, 2.5, 2.5, 1.2, 0.8, 0.6, 0.6};
	default:
		return {1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
	}
}

inline double peak_vph(Archetype a) {
	switch (a) {
	case Archetype::Commuter: return 500.0;
	case Archetype::Flat: return 50.0;
	default: return 150.0;
	}
}

inline double event_multiplier(const std::vector<const PlantedEvent*>& events, Direction dir,
                               const Date& date, int hour) {
	double mult = 1.0;
	for (const PlantedEvent* ev : events) {
		if (date < ev->start || ev->end < date)
			continue;
		if (hour < ev->hour_start || hour > ev->hour_end)
			continue;
		if (ev->kind == EventKind::FestivalSpike) {
			// arrivals first, departures second
			const int mid = (ev->hour_start + ev->hour_end) / 2;
			const bool first_half = hour <= mid;
			if ((dir == Direction::Dir1) != first_half)
				continue;
		}
		mult *= ev->magnitude;
	}
	return mult;
}

// Deterministic pseudo-coordinates inside a Slovenia-sized bounding box.
inline CounterMeta synth_meta(const std::string& id, Archetype a) {
	const auto h1 = rng::fnv1a64(id + "/lat");
	const auto h2 = rng::fnv1a64(id + "/lon");
	const double u1 = static_cast<double>(h1 >> 11) * 0x1.0p-53;
	const double u2 = static_cast<double>(h2 >> 11) * 0x1.0p-53;
	CounterMeta m;
	m.counter_id = id;
	m.lat = 45.42 + u1 * (46.87 - 45.42);
	m.lon = 13.38 + u2 * (16.60 - 13.38);
	m.road_name = std::string("synthetic ") + to_string(a) + " road";
	return m;
}

} // namespace synth_detail

struct SynthResult {
	std::vector<RawCountRecord> records; // sorted by record_order
	std::map<std::string, CounterMeta> meta;
};

// Generates one hourly record per (counter, direction, day, hour). Every
// counter owns an RNG stream derived from (seed, counter id), consumed in a
// fixed order (date, then hour, then direction), so adding counters or
// events never disturbs the noise of existing records. Counts are
// base rate x monthly amplitude x planted events x lognormal noise, rounded.
inline SynthResult generate(const ScenarioSpec& spec) {
	SynthResult out;
	std::set<std::string> ids;
	for (const auto& c : spec.counters)
		if (!ids.insert(c.id).second)
			throw std::invalid_argument("duplicate counter id '" + c.id + "' in scenario");
	if (spec.years.empty())
		throw std::invalid_argument("scenario has no years");
	if (spec.noise_level < 0.0)
		throw std::invalid_argument("noise_level must be >= 0");
	for (const auto& ev : spec.events) {
		if (!ids.count(ev.counter_id))
			throw std::invalid_argument("event references unknown counter '" + ev.counter_id + "'");
		if (ev.end < ev.start || ev.hour_start > ev.hour_end || ev.hour_start < 0 || ev.hour_end > 23)
			throw std::invalid_argument("malformed event window for '" + ev.counter_id + "'");
		if (ev.magnitude < 0.0)
			throw std::invalid_argument("event magnitude must be >= 0");
	}

	std::vector<int> years = spec.years;
	std::sort(years.begin(), years.end());

	std::size_t total_days = 0;
	for (int y : years)
		total_days += is_leap_year(y) ? 366 : 365;
	out.records.reserve(spec.counters.size() * total_days * 48);

	for (const auto& counter : spec.counters) {
		std::mt19937_64 g(rng::derive_seed(spec.seed, counter.id));
		std::vector<const PlantedEvent*> events;
		for (const auto& ev : spec.events)
			if (ev.counter_id == counter.id)
				events.push_back(&ev);

		std::array<std::array<double, 24>, 4> shapes; // [weekend][dir-1]
		for (int we = 0; we < 2; ++we)
			for (int d = 0; d < 2; ++d)
				shapes[we * 2 + d] = synth_detail::day_shape(
				    counter.archetype, d == 0 ? Direction::Dir1 : Direction::Dir2, we == 1);
		const auto amp = synth_detail::monthly_amplitude(counter.archetype);

		for (int year : years) {
			const Date first{static_cast<std::int16_t>(year), 1, 1};
			const Date last{static_cast<std::int16_t>(year), 12, 31};
			for (std::int64_t serial = to_serial_day(first); serial <= to_serial_day(last); ++serial) {
				const Date date = from_serial_day(serial);
				const Weekday wd = weekday_of(date);
				const int we = (wd == Weekday::Sat || wd == Weekday::Sun) ? 1 : 0;
				for (int hour = 0; hour < 24; ++hour) {
					for (int d = 0; d < 2; ++d) {
						const Direction dir = d == 0 ? Direction::Dir1 : Direction::Dir2;
						const double z = rng::normal(g); // always drawn, keeps streams aligned
						const double rate = shapes[we * 2 + d][hour] * amp[date.month - 1] *
						                    synth_detail::event_multiplier(events, dir, date, hour);
						const double noisy =
						    spec.noise_level == 0.0 ? rate : rate * std::exp(spec.noise_level * z);
						RawCountRecord rec;
						rec.counter_id = counter.id;
						rec.direction = dir;
						rec.date = date;
						rec.hour = static_cast<std::uint8_t>(hour);
						rec.class_counts.emplace_back(
						    VehicleClass::Car, static_cast<std::uint32_t>(std::llround(std::max(noisy, 0.0))));
						out.records.push_back(std::move(rec));
					}
				}
			}
		}
		out.meta.emplace(counter.id, synth_detail::synth_meta(counter.id, counter.archetype));
	}
	std::sort(out.records.begin(), out.records.end(), record_order);
	return out;
}

// --- ground-truth manifest -------------------------------------------------

inline nlohmann::json truth_manifest(const ScenarioSpec& spec) {
	nlohmann::json j;
	j["tool"] = kToolName;
	j["version"] = kVersion;
	j["scenario"] = spec.name;
	j["seed"] = spec.seed;
	j["noise_level"] = spec.noise_level;
	j["years"] = spec.years;
	j["vehicle_class"] = "car";
	auto counters = nlohmann::json::array();
	for (const auto& c : spec.counters) {
		counters.push_back({{"id", c.id},
		                    {"archetype", to_string(c.archetype)},
		                    {"peak_vph", synth_detail::peak_vph(c.archetype)}});
	}
	j["counters"] = std::move(counters);
	auto events = nlohmann::json::array();
	std::set<std::string> planted;
	for (const auto& ev : spec.events) {
		events.push_back({{"kind", to_string(ev.kind)},
		                  {"counter_id", ev.counter_id},
		                  {"start", to_iso_string(ev.start)},
		                  {"end", to_iso_string(ev.end)},
		                  {"hour_start", ev.hour_start},
		                  {"hour_end", ev.hour_end},
		                  {"magnitude", ev.magnitude}});
		planted.insert(ev.counter_id);
	}
	j["events"] = std::move(events);
	j["planted"] = std::vector<std::string>(planted.begin(), planted.end());
	return j;
}

inline ScenarioSpec scenario_from_manifest(const nlohmann::json& j) {
	ScenarioSpec spec;
	try {
		spec.name = j.at("scenario").get<std::string>();
		spec.seed = j.at("seed").get<std::uint64_t>();
		spec.noise_level = j.at("noise_level").get<double>();
		spec.years = j.at("years").get<std::vector<int>>();
		for (const auto& c : j.at("counters"))
			spec.counters.push_back(
			    {c.at("id").get<std::string>(), archetype_from_string(c.at("archetype").get<std::string>())});
		for (const auto& e : j.at("events")) {
			PlantedEvent ev;
			ev.kind = event_kind_from_string(e.at("kind").get<std::string>());
			ev.counter_id = e.at("counter_id").get<std::string>();
			ev.start = parse_iso_date(e.at("start").get<std::string>());
			ev.end = parse_iso_date(e.at("end").get<std::string>());
			ev.hour_start = e.at("hour_start").get<int>();
			ev.hour_end = e.at("hour_end").get<int>();
			ev.magnitude = e.at("magnitude").get<double>();
			spec.events.push_back(std::move(ev));
		}
	} catch (const nlohmann::json::exception& e) {
		throw DataError(std::string("malformed truth manifest: ") + e.what());
	}
	return spec;
}

struct DetectionQuality {
	double precision_at_k = 0.0;
	double recall_at_k = 0.0;
	std::size_t hits = 0;
	std::size_t planted = 0;
};

// Precision/recall of a ranked detection list against the manifest's planted
// counters. Detections must come from the same corpus.
inline DetectionQuality manifest_check(const ScenarioSpec& truth,
                                       const std::vector<std::string>& detections, std::size_t k) {
	if (k == 0)
		throw std::invalid_argument("k must be >= 1");
	std::set<std::string> corpus;
	for (const auto& c : truth.counters)
		corpus.insert(c.id);
	std::set<std::string> planted;
	for (const auto& ev : truth.events)
		planted.insert(ev.counter_id);
	if (planted.empty())
		throw std::invalid_argument("scenario has no planted events to check against");
	std::set<std::string> seen;
	for (const auto& d : detections) {
		if (!corpus.count(d))
			throw DataError("detection for unknown counter '" + d + "'");
		if (!seen.insert(d).second)
			throw DataError("duplicate detection for counter '" + d + "'");
	}
	DetectionQuality q;
	q.planted = planted.size();
	const std::size_t top = std::min(k, detections.size());
	for (std::size_t i = 0; i < top; ++i)
		if (planted.count(detections[i]))
			++q.hits;
	q.precision_at_k = static_cast<double>(q.hits) / static_cast<double>(k);
	q.recall_at_k = static_cast<double>(q.hits) / static_cast<double>(planted.size());
	return q;
}

// --- scenario presets -------------------------------------------------------

namespace synth_detail {

inline std::string counter_name(int i) {
	char buf[16];
	std::snprintf(buf, sizeof buf, "S%03d", i);
	return buf;
}

} // namespace synth_detail

// A mixed rural corpus with one flat counter hosting a festival weekend:
// an eightfold surge on one October weekend, arrivals before mid-window,
// departures after.
inline ScenarioSpec festival_scenario(int n_counters = 50, std::uint64_t seed = 42,
                                      double noise = 0.1) {
	if (n_counters < 2)
		throw std::invalid_argument("festival scenario needs at least 2 counters");
	ScenarioSpec spec;
	spec.name = "festival";
	spec.seed = seed;
	spec.noise_level = noise;
	spec.years = {2016};
	const int planted = n_counters / 2;
	static constexpr Archetype cycle[] = {Archetype::Commuter, Archetype::SummerTourist,
	                                      Archetype::WinterResort, Archetype::BorderWeekend};
	for (int i = 1; i <= n_counters; ++i) {
		const auto id = synth_detail::counter_name(i);
		spec.counters.push_back(
		    {id, i == planted ? Archetype::Flat : cycle[static_cast<std::size_t>(i) % 4]});
	}
	PlantedEvent ev;
	ev.kind = EventKind::FestivalSpike;
	ev.counter_id = synth_detail::counter_name(planted);
	ev.start = Date{2016, 10, 8}; // a Saturday
	ev.end = Date{2016, 10, 9};
	ev.hour_start = 10;
	ev.hour_end = 17;
	ev.magnitude = 8.0;
	spec.events.push_back(std::move(ev));
	return spec;
}

// One winter-resort road hiding among flat and commuter counters.
inline ScenarioSpec ski_scenario(int n_counters = 50, std::uint64_t seed = 42, double noise = 0.1) {
	if (n_counters < 2)
		throw std::invalid_argument("ski scenario needs at least 2 counters");
	ScenarioSpec spec;
	spec.name = "ski";
	spec.seed = seed;
	spec.noise_level = noise;
	spec.years = {2016};
	const int planted = n_counters / 2;
	for (int i = 1; i <= n_counters; ++i) {
		const auto id = synth_detail::counter_name(i);
		spec.counters.push_back({id, i == planted          ? Archetype::WinterResort
		                             : (i % 2 == 0 ? Archetype::Flat : Archetype::Commuter)});
	}
	return spec;
}

// A commuter road closed for four weeks of March (the last days stay open,
// so the counter still reports nonzero traffic in every month).
inline ScenarioSpec closure_scenario(int n_counters = 50, std::uint64_t seed = 42,
                                     double noise = 0.1) {
	if (n_counters < 2)
		throw std::invalid_argument("closure scenario needs at least 2 counters");
	ScenarioSpec spec;
	spec.name = "closure";
	spec.seed = seed;
	spec.noise_level = noise;
	spec.years = {2016};
	const int planted = n_counters / 2;
	for (int i = 1; i <= n_counters; ++i) {
		const auto id = synth_detail::counter_name(i);
		spec.counters.push_back({id, i == planted          ? Archetype::Commuter
		                             : (i % 2 == 0 ? Archetype::Flat : Archetype::Commuter)});
	}
	PlantedEvent ev;
	ev.kind = EventKind::RoadClosure;
	ev.counter_id = synth_detail::counter_name(planted);
	ev.start = Date{2016, 3, 1};
	ev.end = Date{2016, 3, 28};
	ev.hour_start = 0;
	ev.hour_end = 23;
	ev.magnitude = 0.0;
	spec.events.push_back(std::move(ev));
	return spec;
}

// Half high-volume commuter roads, half low flat roads; no events.
inline ScenarioSpec twomag_scenario(int n_counters = 40, std::uint64_t seed = 42,
                                    double noise = 0.1) {
	if (n_counters < 2)
		throw std::invalid_argument("twomag scenario needs at least 2 counters");
	ScenarioSpec spec;
	spec.name = "twomag";
	spec.seed = seed;
	spec.noise_level = noise;
	spec.years = {2016};
	for (int i = 1; i <= n_counters; ++i)
		spec.counters.push_back({synth_detail::counter_name(i),
		                         i <= n_counters / 2 ? Archetype::Commuter : Archetype::Flat});
	return spec;
}

// All commuter roads: weekday and weekend day shapes differ, directions do
// not (much). Exercises shape-based clustering.
inline ScenarioSpec shapes_scenario(int n_counters = 25, std::uint64_t seed = 42,
                                    double noise = 0.1) {
	if (n_counters < 1)
		throw std::invalid_argument("shapes scenario needs at least 1 counter");
	ScenarioSpec spec;
	spec.name = "shapes";
	spec.seed = seed;
	spec.noise_level = noise;
	spec.years = {2016};
	for (int i = 1; i <= n_counters; ++i)
		spec.counters.push_back({synth_detail::counter_name(i), Archetype::Commuter});
	return spec;
}

// A bit of everything, cycling through all five archetypes; no events.
inline ScenarioSpec mixed_scenario(int n_counters = 10, std::uint64_t seed = 42,
                                   double noise = 0.1) {
	if (n_counters < 1)
		throw std::invalid_argument("mixed scenario needs at least 1 counter");
	ScenarioSpec spec;
	spec.name = "mixed";
	spec.seed = seed;
	spec.noise_level = noise;
	spec.years = {2016};
	static constexpr Archetype cycle[] = {Archetype::Commuter, Archetype::SummerTourist,
	                                      Archetype::WinterResort, Archetype::BorderWeekend,
	                                      Archetype::Flat};
	for (int i = 1; i <= n_counters; ++i)
		spec.counters.push_back({synth_detail::counter_name(i), cycle[(i - 1) % 5]});
	return spec;
}

inline ScenarioSpec scenario_by_name(const std::string& name, int n_counters, std::uint64_t seed,
                                     double noise) {
	if (name == "festival") return festival_scenario(n_counters, seed, noise);
	if (name == "ski") return ski_scenario(n_counters, seed, noise);
	if (name == "closure") return closure_scenario(n_counters, seed, noise);
	if (name == "twomag") return twomag_scenario(n_counters, seed, noise);
	if (name == "shapes") return shapes_scenario(n_counters, seed, noise);
	if (name == "mixed") return mixed_scenario(n_counters, seed, noise);
	throw std::invalid_argument("unknown scenario '" + name + "'");
}

} // namespace counterscope
