#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "counterscope/scoring.hpp"

using namespace counterscope;

namespace {

std::vector<HourlyProfile> flat_profiles(int periods, double value) {
	std::vector<HourlyProfile> out(periods);
	for (auto& p : out)
		p.fill(value);
	return out;
}

std::vector<HourlyProfile> random_profiles(std::mt19937& gen, int periods = 12) {
	std::uniform_real_distribution<double> dist(1.0, 100.0);
	std::vector<HourlyProfile> out(periods);
	for (auto& p : out)
		for (auto& v : p)
			v = dist(gen);
	return out;
}

} // namespace

TEST_CASE("baseline averages the four quietest periods per hour") {
	std::vector<HourlyProfile> profiles(12);
	for (int m = 0; m < 12; ++m)
		profiles[m].fill(static_cast<double>(m + 1)); // 1..12
	const auto base = baseline_of(profiles);
	for (int h = 0; h < 24; ++h)
		CHECK(base[h] == 2.5); // mean of 1,2,3,4
	CHECK_THROWS_AS(baseline_of(flat_profiles(3, 1.0)), std::invalid_argument);
}

TEST_CASE("baseline never exceeds the per-hour median") {
	std::mt19937 gen(7);
	for (int trial = 0; trial < 50; ++trial) {
		const auto profiles = random_profiles(gen);
		const auto base = baseline_of(profiles);
		for (int h = 0; h < 24; ++h) {
			std::vector<double> column;
			for (const auto& p : profiles)
				column.push_back(p[h]);
			std::sort(column.begin(), column.end());
			const double median = (column[5] + column[6]) / 2.0;
			CHECK(base[h] <= median + 1e-12);
		}
	}
}

TEST_CASE("all scores vanish on perfectly steady profiles") {
	const auto profiles = flat_profiles(12, 40.0);
	const auto base = baseline_of(profiles);
	CHECK(score_a(profiles, base) == 0.0);
	CHECK(score_b(profiles, base) == 0.0);
	CHECK(score_c(profiles) == 0.0);
	CHECK(score_d(profiles, base) == 0.0);
	CHECK(score_e(profiles, base) == 0.0);
}

TEST_CASE("a lone busy period drives every score, with located argmax") {
	auto profiles = flat_profiles(12, 5.0);
	profiles[9].fill(6.0); // October runs hot
	std::array<double, 24> base{};
	base.fill(5.0);

	ArgMax where;
	CHECK(score_a(profiles, base, &where) == 1.0);
	CHECK(where.period == 10);
	CHECK(score_b(profiles, base) == Catch::Approx(1.0 / 5.0));
	CHECK(score_d(profiles, base) == Catch::Approx(24.0));

	// z of the hot month against the column's own spread: (6 - 5) / s where
	// s = std of {5 x11, 6}; works out to sqrt(12)
	CHECK(score_e(profiles, base, &where) == Catch::Approx(std::sqrt(12.0)));
	CHECK(where.period == 10);
}

TEST_CASE("score_c averages per-hour variation over the whole day") {
	auto profiles = flat_profiles(2, 0.0);
	profiles[0][7] = 1.0;
	profiles[1][7] = 3.0;
	ArgMax where;
	// hour 7: mean 2, sample std sqrt(2), cv = sqrt(2)/2; other hours silent
	CHECK(score_c(profiles, &where) == Catch::Approx(std::sqrt(2.0) / 2.0 / 24.0));
	CHECK(where.hour == 7);
	CHECK(where.period == 0); // no single period owns this score
	CHECK_THROWS_AS(score_c(flat_profiles(1, 1.0)), std::invalid_argument);
}

TEST_CASE("score_a clamps profiles that never exceed the baseline") {
	auto profiles = flat_profiles(12, 5.0);
	std::array<double, 24> base{};
	base.fill(9.0);
	CHECK(score_a(profiles, base) == 0.0);
}

TEST_CASE("scale behavior: a and d scale, c and e do not") {
	std::mt19937 gen(99);
	for (int trial = 0; trial < 30; ++trial) {
		const auto profiles = random_profiles(gen);
		const auto base = baseline_of(profiles);
		const double lambda = 1.0 + 4.0 * std::generate_canonical<double, 53>(gen);
		auto scaled = profiles;
		for (auto& p : scaled)
			for (auto& v : p)
				v *= lambda;
		const auto scaled_base = baseline_of(scaled);
		CHECK(score_a(scaled, scaled_base) == Catch::Approx(lambda * score_a(profiles, base)));
		CHECK(score_d(scaled, scaled_base) == Catch::Approx(lambda * score_d(profiles, base)));
		CHECK(score_c(scaled) == Catch::Approx(score_c(profiles)));
		CHECK(score_e(scaled, scaled_base) == Catch::Approx(score_e(profiles, base)));
		// with baselines above the 1.0 floor, b is scale-free too
		CHECK(score_b(scaled, scaled_base) == Catch::Approx(score_b(profiles, base)));
	}
}

namespace {

ScoreCard card_of(const std::string& id, Direction dir, DayType daytype, double e) {
	ScoreCard c;
	c.key = {id, dir, daytype};
	c.e = e;
	c.argmax_e = {3, 14};
	return c;
}

} // namespace

TEST_CASE("ranking keeps each counter once, at its best card") {
	std::vector<ScoreCard> cards;
	cards.push_back(card_of("X", Direction::Dir1, DayType::Workday, 5.0));
	cards.push_back(card_of("Y", Direction::Dir1, DayType::Workday, 3.0));
	cards.push_back(card_of("Z", Direction::Dir1, DayType::Workday, 9.0));
	auto top = rank(cards, ScoreKind::E, 2);
	REQUIRE(top.size() == 2);
	CHECK(top[0].counter_id == "Z");
	CHECK(top[1].counter_id == "X");

	// the same counter in both directions appears once, at its larger value
	std::vector<ScoreCard> dirs;
	dirs.push_back(card_of("W", Direction::Dir1, DayType::Workday, 4.0));
	dirs.push_back(card_of("W", Direction::Dir2, DayType::Weekend, 7.0));
	top = rank(dirs, ScoreKind::E, 5);
	REQUIRE(top.size() == 1);
	CHECK(top[0].value == 7.0);
	CHECK(top[0].direction == Direction::Dir2);

	CHECK(rank(cards, "score_e", 1)[0].counter_id == "Z");
	CHECK_THROWS_AS(rank(cards, "score_x", 1), std::invalid_argument);
}

namespace {

RawCountRecord season_rec(const std::string& id, int month, std::uint32_t count) {
	RawCountRecord r;
	r.counter_id = id;
	r.direction = Direction::Dir1;
	r.date = Date{2016, static_cast<std::uint8_t>(month), 15};
	r.hour = 12;
	r.class_counts.emplace_back(VehicleClass::Car, count);
	return r;
}

} // namespace

TEST_CASE("seasonal deviation against the pooled corpus") {
	CleanDataset data;
	// counter X: winter 30 of 100; counter Y: winter 230 of 900;
	// corpus winter share = 260/1000 = 0.26, X's own share 0.30
	data.records.push_back(season_rec("X", 1, 30));
	data.records.push_back(season_rec("X", 4, 30));
	data.records.push_back(season_rec("X", 7, 20));
	data.records.push_back(season_rec("X", 10, 20));
	data.records.push_back(season_rec("Y", 1, 230));
	data.records.push_back(season_rec("Y", 4, 240));
	data.records.push_back(season_rec("Y", 7, 230));
	data.records.push_back(season_rec("Y", 10, 200));

	const auto result = seasonal_score(data);
	CHECK(result.corpus_shares[static_cast<int>(Season::Winter)] == Catch::Approx(0.26));
	REQUIRE(result.cards.size() == 2);
	const auto& x = result.cards[0];
	CHECK(x.counter_id == "X");
	CHECK(x.shares[static_cast<int>(Season::Winter)] == Catch::Approx(0.30));
	CHECK(x.deviations[static_cast<int>(Season::Winter)] ==
	      Catch::Approx(0.04).epsilon(0).margin(1e-12));
}

TEST_CASE("seasonal deviations sum to zero per card") {
	std::mt19937 gen(123);
	std::uniform_int_distribution<std::uint32_t> count(0, 500);
	CleanDataset data;
	for (int c = 0; c < 8; ++c)
		for (int m = 1; m <= 12; ++m)
			data.records.push_back(season_rec("C" + std::to_string(c), m, count(gen)));
	const auto result = seasonal_score(data);
	for (const auto& card : result.cards) {
		const double sum =
		    card.deviations[0] + card.deviations[1] + card.deviations[2] + card.deviations[3];
		CHECK(std::abs(sum) < 1e-12);
		// the reported maximum is indeed the largest signed deviation
		for (double dev : card.deviations)
			CHECK(card.max_deviation >= dev);
	}
}

TEST_CASE("zero-traffic directions are omitted from seasonal cards") {
	CleanDataset data;
	data.records.push_back(season_rec("X", 1, 100));
	data.records.push_back(season_rec("Y", 1, 0));
	const auto result = seasonal_score(data);
	REQUIRE(result.cards.size() == 1);
	CHECK(result.cards[0].counter_id == "X");
}

TEST_CASE("seasonal ranking picks the requested season") {
	CleanDataset data;
	data.records.push_back(season_rec("W", 1, 900)); // winter-heavy
	data.records.push_back(season_rec("W", 7, 100));
	data.records.push_back(season_rec("S", 1, 100)); // summer-heavy
	data.records.push_back(season_rec("S", 7, 900));
	const auto result = seasonal_score(data);
	const auto winter = rank_seasonal(result.cards, 2, Season::Winter);
	REQUIRE(winter.size() == 2);
	CHECK(winter[0].counter_id == "W");
	const auto any = rank_seasonal(result.cards, 1);
	CHECK(any[0].value > 0.0);
}

TEST_CASE("week tags lean on the weekend share") {
	CHECK(week_tag({0.6, 0.4}) == DayType::Weekend);
	CHECK(week_tag({0.4, 0.6}) == DayType::Workday);
	CHECK(week_tag({0.5, 0.5}) == DayType::Workday); // exact tie stays workday
	std::map<WeeklyShareKey, WeeklyShare> shares;
	shares[{"A", Direction::Dir1}] = {0.7, 0.3};
	const auto cards = week_tag_cards(shares);
	REQUIRE(cards.size() == 1);
	CHECK(cards[0].tag == DayType::Weekend);
	CHECK(cards[0].weekend_share == 0.7);
}
