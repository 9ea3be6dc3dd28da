#pragma once

#include <fstream>
#include <set>
#include <string>

#include "counterscope/date.hpp"
#include "counterscope/errors.hpp"

namespace counterscope {

enum class DayType : std::uint8_t { Workday = 0, Weekend = 1 };
enum class Season : std::uint8_t { Spring = 0, Summer, Autumn, Winter };

inline const char* to_string(DayType t) {
	return t == DayType::Workday ? "workday" : "weekend";
}

inline DayType daytype_from_string(const std::string& s) {
	if (s == "workday")
		return DayType::Workday;
	if (s == "weekend")
		return DayType::Weekend;
	throw DataError("unknown day type '" + s + "'");
}

inline const char* to_string(Season s) {
	switch (s) {
	case Season::Spring: return "spring";
	case Season::Summer: return "summer";
	case Season::Autumn: return "autumn";
	default: return "winter";
	}
}

// Meteorological seasons: Dec-Feb winter, Mar-May spring, and so on.
inline Season season_of_month(int month) {
	if (month < 1 || month > 12)
		throw std::invalid_argument("month out of range: " + std::to_string(month));
	if (month >= 3 && month <= 5)
		return Season::Spring;
	if (month >= 6 && month <= 8)
		return Season::Summer;
	if (month >= 9 && month <= 11)
		return Season::Autumn;
	return Season::Winter;
}

// Public holidays are data, not code: one ISO date per line, '#' comments and
// blank lines ignored. An empty calendar is valid (no holiday adjustment).
class HolidayCalendar {
public:
	HolidayCalendar() = default;

	explicit HolidayCalendar(std::set<Date> dates) : dates_(std::move(dates)) {}

	static HolidayCalendar load(const std::string& path) {
		std::ifstream in(path);
		if (!in)
			throw DataError("cannot open holiday file '" + path + "'");
		std::set<Date> dates;
		std::string line;
		std::size_t lineno = 0;
		while (std::getline(in, line)) {
			++lineno;
			if (auto pos = line.find('#'); pos != std::string::npos)
				line.erase(pos);
			// trim surrounding whitespace
			const auto first = line.find_first_not_of(" \t\r");
			if (first == std::string::npos)
				continue;
			const auto last = line.find_last_not_of(" \t\r");
			const std::string token = line.substr(first, last - first + 1);
			try {
				dates.insert(parse_iso_date(token));
			} catch (const DataError&) {
				throw data_error_at_line("invalid holiday date '" + token + "'", lineno);
			}
		}
		return HolidayCalendar(std::move(dates));
	}

	bool contains(const Date& d) const { return dates_.count(d) != 0; }
	std::size_t size() const { return dates_.size(); }
	const std::set<Date>& dates() const { return dates_; }

private:
	std::set<Date> dates_;
};

// Saturdays, Sundays and listed public holidays count as weekend days.
inline DayType classify_day(const Date& d, const HolidayCalendar& holidays) {
	const Weekday wd = weekday_of(d);
	if (wd == Weekday::Sat || wd == Weekday::Sun || holidays.contains(d))
		return DayType::Weekend;
	return DayType::Workday;
}

} // namespace counterscope
