#pragma once

#include <compare>
#include <cstdint>
#include <cstdio>
#include <string>

#include "counterscope/errors.hpp"

namespace counterscope {

enum class Weekday : std::uint8_t { Mon = 0, Tue, Wed, Thu, Fri, Sat, Sun };

// Plain civil date. Kept as a value type so records stay cheap to copy and
// sort; conversions go through a serial day number (days since 1970-01-01).
struct Date {
	std::int16_t year = 1970;
	std::uint8_t month = 1; // 1..12
	std::uint8_t day = 1;   // 1..31

	friend auto operator<=>(const Date&, const Date&) = default;
};

inline bool is_leap_year(int y) {
	return y % 4 == 0 && (y % 100 != 0 || y % 400 == 0);
}

inline int days_in_month(int year, int month) {
	static constexpr int lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
	if (month < 1 || month > 12)
		throw std::invalid_argument("month out of range: " + std::to_string(month));
	if (month == 2 && is_leap_year(year))
		return 29;
	return lengths[month - 1];
}

inline bool is_valid_date(const Date& d) {
	return d.month >= 1 && d.month <= 12 && d.day >= 1 &&
	       d.day <= days_in_month(d.year, d.month);
}

// Days since 1970-01-01 (negative before). Classic civil-from-days pairing,
// valid far beyond the years this tool will ever see.
inline std::int64_t to_serial_day(const Date& d) {
	std::int64_t y = d.year;
	const int m = d.month;
	y -= m <= 2;
	const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
	const unsigned yoe = static_cast<unsigned>(y - era * 400);
	const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d.day - 1;
	const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
	return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

inline Date from_serial_day(std::int64_t z) {
	z += 719468;
	const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
	const unsigned doe = static_cast<unsigned>(z - era * 146097);
	const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
	const std::int64_t y = static_cast<std::int64_t>(yoe) + era * 400;
	const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
	const unsigned mp = (5 * doy + 2) / 153;
	const unsigned d = doy - (153 * mp + 2) / 5 + 1;
	const unsigned m = mp + (mp < 10 ? 3 : -9);
	return Date{static_cast<std::int16_t>(y + (m <= 2)),
	            static_cast<std::uint8_t>(m), static_cast<std::uint8_t>(d)};
}

inline Weekday weekday_of(const Date& d) {
	const std::int64_t serial = to_serial_day(d); // 1970-01-01 was a Thursday
	return static_cast<Weekday>(((serial % 7) + 10) % 7);
}

// Strict ISO "YYYY-MM-DD". Rejects impossible calendar dates.
inline Date parse_iso_date(const std::string& text) {
	auto bad = [&] { return DataError("invalid date '" + text + "'"); };
	if (text.size() != 10 || text[4] != '-' || text[7] != '-')
		throw bad();
	for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
		if (text[i] < '0' || text[i] > '9')
			throw bad();
	const int y = std::stoi(text.substr(0, 4));
	const int m = std::stoi(text.substr(5, 2));
	const int d = std::stoi(text.substr(8, 2));
	Date date{static_cast<std::int16_t>(y), static_cast<std::uint8_t>(m),
	          static_cast<std::uint8_t>(d)};
	if (!is_valid_date(date))
		throw bad();
	return date;
}

inline std::string to_iso_string(const Date& d) {
	char buf[16];
	std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", d.year, unsigned(d.month), unsigned(d.day));
	return buf;
}

} // namespace counterscope
