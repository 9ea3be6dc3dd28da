#pragma once

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "counterscope/records.hpp"

namespace counterscope {

namespace detail {

inline std::vector<std::string> split(const std::string& line, char sep) {
	std::vector<std::string> out;
	std::size_t start = 0;
	while (true) {
		const auto pos = line.find(sep, start);
		if (pos == std::string::npos) {
			out.push_back(line.substr(start));
			return out;
		}
		out.push_back(line.substr(start, pos - start));
		start = pos + 1;
	}
}

inline std::string strip_cr(std::string s) {
	if (!s.empty() && s.back() == '\r')
		s.pop_back();
	return s;
}

template <typename Int>
inline Int parse_int(std::string_view text, const char* what, std::size_t lineno) {
	Int value{};
	const char* end = text.data() + text.size();
	const auto res = std::from_chars(text.data(), end, value);
	if (res.ec != std::errc{} || res.ptr != end)
		throw data_error_at_line(std::string("invalid ") + what + " '" + std::string(text) + "'", lineno);
	return value;
}

inline bool valid_counter_id(const std::string& id) {
	if (id.empty())
		return false;
	for (char c : id)
		if (c == ',' || c == ';' || c == '=' || c == '\n' || c == '\t')
			return false;
	return true;
}

} // namespace detail

inline constexpr const char* kCountsHeader = "counter_id,direction,date,hour,classes";
inline constexpr const char* kMetaHeader = "counter_id,lat,lon,road_name";

// Reads the hourly counts CSV. Rows for classes outside the filter are
// dropped per class; the row itself survives (possibly with an empty class
// list, which downstream treats as a reported zero). Unknown classes are a
// hard error so silently misspelled inputs cannot skew totals. Leading '#'
// comment lines and blank lines are skipped; error messages carry the
// physical 1-based line number.
inline std::vector<RawCountRecord> parse_counts(std::istream& in,
                                                const VehicleClassFilter& filter = default_class_filter()) {
	std::vector<RawCountRecord> records;
	std::string raw;
	std::size_t lineno = 0;
	bool header_seen = false;
	std::set<std::tuple<std::string, Direction, Date, std::uint8_t>> seen;
	while (std::getline(in, raw)) {
		++lineno;
		const std::string line = detail::strip_cr(raw);
		if (line.empty() || line[0] == '#')
			continue;
		if (!header_seen) {
			if (line != kCountsHeader)
				throw data_error_at_line("unexpected counts header '" + line + "'", lineno);
			header_seen = true;
			continue;
		}
		const auto fields = detail::split(line, ',');
		if (fields.size() != 5)
			throw data_error_at_line("expected 5 fields, got " + std::to_string(fields.size()), lineno);

		RawCountRecord rec;
		rec.counter_id = fields[0];
		if (!detail::valid_counter_id(rec.counter_id))
			throw data_error_at_line("invalid counter id '" + fields[0] + "'", lineno);
		try {
			rec.direction = direction_from_int(detail::parse_int<int>(fields[1], "direction", lineno));
			rec.date = parse_iso_date(fields[2]);
		} catch (const DataError& e) {
			throw data_error_at_line(e.what(), lineno);
		}
		const int hour = detail::parse_int<int>(fields[3], "hour", lineno);
		if (hour < 0 || hour > 23)
			throw data_error_at_line("hour out of range", lineno);
		rec.hour = static_cast<std::uint8_t>(hour);

		if (!fields[4].empty()) {
			std::set<VehicleClass> in_row;
			for (const auto& item : detail::split(fields[4], ';')) {
				const auto eq = item.find('=');
				if (eq == std::string::npos || eq == 0)
					throw data_error_at_line("malformed class entry '" + item + "'", lineno);
				VehicleClass cls;
				try {
					cls = vehicle_class_from_string(item.substr(0, eq));
				} catch (const DataError& e) {
					throw data_error_at_line(e.what(), lineno);
				}
				if (!in_row.insert(cls).second)
					throw data_error_at_line("duplicate vehicle class '" + item.substr(0, eq) + "'", lineno);
				const auto count = detail::parse_int<std::uint32_t>(item.substr(eq + 1), "count", lineno);
				if (filter.count(cls))
					rec.class_counts.emplace_back(cls, count);
			}
		}
		std::sort(rec.class_counts.begin(), rec.class_counts.end());

		if (!seen.insert({rec.counter_id, rec.direction, rec.date, rec.hour}).second)
			throw data_error_at_line("duplicate record for " + rec.counter_id + "/" +
			                             std::to_string(to_int(rec.direction)) + " " +
			                             to_iso_string(rec.date) + " hour " + std::to_string(rec.hour),
			                         lineno);
		records.push_back(std::move(rec));
	}
	std::sort(records.begin(), records.end(), record_order);
	return records;
}

inline std::vector<RawCountRecord> parse_counts_file(const std::string& path,
                                                     const VehicleClassFilter& filter = default_class_filter()) {
	std::ifstream in(path);
	if (!in)
		throw DataError("cannot open counts file '" + path + "'");
	return parse_counts(in, filter);
}

// Inverse of parse_counts for well-formed records (no filtering applied).
inline void serialize_counts(std::ostream& out, const std::vector<RawCountRecord>& records,
                             const std::vector<std::string>& comment_lines = {}) {
	for (const auto& c : comment_lines)
		out << "# " << c << "\n";
	out << kCountsHeader << "\n";
	std::vector<const RawCountRecord*> sorted;
	sorted.reserve(records.size());
	for (const auto& r : records)
		sorted.push_back(&r);
	std::sort(sorted.begin(), sorted.end(),
	          [](const RawCountRecord* a, const RawCountRecord* b) { return record_order(*a, *b); });
	for (const RawCountRecord* r : sorted) {
		out << r->counter_id << ',' << to_int(r->direction) << ',' << to_iso_string(r->date) << ','
		    << unsigned(r->hour) << ',';
		bool first = true;
		for (const auto& [cls, n] : r->class_counts) {
			if (!first)
				out << ';';
			out << to_string(cls) << '=' << n;
			first = false;
		}
		out << "\n";
	}
}

// Counter metadata CSV. road_name is free text and may itself contain
// commas, so it is everything after the third separator.
inline std::map<std::string, CounterMeta> parse_meta(std::istream& in) {
	std::map<std::string, CounterMeta> meta;
	std::string raw;
	std::size_t lineno = 0;
	bool header_seen = false;
	while (std::getline(in, raw)) {
		++lineno;
		const std::string line = detail::strip_cr(raw);
		if (line.empty() || line[0] == '#')
			continue;
		if (!header_seen) {
			if (line != kMetaHeader)
				throw data_error_at_line("unexpected metadata header '" + line + "'", lineno);
			header_seen = true;
			continue;
		}
		std::size_t p1 = line.find(',');
		std::size_t p2 = p1 == std::string::npos ? p1 : line.find(',', p1 + 1);
		std::size_t p3 = p2 == std::string::npos ? p2 : line.find(',', p2 + 1);
		if (p3 == std::string::npos)
			throw data_error_at_line("expected 4 fields", lineno);
		CounterMeta m;
		m.counter_id = line.substr(0, p1);
		if (!detail::valid_counter_id(m.counter_id))
			throw data_error_at_line("invalid counter id '" + m.counter_id + "'", lineno);
		try {
			m.lat = std::stod(line.substr(p1 + 1, p2 - p1 - 1));
			m.lon = std::stod(line.substr(p2 + 1, p3 - p2 - 1));
		} catch (const std::exception&) {
			throw data_error_at_line("invalid coordinates", lineno);
		}
		if (m.lat < -90.0 || m.lat > 90.0 || m.lon < -180.0 || m.lon > 180.0)
			throw data_error_at_line("coordinates out of range", lineno);
		m.road_name = line.substr(p3 + 1);
		if (!meta.emplace(m.counter_id, std::move(m)).second)
			throw data_error_at_line("duplicate metadata for counter '" + line.substr(0, p1) + "'", lineno);
	}
	return meta;
}

inline std::map<std::string, CounterMeta> parse_meta_file(const std::string& path) {
	std::ifstream in(path);
	if (!in)
		throw DataError("cannot open metadata file '" + path + "'");
	return parse_meta(in);
}

inline void serialize_meta(std::ostream& out, const std::map<std::string, CounterMeta>& meta,
                           const std::vector<std::string>& comment_lines = {}) {
	for (const auto& c : comment_lines)
		out << "# " << c << "\n";
	out << kMetaHeader << "\n";
	char buf[64];
	for (const auto& [id, m] : meta) {
		std::snprintf(buf, sizeof buf, "%.6f,%.6f", m.lat, m.lon);
		out << id << ',' << buf << ',' << m.road_name << "\n";
	}
}

struct QcDecision {
	std::string counter_id;
	std::string reason; // e.g. "missing 2016-03" or "fall-out 2015-07"
};

struct QcReport {
	std::vector<std::string> kept;     // counter ids, ascending
	std::vector<QcDecision> dropped;   // counter ids, ascending
	std::size_t records_in = 0;
	std::size_t records_out = 0;
};

// Longitudinal quality control. A counter survives only if, in every year
// covered by the corpus, each of the 12 calendar months has at least one
// record and at least one nonzero count. Both directions stand and fall
// together: a sensor that lost one loop is not trustworthy on the other.
inline CleanDataset qc_filter(const std::vector<RawCountRecord>& records,
                              const std::map<std::string, CounterMeta>& meta = {},
                              QcReport* report = nullptr) {
	CleanDataset out;
	for (const auto& r : records)
		out.years_covered.insert(r.date.year);

	struct MonthState {
		bool any = false;
		bool nonzero = false;
	};
	// (counter) -> (year, month) -> state
	std::map<std::string, std::map<std::pair<int, int>, MonthState>> state;
	for (const auto& r : records) {
		auto& cell = state[r.counter_id][{r.date.year, r.date.month}];
		cell.any = true;
		if (r.total() > 0)
			cell.nonzero = true;
	}

	auto month_tag = [](int year, int month) {
		char buf[8];
		std::snprintf(buf, sizeof buf, "%02d", month);
		return std::to_string(year) + "-" + buf;
	};

	std::set<std::string> keep;
	QcReport local;
	for (const auto& [id, months] : state) {
		std::string reason;
		for (int year : out.years_covered) {
			for (int month = 1; month <= 12 && reason.empty(); ++month) {
				const auto it = months.find({year, month});
				if (it == months.end() || !it->second.any)
					reason = "missing " + month_tag(year, month);
				else if (!it->second.nonzero)
					reason = "fall-out " + month_tag(year, month);
			}
			if (!reason.empty())
				break;
		}
		if (reason.empty()) {
			keep.insert(id);
			local.kept.push_back(id);
		} else {
			local.dropped.push_back({id, reason});
		}
	}

	out.records.reserve(records.size());
	for (const auto& r : records)
		if (keep.count(r.counter_id))
			out.records.push_back(r);
	std::sort(out.records.begin(), out.records.end(), record_order);

	// metadata follows the surviving counters
	for (const auto& [id, m] : meta)
		if (keep.count(id))
			out.meta.emplace(id, m);

	local.records_in = records.size();
	local.records_out = out.records.size();
	if (report)
		*report = std::move(local);
	return out;
}

} // namespace counterscope
