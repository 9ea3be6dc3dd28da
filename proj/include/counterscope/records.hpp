#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "counterscope/date.hpp"
#include "counterscope/errors.hpp"

namespace counterscope {

enum class Direction : std::uint8_t { Dir1 = 1, Dir2 = 2 };

inline int to_int(Direction d) { return static_cast<int>(d); }

inline Direction direction_from_int(int v) {
	if (v != 1 && v != 2)
		throw DataError("invalid direction '" + std::to_string(v) + "'");
	return static_cast<Direction>(v);
}

enum class VehicleClass : std::uint8_t { Car = 0, Motorbike, Bus, Lorry, Truck };

inline constexpr int kVehicleClassCount = 5;

inline const char* to_string(VehicleClass c) {
	switch (c) {
	case VehicleClass::Car: return "car";
	case VehicleClass::Motorbike: return "motorbike";
	case VehicleClass::Bus: return "bus";
	case VehicleClass::Lorry: return "lorry";
	default: return "truck";
	}
}

inline VehicleClass vehicle_class_from_string(const std::string& s) {
	if (s == "car") return VehicleClass::Car;
	if (s == "motorbike") return VehicleClass::Motorbike;
	if (s == "bus") return VehicleClass::Bus;
	if (s == "lorry") return VehicleClass::Lorry;
	if (s == "truck") return VehicleClass::Truck;
	throw DataError("unknown vehicle class '" + s + "'");
}

using VehicleClassFilter = std::set<VehicleClass>;

inline VehicleClassFilter default_class_filter() {
	return {VehicleClass::Car, VehicleClass::Motorbike};
}

// One counts row after class filtering. class_counts is sorted by class and
// keeps explicit zeros (a reported "car=0" is data, an absent class is not).
struct RawCountRecord {
	std::string counter_id;
	Direction direction = Direction::Dir1;
	Date date;
	std::uint8_t hour = 0; // 0..23
	std::vector<std::pair<VehicleClass, std::uint32_t>> class_counts;

	std::uint64_t total() const {
		std::uint64_t sum = 0;
		for (const auto& [cls, n] : class_counts)
			sum += n;
		return sum;
	}

	friend bool operator==(const RawCountRecord&, const RawCountRecord&) = default;
};

// Sort key used everywhere a deterministic record order is required.
inline bool record_order(const RawCountRecord& a, const RawCountRecord& b) {
	return std::tie(a.counter_id, a.direction, a.date, a.hour) <
	       std::tie(b.counter_id, b.direction, b.date, b.hour);
}

struct CounterMeta {
	std::string counter_id;
	double lat = 0.0;
	double lon = 0.0;
	std::string road_name;

	friend bool operator==(const CounterMeta&, const CounterMeta&) = default;
};

// Records that survived quality control, plus whatever metadata was supplied.
struct CleanDataset {
	std::vector<RawCountRecord> records; // sorted by record_order
	std::map<std::string, CounterMeta> meta;
	std::set<int> years_covered;
};

} // namespace counterscope
