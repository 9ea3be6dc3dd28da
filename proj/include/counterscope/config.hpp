#pragma once

#include <cstdint>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "counterscope/rng.hpp"
#include "counterscope/version.hpp"

namespace counterscope {

// Hash of the effective run configuration, so every artifact records which
// settings produced it. Canonical form: "key=value" lines in key order.
inline std::uint64_t config_hash(const std::map<std::string, std::string>& options) {
	std::uint64_t h = 14695981039346656037ull; // FNV-1a offset basis
	for (const auto& [key, value] : options) {
		h = rng::fnv1a64(key, h);
		h = rng::fnv1a64("=", h);
		h = rng::fnv1a64(value, h);
		h = rng::fnv1a64("\n", h);
	}
	return h;
}

struct RunMeta {
	std::uint64_t seed = 42;
	std::uint64_t config = 0;

	std::string config_hex() const {
		char buf[17];
		std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(config));
		return buf;
	}

	// Comment lines (without the leading "# ") for text artifacts.
	std::vector<std::string> comment_lines() const {
		return {std::string(kToolName) + " " + kVersion, "seed: " + std::to_string(seed),
		        "config: " + config_hex()};
	}
};

inline RunMeta make_run_meta(std::uint64_t seed, const std::map<std::string, std::string>& options) {
	return RunMeta{seed, config_hash(options)};
}

} // namespace counterscope
