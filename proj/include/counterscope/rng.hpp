#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace counterscope {
namespace rng {

// All randomness flows through mt19937_64 plus the hand-rolled draws below.
// The standard pins down the mt19937_64 sequence but NOT the distributions
// (std::uniform_real_distribution and friends may differ per library), and
// identical output across platforms and reruns is part of this tool's
// contract, so distributions are implemented here.

inline double uniform01(std::mt19937_64& g) {
	return static_cast<double>(g() >> 11) * 0x1.0p-53; // [0, 1)
}

inline std::size_t index(std::mt19937_64& g, std::size_t n) {
	return static_cast<std::size_t>(g() % n);
}

// Box-Muller; one value per call, two uniforms consumed.
inline double normal(std::mt19937_64& g) {
	const double u1 = uniform01(g);
	const double u2 = uniform01(g);
	const double r = std::sqrt(-2.0 * std::log(1.0 - u1)); // 1-u1 avoids log(0)
	return r * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Index drawn proportionally to non-negative weights; caller guarantees a
// positive total.
inline std::size_t weighted_index(std::mt19937_64& g, const std::vector<double>& weights,
                                  double total) {
	const double u = uniform01(g) * total;
	double cum = 0.0;
	for (std::size_t i = 0; i < weights.size(); ++i) {
		cum += weights[i];
		if (u < cum)
			return i;
	}
	return weights.size() - 1; // fp slack
}

// FNV-1a, used to derive independent per-entity streams from a master seed.
inline std::uint64_t fnv1a64(const std::string& text, std::uint64_t basis = 14695981039346656037ull) {
	std::uint64_t h = basis;
	for (unsigned char c : text) {
		h ^= c;
		h *= 1099511628211ull;
	}
	return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, const std::string& name) {
	std::uint64_t h = 14695981039346656037ull;
	for (int i = 0; i < 8; ++i) {
		h ^= (master >> (8 * i)) & 0xffu;
		h *= 1099511628211ull;
	}
	return fnv1a64(name, h);
}

} // namespace rng
} // namespace counterscope
