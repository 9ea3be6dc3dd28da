#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace counterscope {

// Raised for malformed or inconsistent input data (files, records, matrices).
// Argument/precondition misuse throws std::invalid_argument instead; the CLI
// maps the two to distinct exit codes.
class DataError : public std::runtime_error {
public:
	explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

// Most file-level errors carry the 1-based physical line number.
inline DataError data_error_at_line(const std::string& what, std::size_t line) {
	return DataError(what + ", line " + std::to_string(line));
}

} // namespace counterscope
