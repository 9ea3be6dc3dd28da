#pragma once

namespace counterscope {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kToolName = "counterscope";

} // namespace counterscope
