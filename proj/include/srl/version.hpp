#pragma once

namespace srl {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kCsvSchemaVersion = "1";

}  // namespace srl
