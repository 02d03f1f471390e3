#pragma once

namespace rcm {

inline constexpr const char* engine_version = "1.0.0";

}  // namespace rcm
