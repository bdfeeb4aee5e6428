#pragma once

namespace qwc {

inline constexpr const char* qwc_version = "0.1.0";

} // namespace qwc
