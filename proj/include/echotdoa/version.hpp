#pragma once

namespace echotdoa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace echotdoa
