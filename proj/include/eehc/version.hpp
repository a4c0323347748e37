#pragma once

namespace eehc {

inline constexpr const char* kVersion = "0.1.0";

// Recorded in output metadata so archived CSVs stay attributable to an
// exact random stream definition.
inline constexpr const char* kRngDescription =
    "std::mt19937_64; doubles via (x>>11)*2^-53; bounded ints via rejection";

}  // namespace eehc
