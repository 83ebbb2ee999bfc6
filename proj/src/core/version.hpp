#ifndef SMAGDA_CORE_VERSION_HPP
#define SMAGDA_CORE_VERSION_HPP

namespace smagda {

inline constexpr int kVersionMajor = 0;
inline constexpr int kVersionMinor = 1;
inline constexpr int kVersionPatch = 0;
inline constexpr const char* kVersionString = "0.1.0";

}  // namespace smagda

#endif  // SMAGDA_CORE_VERSION_HPP
