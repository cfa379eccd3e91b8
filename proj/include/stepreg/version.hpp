#ifndef STEPREG_VERSION_HPP
#define STEPREG_VERSION_HPP

namespace stepreg {
inline constexpr const char* kVersion = "0.1.0";
}

#endif
