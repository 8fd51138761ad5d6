#ifndef WDRO_VERSION_HPP
#define WDRO_VERSION_HPP

namespace wdro {

inline constexpr const char* kVersion = "0.1.0";

}

#endif
