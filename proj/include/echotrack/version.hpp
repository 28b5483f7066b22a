#pragma once

#define ECHOTRACK_VERSION "0.1.0"

namespace echotrack {

inline const char* version() { return ECHOTRACK_VERSION; }

}  // namespace echotrack
