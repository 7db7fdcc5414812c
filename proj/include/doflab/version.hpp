#pragma once

namespace doflab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace doflab
